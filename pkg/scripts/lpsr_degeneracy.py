"""How often the support-recovery LP has a non-unique optimal support.

For each instance the aggregated LP is solved, then its optimal face is
probed twice: is there an optimal v whose s largest entries are exactly the
true support (``some``), and is that true of every optimal v (``all``)?
When ``some`` and ``all`` differ, the reported support depends on which
optimal vertex the solver returns.

    python3 scripts/lpsr_degeneracy.py --n 100 --d 10 --trials 30
"""

from __future__ import annotations

import argparse
import math

import numpy as np
from scipy.optimize import linprog

from sparse_isotonic.algorithms import lpsr_solve, violating_patterns
from sparse_isotonic.bench import gen_anchor_instance


def face_margins(P: np.ndarray, w: np.ndarray, s: int, active: tuple[int, ...]) -> tuple[float, float]:
    """Max and min over the optimal face of ``min_A v - max_{not A} v``.

    The min is bounded by the smallest pairwise ``v_a - v_k``, which is what
    is returned (a lower bound that is exact when it is <= 0).
    """
    G, d = P.shape
    nv = d + G + 2
    A_ub = np.hstack([-P, -np.eye(G), np.zeros((G, 2))])
    b_ub = -np.ones(G)
    A_eq = np.r_[np.ones(d), np.zeros(G + 2)][None, :]
    bounds = [(0, 1)] * d + [(0, None)] * G + [(None, None)] * 2
    c = np.r_[np.zeros(d), w, 0, 0]
    opt = linprog(c, A_ub, b_ub, A_eq, [s], bounds=bounds, method="highs").fun
    A_face = np.vstack([A_ub, c])
    b_face = np.r_[b_ub, opt + 1e-7 * (1 + opt)]

    inactive = [k for k in range(d) if k not in active]
    rows = []
    for a in active:  # z <= v_a
        r = np.zeros(nv); r[d + G] = 1; r[a] = -1; rows.append(r)
    for k in inactive:  # z2 >= v_k
        r = np.zeros(nv); r[d + G + 1] = -1; r[k] = 1; rows.append(r)
    obj = np.zeros(nv); obj[d + G] = -1; obj[d + G + 1] = 1
    best = -linprog(obj, np.vstack([A_face, rows]), np.r_[b_face, np.zeros(len(rows))], A_eq, [s],
                    bounds=bounds, method="highs").fun
    worst = np.inf
    for a in active:
        for k in inactive:
            o = np.zeros(nv); o[a] = 1; o[k] = -1
            worst = min(worst, linprog(o, A_face, b_face, A_eq, [s], bounds=bounds, method="highs").fun)
    return best, worst


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--d", type=int, default=10)
    parser.add_argument("--s", type=int, default=3)
    parser.add_argument("--trials", type=int, default=30)
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args()

    ours = some = every = 0
    for t in range(args.trials):
        ds, model = gen_anchor_instance(args.n, args.d, args.s, 10, math.sqrt(0.1), (args.seed, args.n, args.d, t))
        pats = violating_patterns(ds)
        ours += lpsr_solve(ds, args.s).active.indices == model.active.indices
        best, worst = face_margins(pats.patterns.astype(float), pats.weights, args.s, model.active.indices)
        some += best > 1e-7
        every += worst > 1e-7
    print(f"n={args.n} d={args.d}: returned vertex correct {ours}/{args.trials}, "
          f"some optimum correct {some}/{args.trials}, every optimum correct {every}/{args.trials}")


if __name__ == "__main__":
    main()
