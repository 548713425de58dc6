"""Held-out accuracy of the two-stage estimator on noisy-input data.

Reports, for a range of sample sizes, the accuracy against fresh noisy
labels and against the noiseless labels, next to the accuracy of the true
function itself (the best any classifier can do against noisy labels).

    python3 scripts/input_model_accuracy.py --ns 400,1600 --seeds 5
"""

from __future__ import annotations

import argparse

import numpy as np

from sparse_isotonic.algorithms import RecoveryConfig, RecoveryMethod, tsir_fit, predict_many
from sparse_isotonic.bench import gen_noisy_input_instance, make_rng


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--ns", default="400,1600")
    parser.add_argument("--d", type=int, default=20)
    parser.add_argument("--s", type=int, default=3)
    parser.add_argument("--r", type=int, default=10)
    parser.add_argument("--sigma", type=float, default=0.05)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--rule", choices=["min", "max"], default="min")
    parser.add_argument("--test-size", type=int, default=20_000)
    args = parser.parse_args()

    print(f"{'n':>6} {'noisy':>8} {'clean':>8} {'truth':>8} {'support':>8}")
    for n in (int(v) for v in args.ns.split(",")):
        rows = []
        for seed in range(args.seeds):
            ds, model = gen_noisy_input_instance(n, args.d, args.s, args.r, args.sigma, (2024 + seed,))
            fit = tsir_fit(ds, args.s, RecoveryConfig(RecoveryMethod.SLPSR), args.rule)
            rng = make_rng(2024 + seed, 1)
            X = rng.random((args.test_size, args.d))
            Y = model.labels_for(X, rng)
            clean = model.f(X)
            pred = predict_many(fit, X)
            rows.append((np.mean(pred == Y), np.mean(pred == clean), np.mean(clean == Y), fit.active == model.active))
        m = np.mean(np.array(rows, dtype=float), axis=0)
        print(f"{n:>6} {m[0]:>8.4f} {m[1]:>8.4f} {m[2]:>8.4f} {m[3]:>8.2f}")


if __name__ == "__main__":
    main()
