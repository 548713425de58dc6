"""Exact labeling counts of random point sets against the growth bounds,
plus the border-cell maximum over all monotone partitions of small grids.

    python3 scripts/labeling_bounds.py --trials 200
"""

from __future__ import annotations

import argparse

from sparse_isotonic.combinatorics import (
    border_cell_bound,
    border_cell_count,
    empirical_labeling_bounds,
    integer_partitions,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=6)
    args = parser.parse_args()

    print(f"{'d':>2} {'n':>3} {'lower':>10} {'mean count':>12} {'upper':>12} within")
    for d in (2, 3):
        for n in (4, 8, 12, 16):
            r = empirical_labeling_bounds(n, d, args.trials, args.seed)
            print(f"{d:>2} {n:>3} {r.lower:>10.4g} {r.mean_count:>12.6g} {r.upper:>12.4g} {r.within}")

    print("\nborder cells: max over partitions vs m^d - (m-1)^d")
    for d, ms in ((2, range(1, 7)), (3, range(1, 4))):
        for m in ms:
            best = max(border_cell_count(h, m) for h in integer_partitions(m, d - 1))
            print(f"d={d} m={m}: {best} <= {border_cell_bound(m, d)}")


if __name__ == "__main__":
    main()
