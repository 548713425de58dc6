"""Support-recovery table on the anchor-point benchmark.

Runs the configured (n, d) grid, writes the percentage table as CSV and the
per-trial records as JSON, and compares every cell with the reference
percentages (20 trials each) using the acceptance bands.

    python3 scripts/run_table1.py --trials 100 --out results/table1
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from sparse_isotonic.bench import load_experiment_config, recovery_experiment

ROOT = Path(__file__).resolve().parents[1]

# reference success percentages, rows n = 50..250, columns d = 5, 10, 20, 50
REFERENCE = {
    "ipir": [[65, 60, 60, 40], [90, 90, 70, 70], [100, 100, 95, 90], [100, 100, 90, 95], [100, 100, 90, 90]],
    "lpsr": [[70, 25, 5, 0], [95, 40, 20, 0], [100, 60, 30, 0], [100, 50, 35, 5], [95, 75, 45, 0]],
    "slpsr": [[55, 50, 15, 5], [65, 65, 55, 20], [95, 80, 50, 45], [100, 90, 65, 40], [90, 75, 70, 55]],
}
NS = (50, 100, 150, 200, 250)
DS = (5, 10, 20, 50)


def band(reference: float, widen: float = 0.0) -> float:
    return (15.0 if reference in (0, 100) else 25.0) + widen


def compare(table, widen: float = 0.0) -> list[str]:
    """Cells outside their band, as readable strings."""
    misses = []
    for method, rows in REFERENCE.items():
        for n, row in zip(NS, rows):
            for d, ref in zip(DS, row):
                got = table.percent(method, n, d)
                if abs(got - ref) > band(ref, widen):
                    misses.append(f"{method} n={n} d={d}: {got:.0f} vs {ref}")
    return misses


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", default=str(ROOT / "configs" / "table1.cfg"))
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=str(ROOT / "results" / "table1"))
    args = parser.parse_args()

    config = load_experiment_config(args.config, trials=args.trials, seed=args.seed)
    start = time.time()
    table = recovery_experiment(
        config, workers=args.workers,
        progress=lambda done, total: print(f"\r{done}/{total}", end="", file=sys.stderr, flush=True),
    )
    print(file=sys.stderr)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".csv").write_text(table.to_csv())
    out.with_suffix(".json").write_text(table.to_json())
    print(table.format())
    print(f"{config.trials} trials in {time.time() - start:.0f}s")
    misses = compare(table, widen=5.0 if config.trials < 100 else 0.0)
    print("all cells within bands" if not misses else "outside band:\n  " + "\n  ".join(misses))
    return 0


if __name__ == "__main__":
    sys.exit(main())
