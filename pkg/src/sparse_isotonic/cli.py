"""Command line interface: ``sparse-iso <subcommand> ...``.

Exit codes: 0 success, 2 invalid input or arguments, 3 a size or budget
guard refused the request. Output files are written to a temporary file
and renamed, so a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

from .algorithms import (
    RecoveryConfig,
    RecoveryMethod,
    Rule,
    SparseFit,
    ipir_fit,
    lpsr_solve,
    predict_many,
    recover_support,
    tsir_fit,
    aggregated_lpsr_problem,
    violating_patterns,
)
from .bench import DEFAULT_SEED, load_experiment_config, recovery_experiment
from .combinatorics import (
    PointPoset,
    count_binary_labelings,
    count_m_labelings,
    empirical_labeling_bounds,
)
from .core import ArgumentError, ContractError, DataFormatError, SizeGuardError, read_dataset_csv, read_points_csv

EXIT_OK = 0
EXIT_USER = 2
EXIT_GUARD = 3

EPILOG = """exit codes:
  0  success
  2  malformed input file or invalid arguments
  3  refused by a size or budget guard
"""


def write_atomic(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    if str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value} (s >= 1 is required for sparsity)")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("values must be positive integers")
    return values


def read_exclusions(path: Optional[str], d: int) -> tuple[tuple[int, int], ...]:
    """CSV with header ``i,j`` listing 1-based coordinate pairs."""
    if not path:
        return ()
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip().lower() for h in rows[0]] != ["i", "j"]:
        raise DataFormatError("exclusion file header must be i,j", 1)
    pairs = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise DataFormatError(f"expected 2 fields, found {len(row)}", lineno)
        try:
            i, j = int(row[0]), int(row[1])
        except ValueError:
            raise DataFormatError("coordinates must be integers", lineno) from None
        if not (1 <= i <= d and 1 <= j <= d) or i == j:
            raise DataFormatError(f"pair ({i}, {j}) invalid for d={d}", lineno)
        pairs.append((i - 1, j - 1))
    return tuple(pairs)


def _summary(out: str, line: str) -> None:
    # keep stdout clean when the payload itself goes there
    print(line, file=sys.stderr if str(out) == "-" else sys.stdout)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_fit(args: argparse.Namespace) -> int:
    ds = read_dataset_csv(args.data, args.model, strict_range=not args.allow_unbounded)
    excl = read_exclusions(args.exclusions, ds.d)
    if args.s > ds.d:
        raise ArgumentError(f"s={args.s} exceeds d={ds.d}; s must satisfy 1 <= s <= d")
    if args.method == "ipir":
        fit = ipir_fit(ds, args.s, args.rule, RecoveryConfig(RecoveryMethod.IPIR, excl))
    else:
        method = RecoveryMethod.LPSR if args.method == "tsir-lpsr" else RecoveryMethod.SLPSR
        fit = tsir_fit(ds, args.s, RecoveryConfig(method, excl), args.rule)
    if args.lp_dump:
        write_atomic(args.lp_dump, aggregated_lpsr_problem(violating_patterns(ds), ds.d, args.s).to_text())
    payload = fit.to_dict()
    payload["seed"] = args.seed
    write_atomic(args.out, _dump_json(payload))
    _summary(args.out, f"method={fit.method} s={args.s} active={fit.active.one_based()} "
                       f"objective={fit.objective:.10g} n={ds.n} d={ds.d}")
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    try:
        with open(args.fit) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"fit file is not valid JSON: {exc.msg}", exc.lineno) from None
    fit = SparseFit.from_dict(data)
    points = read_points_csv(args.points, fit.d)
    preds = predict_many(fit, points)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["prediction"])
    for v in preds:
        w.writerow([repr(float(v))])
    write_atomic(args.out, buf.getvalue())
    _summary(args.out, f"predicted {points.shape[0]} points with the {fit.rule.value} rule")
    return EXIT_OK


def cmd_recover(args: argparse.Namespace) -> int:
    ds = read_dataset_csv(args.data, args.model, strict_range=not args.allow_unbounded)
    excl = read_exclusions(args.exclusions, ds.d)
    if args.s > ds.d:
        raise ArgumentError(f"s={args.s} exceeds d={ds.d}; s must satisfy 1 <= s <= d")
    config = RecoveryConfig(args.method, excl, fresh_data=args.fresh_data)
    active = recover_support(ds, args.s, config)
    payload = {"active_indices": active.one_based(), "method": config.method.value, "s": args.s, "seed": args.seed}
    if config.method is RecoveryMethod.LPSR:
        payload["v"] = lpsr_solve(ds, args.s).v.tolist()
    if args.lp_dump:
        write_atomic(args.lp_dump, aggregated_lpsr_problem(violating_patterns(ds), ds.d, args.s).to_text())
    write_atomic(args.out, _dump_json(payload))
    _summary(args.out, f"method={config.method.value} s={args.s} active={active.one_based()}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config, trials=args.trials, seed=args.seed)

    def progress(done: int, total: int) -> None:
        if args.verbose:
            print(f"\r{done}/{total} trials", end="", file=sys.stderr, flush=True)

    table = recovery_experiment(config, workers=args.threads, progress=progress)
    if args.verbose:
        print(file=sys.stderr)
    write_atomic(args.out_csv, table.to_csv())
    if args.out_json:
        write_atomic(args.out_json, table.to_json())
    _summary(args.out_csv, table.format())
    return EXIT_OK


def cmd_count(args: argparse.Namespace) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.points:
        poset = PointPoset.from_points(read_points_csv(args.points))
        w.writerow(["n", "m", "count"])
        for m in args.m:
            count = count_binary_labelings(poset) if m == 2 else count_m_labelings(poset, m)
            w.writerow([poset.n, m, count.count])
    else:
        if args.n is None or args.d is None:
            raise ArgumentError("count needs either --points or both --n and --d")
        w.writerow(["n", "d", "trials", "mean_count", "lower", "upper", "within"])
        for d in args.d:
            for n in args.n:
                res = empirical_labeling_bounds(n, d, args.trials, args.seed)
                w.writerow([n, d, args.trials, repr(res.mean_count), repr(res.lower), repr(res.upper),
                            str(res.within).lower()])
    write_atomic(args.out, buf.getvalue())
    if args.out != "-":
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-iso",
        description="Sparse coordinate-wise isotonic regression and support recovery.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", required=True, help="CSV with header x1,...,xd,y")
        p.add_argument("--model", choices=["output", "input"], default="output",
                       help="noise model: real labels in [0,1] (output) or binary labels (input)")
        p.add_argument("--s", type=_positive_int, required=True, help="number of active coordinates (s >= 1)")
        p.add_argument("--exclusions", help="CSV with header i,j of mutually exclusive coordinates (1-based)")
        p.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED, help=f"seed (default {DEFAULT_SEED})")
        p.add_argument("--allow-unbounded", action="store_true",
                       help="accept output-model labels outside [0,1] (synthetic data)")
        p.add_argument("--lp-dump", help="also write the support-recovery LP in text form")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    p = sub.add_parser("fit", help="fit a sparse monotone function", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    data_args(p)
    p.add_argument("--method", choices=["ipir", "tsir-lpsr", "tsir-slpsr"], default="ipir")
    p.add_argument("--rule", type=Rule.parse, default=Rule.MIN, help="interpolation rule: min or max")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="evaluate a saved fit", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--fit", required=True, help="fit JSON written by 'fit'")
    p.add_argument("--points", required=True, help="CSV with header x1,...,xd")
    p.add_argument("--out", default="-", help="predictions CSV ('-' for stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("recover", help="estimate the active coordinates only", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    data_args(p)
    p.add_argument("--method", choices=["lpsr", "slpsr", "ipir"], default="slpsr")
    p.add_argument("--fresh-data", action="store_true", help="S-LPSR: use a separate fold per round")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("bench", help="support-recovery experiment from a config file", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True, help="INI file with an [experiment] section")
    p.add_argument("--trials", type=_positive_int, help="override the trial count")
    p.add_argument("--seed", type=_nonneg_int, help="override the seed")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker processes (default 1)")
    p.add_argument("--out-csv", default="-", help="recovery table CSV ('-' for stdout)")
    p.add_argument("--out-json", help="per-trial JSON")
    p.add_argument("--verbose", action="store_true", help="progress on stderr")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("count", help="count monotone labelings", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--points", help="CSV with header x1,...,xd; counts labelings of these points")
    p.add_argument("--m", type=_int_list, default=[2], help="label counts, comma-separated (with --points)")
    p.add_argument("--n", type=_int_list, help="sample sizes for the random sweep")
    p.add_argument("--d", type=_int_list, help="dimensions for the random sweep")
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)
    p.add_argument("--out", default="-", help="output CSV ('-' for stdout)")
    p.set_defaults(func=cmd_count)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ArgumentError, ContractError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
