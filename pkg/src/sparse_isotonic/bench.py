"""Synthetic anchor-point instances, Monte-Carlo metrics and the recovery
rate experiment.

Randomness comes from NumPy's PCG64 seeded through ``SeedSequence``. Each
trial of an experiment owns the stream ``SeedSequence([seed, n, d, trial])``
so every method sees the same instance and results do not depend on the
order in which trials run.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .algorithms import RecoveryMethod, SparseFit, ipir_search, lpsr, predict_many, slpsr
from .core import ActiveSet, ArgumentError, ContractError, Dataset, NoiseModel, SizeGuardError

DEFAULT_SEED = 7
DEFAULT_MAX_SOLVER_CALLS = 50_000_000


def make_rng(*keys: int) -> np.random.Generator:
    """PCG64 stream keyed by a tuple of non-negative integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in keys])))


class McEstimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True, eq=False)
class AnchorModel:
    """``f(x) = 1`` iff some anchor is below ``x`` on the active coordinates."""

    anchors: np.ndarray
    active: ActiveSet
    noise_sigma: float = 0.0
    noise_model: NoiseModel = NoiseModel.NOISY_OUTPUT

    def __post_init__(self) -> None:
        Z = np.array(self.anchors, dtype=float)
        if Z.ndim != 2 or Z.shape[0] < 1 or Z.shape[1] != self.active.d:
            raise ArgumentError("anchors must be an r x d array with r >= 1 matching the active set")
        if np.any(Z < 0.0) or np.any(Z > 1.0):
            raise ArgumentError("anchors must lie in the unit cube")
        if not self.noise_sigma >= 0.0:
            raise ArgumentError("noise sigma must be non-negative")
        Z.setflags(write=False)
        object.__setattr__(self, "anchors", Z)
        object.__setattr__(self, "noise_model", NoiseModel.parse(self.noise_model))

    @property
    def d(self) -> int:
        return self.anchors.shape[1]

    @property
    def r(self) -> int:
        return self.anchors.shape[0]

    def f(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        cols = list(self.active.indices)
        Za = self.anchors[:, cols]
        out = np.zeros(X.shape[0])
        for start in range(0, X.shape[0], 4096):
            Xa = X[start : start + 4096, cols]
            out[start : start + 4096] = np.any(np.all(Za[None, :, :] <= Xa[:, None, :], axis=2), axis=1)
        return out

    def labels_for(self, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.noise_model is NoiseModel.NOISY_INPUT:
            W = rng.normal(0.0, self.noise_sigma, size=X.shape)
            return self.f(X + W)
        W = rng.normal(0.0, self.noise_sigma, size=X.shape[0])
        return self.f(X) + W

    def sample(self, n: int, rng: np.random.Generator) -> Dataset:
        X = rng.random((n, self.d))
        y = self.labels_for(X, rng)
        return Dataset(X, y, self.noise_model, sparsity_hint=self.active.s, strict_range=False)


def _check_params(n: int, d: int, s: int, r: int, sigma: float) -> None:
    if n < 1 or d < 1 or r < 1 or s < 1:
        raise ArgumentError("n, d, s and r must be positive")
    if s > d:
        raise ArgumentError(f"s={s} exceeds d={d}")
    if not sigma >= 0.0:
        raise ArgumentError("sigma must be non-negative")


def _seed_keys(seed: int | Sequence[int]) -> tuple[int, ...]:
    return tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)


def gen_anchor_instance(
    n: int, d: int, s: int, r: int, sigma: float, seed: int | Sequence[int],
    noise_model: NoiseModel | str = NoiseModel.NOISY_OUTPUT,
) -> tuple[Dataset, AnchorModel]:
    """Anchors, then features, then noise, all from one seeded stream.

    The active set is the first ``s`` coordinates and the noise ``sigma`` is
    a standard deviation. Output-model labels are ``f(X) + W``, unclipped.
    """
    _check_params(n, d, s, r, sigma)
    rng = make_rng(*_seed_keys(seed))
    Z = rng.random((r, d))
    model = AnchorModel(Z, ActiveSet(tuple(range(s)), d), float(sigma), noise_model)
    return model.sample(n, rng), model


def gen_noisy_input_instance(
    n: int, d: int, s: int, r: int, sigma: float, seed: int | Sequence[int]
) -> tuple[Dataset, AnchorModel]:
    """Binary labels ``f(X + W)`` with i.i.d. Gaussian feature noise."""
    return gen_anchor_instance(n, d, s, r, sigma, seed, NoiseModel.NOISY_INPUT)


def _as_function(obj) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(obj, SparseFit):
        return lambda X: predict_many(obj, X)
    if isinstance(obj, AnchorModel):
        return obj.f
    if callable(obj):
        return lambda X: np.asarray(obj(X), dtype=float)
    raise ArgumentError(f"cannot evaluate {type(obj).__name__} as a function")


def _dimension(*objs) -> int:
    for obj in objs:
        if isinstance(obj, (SparseFit, AnchorModel)):
            return obj.d
    raise ArgumentError("dimension unknown: pass a SparseFit or AnchorModel")


def l2_error_mc(fit, truth, n_mc: int, seed: int | Sequence[int]) -> McEstimate:
    """``||fit - truth||_2`` over the unit cube; stderr by the delta method."""
    if n_mc < 1:
        raise ArgumentError("n_mc must be positive")
    d = _dimension(fit, truth)
    X = make_rng(*_seed_keys(seed)).random((n_mc, d))
    sq = (_as_function(fit)(X) - _as_function(truth)(X)) ** 2
    mean = float(sq.mean())
    se_mean = float(sq.std(ddof=1) / math.sqrt(n_mc)) if n_mc > 1 else 0.0
    value = math.sqrt(mean)
    return McEstimate(value, se_mean / (2.0 * value) if value > 0 else 0.0)


def _binary_check(obj, name: str) -> None:
    if isinstance(obj, SparseFit) and not np.all(np.isin(obj.fitted, (0.0, 1.0))):
        raise ContractError(f"{name} is not binary-valued")


def discrepancy_mc(fit_a, fit_b, n_mc: int, seed: int | Sequence[int]) -> McEstimate:
    """Mass of the region where two monotone partitions disagree."""
    if n_mc < 1:
        raise ArgumentError("n_mc must be positive")
    _binary_check(fit_a, "first fit")
    _binary_check(fit_b, "second fit")
    d = _dimension(fit_a, fit_b)
    X = make_rng(*_seed_keys(seed)).random((n_mc, d))
    fa, fb = _as_function(fit_a)(X), _as_function(fit_b)(X)
    if not (np.all(np.isin(fa, (0.0, 1.0))) and np.all(np.isin(fb, (0.0, 1.0)))):
        raise ContractError("discrepancy needs binary-valued functions")
    diff = (fa != fb).astype(float)
    return McEstimate(float(diff.mean()), float(diff.std(ddof=1) / math.sqrt(n_mc)) if n_mc > 1 else 0.0)


def misclassification_q_mc(fit, truth: AnchorModel, n_mc: int, seed: int | Sequence[int]) -> McEstimate:
    """Probability that the fit's label disagrees with a fresh noisy label."""
    if truth.noise_model is not NoiseModel.NOISY_INPUT:
        raise ContractError("misclassification functional is defined for the noisy input model")
    if n_mc < 1:
        raise ArgumentError("n_mc must be positive")
    rng = make_rng(*_seed_keys(seed))
    X = rng.random((n_mc, truth.d))
    Y = truth.labels_for(X, rng)
    wrong = (_as_function(fit)(X) != Y).astype(float)
    return McEstimate(float(wrong.mean()), float(wrong.std(ddof=1) / math.sqrt(n_mc)) if n_mc > 1 else 0.0)


def estimate_gap_pk(model: AnchorModel, k: int, n_pairs: int, seed: int | Sequence[int]) -> McEstimate:
    """``P(Y1 > Y2 | X1k > X2k) - P(Y1 < Y2 | X1k > X2k)`` by rejection.

    For binary labels this is the ``(1, 0)`` minus ``(0, 1)`` form.
    """
    if not 0 <= k < model.d:
        raise ArgumentError(f"coordinate {k} out of range for d={model.d}")
    if n_pairs < 2:
        raise ArgumentError("n_pairs must be at least 2")
    rng = make_rng(*_seed_keys(seed))
    X1 = np.empty((0, model.d))
    X2 = np.empty((0, model.d))
    while X1.shape[0] < n_pairs:
        m = 2 * (n_pairs - X1.shape[0]) + 64
        A = rng.random((m, model.d))
        B = rng.random((m, model.d))
        keep = A[:, k] > B[:, k]
        X1 = np.vstack([X1, A[keep]])
        X2 = np.vstack([X2, B[keep]])
    X1, X2 = X1[:n_pairs], X2[:n_pairs]
    Y1 = model.labels_for(X1, rng)
    Y2 = model.labels_for(X2, rng)
    gap = np.sign(Y1 - Y2)
    return McEstimate(float(gap.mean()), float(gap.std(ddof=1) / math.sqrt(n_pairs)))


# ---------------------------------------------------------------- experiments


@dataclass(frozen=True)
class ExperimentConfig:
    ns: tuple[int, ...] = (50, 100, 150, 200, 250)
    ds: tuple[int, ...] = (5, 10, 20, 50)
    s: int = 3
    r: int = 10
    sigma: float = math.sqrt(0.1)
    trials: int = 20
    seed: int = DEFAULT_SEED
    methods: tuple[RecoveryMethod, ...] = (RecoveryMethod.IPIR, RecoveryMethod.LPSR, RecoveryMethod.SLPSR)
    noise_model: NoiseModel = NoiseModel.NOISY_OUTPUT
    max_solver_calls: int = DEFAULT_MAX_SOLVER_CALLS

    def __post_init__(self) -> None:
        object.__setattr__(self, "ns", tuple(int(v) for v in self.ns))
        object.__setattr__(self, "ds", tuple(int(v) for v in self.ds))
        object.__setattr__(self, "methods", tuple(RecoveryMethod.parse(m) for m in self.methods))
        object.__setattr__(self, "noise_model", NoiseModel.parse(self.noise_model))
        if not self.ns or not self.ds or not self.methods:
            raise ArgumentError("grid and method lists must be non-empty")
        if len(set(self.methods)) != len(self.methods):
            raise ArgumentError("methods must be distinct")
        if min(self.ns) < 1 or self.trials < 1 or self.r < 1 or self.s < 1:
            raise ArgumentError("n, trials, r and s must be positive")
        if min(self.ds) < self.s:
            raise ArgumentError(f"every d must be at least s={self.s}")
        if not self.sigma >= 0.0 or self.seed < 0:
            raise ArgumentError("sigma and seed must be non-negative")

    def solver_calls(self) -> int:
        per_trial = 0
        for d in self.ds:
            for m in self.methods:
                per_trial += {RecoveryMethod.IPIR: math.comb(d, self.s), RecoveryMethod.LPSR: 1,
                              RecoveryMethod.SLPSR: self.s}[m]
        return per_trial * len(self.ns) * self.trials


def _parse_list(text: str, kind, key: str) -> tuple:
    try:
        return tuple(kind(v.strip()) for v in text.split(",") if v.strip())
    except ValueError:
        raise ArgumentError(f"config key {key!r}: cannot parse {text!r}") from None


def load_experiment_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read the ``[experiment]`` section of an INI file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ArgumentError(f"malformed config {path}: {exc}") from None
    if not parser.has_section("experiment"):
        raise ArgumentError(f"config {path} has no [experiment] section")
    sec = parser["experiment"]
    known = {"n", "d", "s", "r", "sigma", "variance", "trials", "seed", "methods", "noise_model", "max_solver_calls"}
    unknown = set(sec) - known
    if unknown:
        raise ArgumentError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw: dict = {}
    try:
        if "n" in sec:
            kw["ns"] = _parse_list(sec["n"], int, "n")
        if "d" in sec:
            kw["ds"] = _parse_list(sec["d"], int, "d")
        for key in ("s", "r", "trials", "seed", "max_solver_calls"):
            if key in sec:
                kw[key] = int(sec[key])
        if "sigma" in sec and "variance" in sec:
            raise ArgumentError("give either sigma or variance, not both")
        if "sigma" in sec:
            kw["sigma"] = float(sec["sigma"])
        if "variance" in sec:
            kw["sigma"] = math.sqrt(float(sec["variance"]))
    except ValueError as exc:
        if isinstance(exc, ArgumentError):
            raise
        raise ArgumentError(f"config {path}: {exc}") from None
    if "methods" in sec:
        kw["methods"] = _parse_list(sec["methods"], str, "methods")
    if "noise_model" in sec:
        kw["noise_model"] = sec["noise_model"]
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw)


@dataclass
class RecoveryTable:
    """Success percentages per ``(method, n, d)`` plus per-trial detail."""

    config: ExperimentConfig
    successes: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    def percent(self, method: RecoveryMethod | str, n: int, d: int) -> float:
        m = RecoveryMethod.parse(method)
        return 100.0 * self.successes.get((m, n, d), 0) / self.config.trials

    def columns(self) -> list[tuple[RecoveryMethod, int]]:
        return [(m, d) for m in self.config.methods for d in self.config.ds]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n"] + [f"{m.value}_d{d}" for m, d in self.columns()])
        for n in self.config.ns:
            w.writerow([n] + [f"{self.percent(m, n, d):g}" for m, d in self.columns()])
        return buf.getvalue()

    def to_json(self) -> str:
        cfg = asdict(self.config)
        cfg["methods"] = [m.value for m in self.config.methods]
        cfg["noise_model"] = self.config.noise_model.value
        payload = {
            "config": cfg,
            "table": {f"{m.value}_d{d}": {str(n): self.percent(m, n, d) for n in self.config.ns}
                      for m, d in self.columns()},
            "trials": sorted(self.records, key=lambda r: (r["n"], r["d"], r["trial"], r["method"])),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def format(self) -> str:
        cols = self.columns()
        head = "n".rjust(5) + "".join(f"{m.value}:{d}".rjust(10) for m, d in cols)
        lines = [head]
        for n in self.config.ns:
            lines.append(str(n).rjust(5) + "".join(f"{self.percent(m, n, d):10.0f}" for m, d in cols))
        return "\n".join(lines)


def recover_with(method: RecoveryMethod, dataset: Dataset, s: int) -> ActiveSet:
    if method is RecoveryMethod.IPIR:
        return ActiveSet(ipir_search(dataset, s).best_subset, dataset.d)
    if method is RecoveryMethod.LPSR:
        return lpsr(dataset, s)
    return slpsr(dataset, s)


def run_trial(config: ExperimentConfig, n: int, d: int, trial: int) -> list[dict]:
    ds, model = gen_anchor_instance(n, d, config.s, config.r, config.sigma,
                                    (config.seed, n, d, trial), config.noise_model)
    out = []
    for m in config.methods:
        found = recover_with(m, ds, config.s)
        out.append({"n": n, "d": d, "trial": trial, "method": m.value,
                    "recovered": found.one_based(), "success": found == model.active})
    return out


def _run_trial_args(args) -> list[dict]:
    return run_trial(*args)


def recovery_experiment(
    config: ExperimentConfig,
    workers: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> RecoveryTable:
    """Exact-support recovery rates over the ``(n, d)`` grid."""
    calls = config.solver_calls()
    if calls > config.max_solver_calls:
        raise SizeGuardError(f"experiment needs about {calls} solver calls, budget is {config.max_solver_calls}")
    jobs = [(config, n, d, t) for n in config.ns for d in config.ds for t in range(config.trials)]
    table = RecoveryTable(config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_run_trial_args, jobs, chunksize=4)
            batches = list(_with_progress(results, len(jobs), progress))
    else:
        batches = list(_with_progress(map(_run_trial_args, jobs), len(jobs), progress))
    for batch in batches:
        for rec in batch:
            key = (RecoveryMethod(rec["method"]), rec["n"], rec["d"])
            table.successes[key] = table.successes.get(key, 0) + int(rec["success"])
            table.records.append(rec)
    return table


def _with_progress(it: Iterable, total: int, progress) -> Iterable:
    for done, item in enumerate(it, start=1):
        if progress is not None:
            progress(done, total)
        yield item
