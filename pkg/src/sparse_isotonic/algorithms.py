"""Sparse monotone estimation: IPIR, LPSR, S-LPSR, TSIR and prediction.

IPIR is solved exactly by branch and bound over coordinate subsets. The
bound for a subset ``A`` adds, over a greedy matching of disjoint sample
pairs that violate monotonicity under ``A``, the least cost of repairing
each pair in isolation; any matching gives a valid lower bound on the
fixed-support optimum. Bounds are computed for all subsets of a chunk at
once with bitmask tests, and only subsets whose bound does not exceed the
incumbent are solved exactly.

The support-recovery LPs are solved in an aggregated but equivalent form:
the per-coordinate corrections of one pair collapse to a single hinge
variable, and pairs with identical strict-dominance patterns are merged
with a multiplicity weight.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .core import (
    ActiveSet,
    ArgumentError,
    Dataset,
    NoiseModel,
    SizeGuardError,
)
from .exact import FitResult, solve_fixed
from .lp import LpProblem, LpSolution, solve_lp

MAX_SUBSETS = 1_000_000
CHUNK = 20_000
EXHAUSTIVE_BELOW = 16  # subsets; below this the bound is not worth computing
WARMUP_PAIRS = 2_000
PRUNE_EVERY = 200
TIE_TOL = 1e-9  # relative; v values closer than this count as tied


class Rule(str, enum.Enum):
    MIN = "min"
    MAX = "max"

    @classmethod
    def parse(cls, value: "str | Rule") -> "Rule":
        try:
            return cls(str(getattr(value, "value", value)).lower())
        except ValueError:
            raise ArgumentError(f"unknown interpolation rule {value!r} (expected 'min' or 'max')") from None


class RecoveryMethod(str, enum.Enum):
    IPIR = "ipir"
    LPSR = "lpsr"
    SLPSR = "slpsr"

    @classmethod
    def parse(cls, value: "str | RecoveryMethod") -> "RecoveryMethod":
        key = str(getattr(value, "value", value)).lower().replace("-", "")
        try:
            return cls(key)
        except ValueError:
            raise ArgumentError(f"unknown recovery method {value!r}") from None


@dataclass(frozen=True)
class RecoveryConfig:
    """How to pick the active set, plus negation-exclusion pairs (0-based).

    A pair ``(i, j)`` says coordinate ``j`` is the negation of ``i``; the
    relation is symmetric and stored with ``i < j``.
    """

    method: RecoveryMethod = RecoveryMethod.SLPSR
    exclusion_pairs: tuple[tuple[int, int], ...] = ()
    fresh_data: bool = False
    lp_method: str = "auto"

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", RecoveryMethod.parse(self.method))
        pairs = set()
        for pair in self.exclusion_pairs:
            if len(pair) != 2:
                raise ArgumentError(f"exclusion pair {pair!r} must have two entries")
            i, j = (int(v) for v in pair)
            if i == j or i < 0 or j < 0:
                raise ArgumentError(f"invalid exclusion pair ({i}, {j})")
            pairs.add((min(i, j), max(i, j)))
        object.__setattr__(self, "exclusion_pairs", tuple(sorted(pairs)))

    def validate(self, d: int) -> None:
        for i, j in self.exclusion_pairs:
            if j >= d:
                raise ArgumentError(f"exclusion pair ({i + 1}, {j + 1}) out of range for d={d}")

    def partners(self, k: int) -> list[int]:
        return [j if i == k else i for i, j in self.exclusion_pairs if k in (i, j)]


@dataclass(frozen=True, eq=False)
class SparseFit:
    """Fitted values on the training points plus the interpolation rule."""

    fit: FitResult
    rule: Rule
    features: np.ndarray
    method: str = "ipir"
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        X = np.array(self.features, dtype=float)
        if X.ndim != 2 or X.shape[0] != self.fit.fitted.shape[0] or X.shape[1] != self.fit.active.d:
            raise ArgumentError("training features do not match the fit")
        X.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "rule", Rule.parse(self.rule))

    @property
    def active(self) -> ActiveSet:
        return self.fit.active

    @property
    def fitted(self) -> np.ndarray:
        return self.fit.fitted

    @property
    def objective(self) -> float:
        return self.fit.objective

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __call__(self, x: np.ndarray) -> np.ndarray | float:
        return predict(self, x)

    def to_dict(self) -> dict:
        return {
            "active_indices": self.active.one_based(),
            "features": self.features.tolist(),
            "fitted_values": self.fitted.tolist(),
            "method": self.method,
            "noise_model": self.fit.noise_model.value,
            "objective": self.objective,
            "rule": self.rule.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SparseFit":
        try:
            X = np.asarray(data["features"], dtype=float)
            if X.ndim != 2:
                raise ArgumentError("features must be a list of rows")
            active = ActiveSet.from_one_based(data["active_indices"], X.shape[1])
            fit = FitResult(
                np.asarray(data["fitted_values"], dtype=float),
                float(data["objective"]),
                active,
                NoiseModel.parse(data.get("noise_model", "output")),
            )
            return cls(fit, Rule.parse(data["rule"]), X, str(data.get("method", "ipir")))
        except KeyError as exc:
            raise ArgumentError(f"fit file lacks field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ArgumentError):
                raise
            raise ArgumentError(f"malformed fit file: {exc}") from None


def predict_many(fit: SparseFit, points: np.ndarray, block: int = 2048) -> np.ndarray:
    """Min rule: largest F_i over training points below ``x`` (0 if none).
    Max rule: smallest F_i over training points above ``x`` (1 if none).
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != fit.d:
        raise ArgumentError(f"points must have {fit.d} coordinates, got shape {P.shape}")
    cols = list(fit.active.indices)
    Xa = fit.features[:, cols]
    F = fit.fitted
    out = np.empty(P.shape[0])
    for start in range(0, P.shape[0], block):
        Pa = P[start : start + block, cols]
        if fit.rule is Rule.MIN:
            below = np.all(Xa[None, :, :] <= Pa[:, None, :], axis=2)
            out[start : start + block] = np.max(np.where(below, F[None, :], 0.0), axis=1, initial=0.0)
        else:
            above = np.all(Pa[:, None, :] <= Xa[None, :, :], axis=2)
            out[start : start + block] = np.min(np.where(above, F[None, :], 1.0), axis=1, initial=1.0)
    return out


def predict(fit: SparseFit, x: np.ndarray) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != fit.d:
            raise ArgumentError(f"point has {x.shape[0]} coordinates, expected {fit.d}")
        return float(predict_many(fit, x[None, :])[0])
    return predict_many(fit, x)


# ---------------------------------------------------------------- IPIR


def _check_s(s: int, d: int) -> int:
    if not isinstance(s, (int, np.integer)) or isinstance(s, bool):
        raise ArgumentError(f"sparsity s must be an integer, got {s!r}")
    if not 1 <= s <= d:
        raise ArgumentError(f"sparsity s must satisfy 1 <= s <= d={d}, got s={s}")
    return int(s)


def _repair_pairs(dataset: Dataset) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Violating pairs ``(i, j)`` with ``Y_i > Y_j`` and the extra cost each
    forces when ``i <=_A j``, sorted by that cost (descending).

    Returns ``(I, J, w, base)`` where ``base`` is the cost that every fit
    pays regardless of ``A`` (labels outside the admissible range).
    """
    y = dataset.labels
    I, J = np.nonzero(y[:, None] > y[None, :])
    if dataset.noise_model is NoiseModel.NOISY_INPUT:
        w = np.ones(I.size)
        base = 0.0
        b = np.zeros_like(y)
    else:
        b = (y - np.clip(y, 0.0, 1.0)) ** 2
        t = np.clip((y[I] + y[J]) / 2.0, 0.0, 1.0)
        w = (y[I] - t) ** 2 + (y[J] - t) ** 2 - b[I] - b[J]
        base = float(b.sum())
    keep = w > 0.0
    I, J, w = I[keep], J[keep], w[keep]
    order = np.argsort(-w, kind="stable")
    return I[order], J[order], w[order], base


@dataclass
class IpirSearch:
    """Bookkeeping of one IPIR run (for diagnostics and tests)."""

    subsets: int = 0
    evaluated: int = 0
    best_objective: float = math.inf
    best_subset: Optional[tuple[int, ...]] = None

    def offer(self, subset: tuple[int, ...], objective: float) -> None:
        self.evaluated += 1
        best = self.best_objective
        tie = 1e-12 * max(1.0, abs(objective))
        if (
            self.best_subset is None
            or objective < best - tie
            or (abs(objective - best) <= tie and subset < self.best_subset)
        ):
            self.best_objective = objective
            self.best_subset = subset

    def prune_level(self) -> float:
        inc = self.best_objective
        return inc + 1e-9 * max(1.0, abs(inc)) if math.isfinite(inc) else math.inf


def _subset_stream(d: int, s: int, exclusions: RecoveryConfig) -> Iterable[tuple[int, ...]]:
    banned = set(exclusions.exclusion_pairs)
    for combo in itertools.combinations(range(d), s):
        if banned and any((a, b) in banned for a, b in itertools.combinations(combo, 2)):
            continue
        yield combo


def _objective(dataset: Dataset, subset: tuple[int, ...]) -> float:
    return solve_fixed(dataset, subset, certify=False).objective


def _bound_chunk(
    dataset: Dataset,
    combos: list[tuple[int, ...]],
    pairs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float],
    search: IpirSearch,
) -> None:
    I, J, w, Q, base = pairs
    n = dataset.n
    idx = np.arange(len(combos))
    masks = np.zeros(len(combos), dtype=np.int64)
    arr = np.asarray(combos, dtype=np.int64)
    for col in arr.T:
        masks |= np.left_shift(np.int64(1), col)
    lb = np.full(len(combos), base)
    used = np.zeros((len(combos), n), dtype=bool)
    warm = not math.isfinite(search.best_objective)
    for p in range(I.size):
        i, j = I[p], J[p]
        take = ((Q[p] & masks) == 0) & ~used[:, i] & ~used[:, j]
        used[take, i] = True
        used[take, j] = True
        lb[take] += w[p]
        if warm and (p + 1 == WARMUP_PAIRS or p + 1 == I.size):
            # incumbent from the most promising partial bound
            k = int(np.argmin(lb))
            search.offer(combos[idx[k]], _objective(dataset, combos[idx[k]]))
            warm = False
        if not warm and (p + 1) % PRUNE_EVERY == 0:
            alive = lb <= search.prune_level()
            if not alive.all():
                idx, masks, used, lb = idx[alive], masks[alive], used[alive], lb[alive]
            if idx.size <= 4:
                break
    if warm:
        k = int(np.argmin(lb))
        search.offer(combos[idx[k]], _objective(dataset, combos[idx[k]]))
    for k in np.lexsort((idx, lb)):
        if lb[k] > search.prune_level():
            break
        combo = combos[idx[k]]
        if combo == search.best_subset:
            continue
        search.offer(combo, _objective(dataset, combo))


def ipir_search(
    dataset: Dataset,
    s: int,
    exclusions: Optional[RecoveryConfig] = None,
    prune: bool = True,
    max_subsets: int = MAX_SUBSETS,
) -> IpirSearch:
    """Find the subset of size ``s`` with the smallest fixed-support optimum.

    Ties go to the lexicographically smallest subset. ``prune=False``
    solves every subset exactly (reference behaviour for tests).
    """
    d = dataset.d
    s = _check_s(s, d)
    exclusions = exclusions or RecoveryConfig()
    exclusions.validate(d)
    total = math.comb(d, s)
    if total > max_subsets:
        raise SizeGuardError(f"C({d}, {s}) = {total} subsets exceeds the limit of {max_subsets}")
    search = IpirSearch(subsets=0)
    stream = _subset_stream(d, s, exclusions)
    if not prune or total <= EXHAUSTIVE_BELOW or d > 63:
        for combo in stream:
            search.subsets += 1
            search.offer(combo, _objective(dataset, combo))
    else:
        I, J, w, base = _repair_pairs(dataset)
        X = dataset.features
        Q = np.zeros(I.size, dtype=np.int64)
        for k in range(d):
            Q |= (X[I, k] > X[J, k]).astype(np.int64) << np.int64(k)
        pairs = (I, J, w, Q, base)
        while True:
            combos = list(itertools.islice(stream, CHUNK))
            if not combos:
                break
            search.subsets += len(combos)
            _bound_chunk(dataset, combos, pairs, search)
    if search.best_subset is None:
        raise ArgumentError("no admissible subset: every subset contains an excluded pair")
    return search


def ipir_fit(
    dataset: Dataset,
    s: int,
    rule: Rule | str = Rule.MIN,
    exclusions: Optional[RecoveryConfig] = None,
    prune: bool = True,
    max_subsets: int = MAX_SUBSETS,
) -> SparseFit:
    """Jointly optimal active set of size ``s`` and fitted values."""
    search = ipir_search(dataset, s, exclusions, prune, max_subsets)
    fit = solve_fixed(dataset, search.best_subset, certify=True)
    info = {"subsets": search.subsets, "evaluated": search.evaluated}
    return SparseFit(fit, Rule.parse(rule), dataset.features, "ipir", info)


# ---------------------------------------------------------------- LPSR


@dataclass(frozen=True, eq=False)
class PairPatterns:
    """Distinct strict-dominance patterns of violating pairs.

    Row ``g`` of ``patterns`` is ``q(i, j, .)`` for the pairs with
    ``Y_i > Y_j`` sharing that pattern; ``weights[g]`` counts them.
    """

    patterns: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.shape[0]


def violating_patterns(dataset: Dataset) -> PairPatterns:
    X, y = dataset.features, dataset.labels
    I, J = np.nonzero(y[:, None] > y[None, :])
    Q = X[I] > X[J]
    Q = Q[Q.any(axis=1)]
    if Q.shape[0] == 0:
        return PairPatterns(np.zeros((0, dataset.d), dtype=bool), np.zeros(0))
    packed = np.packbits(Q, axis=1)
    keys = np.ascontiguousarray(packed).view(np.dtype((np.void, packed.shape[1]))).ravel()
    _, first, counts = np.unique(keys, return_index=True, return_counts=True)
    return PairPatterns(Q[first], counts.astype(float))


@dataclass(frozen=True, eq=False)
class LpsrSolution:
    v: np.ndarray
    objective: float
    active: ActiveSet
    lp: Optional[LpSolution] = field(default=None, repr=False)


def _top_indices(v: np.ndarray, s: int, allowed: np.ndarray) -> tuple[int, ...]:
    """The ``s`` largest entries of ``v`` among ``allowed``; near-ties go to
    the smaller index."""
    chosen: list[int] = []
    free = allowed.copy()
    for _ in range(s):
        cand = np.flatnonzero(free)
        top = v[cand].max()
        k = int(cand[v[cand] >= top - TIE_TOL * max(1.0, abs(top))][0])
        chosen.append(k)
        free[k] = False
    return tuple(sorted(chosen))


def hinge_objective(patterns: PairPatterns, v: np.ndarray) -> float:
    """Total correction ``sum_g w_g max(0, 1 - q_g . v)`` at ``v``."""
    if patterns.size == 0:
        return 0.0
    return float(patterns.weights @ np.maximum(0.0, 1.0 - patterns.patterns @ v))


def literal_lpsr_problem(dataset: Dataset, s: int, pinned: Sequence[int] = ()) -> LpProblem:
    """The recovery LP with one correction variable per (pair, coordinate).

    Corrections exist only where ``q(i, j, k) = 1``. Variables are
    ``v_1..v_d`` followed by the corrections, pair by pair.
    """
    d = dataset.d
    X, y = dataset.features, dataset.labels
    I, J = np.nonzero(y[:, None] > y[None, :])
    Q = X[I] > X[J]
    Q = Q[Q.any(axis=1)]
    rows, cols = np.nonzero(Q)
    n_corr = rows.size
    m = d + n_corr
    G = Q.shape[0]
    data = np.r_[np.ones(rows.size), np.ones(n_corr)]
    A_pairs = sp.coo_matrix(
        (data, (np.r_[rows, rows], np.r_[cols, d + np.arange(n_corr)])), shape=(G, m)
    )
    A = sp.vstack([A_pairs, sp.csr_matrix(np.r_[np.ones(d), np.zeros(n_corr)][None, :])]).tocsr()
    c = np.r_[np.zeros(d), np.ones(n_corr)]
    hi = np.r_[np.ones(d), np.full(n_corr, np.inf)]
    hi[list(pinned)] = 0.0
    return LpProblem(c, A, (">=",) * G + ("=",), np.r_[np.ones(G), float(s)], np.zeros(m), hi)


def aggregated_lpsr_problem(patterns: PairPatterns, d: int, s: int, pinned: Sequence[int] = ()) -> LpProblem:
    """Equivalent LP with one hinge variable per distinct pattern.

    Variables ``v_1..v_d, t_1..t_G``; rows ``q_g . v + t_g >= 1`` and
    ``sum v = s``; objective ``sum w_g t_g``.
    """
    G = patterns.size
    P = sp.csr_matrix(patterns.patterns.astype(float)).reshape(G, d)
    A = sp.vstack([sp.hstack([P, sp.identity(G)]), sp.csr_matrix(np.r_[np.ones(d), np.zeros(G)][None, :])]).tocsr()
    hi = np.r_[np.ones(d), np.full(G, np.inf)]
    hi[list(pinned)] = 0.0
    return LpProblem(np.r_[np.zeros(d), patterns.weights], A, (">=",) * G + ("=",), np.r_[np.ones(G), float(s)],
                     np.zeros(d + G), hi)


def dual_lpsr_problem(patterns: PairPatterns, free: np.ndarray, s: int) -> LpProblem:
    """Dual of the aggregated LP restricted to the ``free`` coordinates.

    Variables ``y_1..y_G in [0, w_g]``, ``mu`` free, ``u >= 0`` (one per free
    coordinate); minimise ``-sum y - s mu + sum u`` subject to one row per
    free coordinate ``k``: ``sum_g q_gk y_g + mu - u_k <= 0``. The row duals
    are ``-v``.
    """
    G = patterns.size
    f = free.size
    Qf = sp.csr_matrix(patterns.patterns[:, free].T.astype(float)).reshape(f, G)
    A = sp.hstack([Qf, sp.csr_matrix(np.ones((f, 1))), -sp.identity(f)]).tocsr()
    c = np.r_[-np.ones(G), -float(s), np.ones(f)]
    lo = np.r_[np.zeros(G), -np.inf, np.zeros(f)]
    hi = np.r_[patterns.weights, np.inf, np.full(f, np.inf)]
    return LpProblem(c, A, ("<=",) * f, np.zeros(f), lo, hi)


def lpsr_solve(
    dataset: Dataset,
    s: int,
    pinned: Iterable[int] = (),
    form: str = "dual",
    lp_method: str = "auto",
    patterns: Optional[PairPatterns] = None,
) -> LpsrSolution:
    """Solve the support-recovery LP and select the ``s`` largest ``v_k``.

    ``form`` picks the LP handed to the solver: ``"dual"`` (fast, default),
    ``"primal"`` (aggregated) or ``"literal"`` (one correction variable per
    pair and coordinate). All three have the same optimal value.
    """
    d = dataset.d
    s = _check_s(s, d)
    pinned = sorted(set(int(k) for k in pinned))
    if any(not 0 <= k < d for k in pinned):
        raise ArgumentError("pinned coordinate out of range")
    allowed = np.ones(d, dtype=bool)
    allowed[pinned] = False
    free = np.flatnonzero(allowed)
    if free.size < s:
        raise ArgumentError(f"only {free.size} selectable coordinates remain, need {s}")
    if patterns is None:
        patterns = violating_patterns(dataset)
    if patterns.size == 0:
        v = np.zeros(d)
        v[free[:s]] = 1.0
        return LpsrSolution(v, 0.0, ActiveSet(tuple(free[:s]), d))
    if form == "dual":
        lp = dual_lpsr_problem(patterns, free, s)
        sol = solve_lp(lp, method=lp_method)
        _require_optimal(sol)
        v = np.zeros(d)
        v[free] = np.clip(-sol.duals, 0.0, 1.0)
        objective = -sol.objective
    elif form in ("primal", "literal"):
        lp = (aggregated_lpsr_problem(patterns, d, s, pinned) if form == "primal"
              else literal_lpsr_problem(dataset, s, pinned))
        sol = solve_lp(lp, method=lp_method)
        _require_optimal(sol)
        v = np.clip(sol.x[:d], 0.0, 1.0)
        objective = sol.objective
    else:
        raise ArgumentError(f"unknown LP form {form!r}")
    # certificate: the recovered v attains the LP optimum
    achieved = hinge_objective(patterns, v)
    if abs(v.sum() - s) > 1e-6 or abs(achieved - objective) > 1e-6 * (1.0 + abs(objective)):
        raise RuntimeError(
            f"support-recovery LP solution failed verification (sum v={v.sum():.9g}, "
            f"hinge {achieved:.9g} vs optimum {objective:.9g})"
        )
    return LpsrSolution(v, objective, ActiveSet(_top_indices(v, s, allowed), d), sol)


def _require_optimal(sol: LpSolution) -> None:
    # feasible (v spread evenly, corrections absorb the rest) and bounded below by 0
    if not sol.optimal:
        raise RuntimeError(f"support-recovery LP returned {sol.status.value}")


def lpsr(dataset: Dataset, s: int, lp_method: str = "auto", form: str = "dual") -> ActiveSet:
    return lpsr_solve(dataset, s, form=form, lp_method=lp_method).active


def slpsr_rounds(
    dataset: Dataset,
    s: int,
    config: Optional[RecoveryConfig] = None,
    form: str = "dual",
) -> list[LpsrSolution]:
    """One ``s = 1`` LP per round; chosen coordinates and their exclusion
    partners are pinned to zero afterwards."""
    config = config or RecoveryConfig()
    d = dataset.d
    s = _check_s(s, d)
    config.validate(d)
    folds = None
    if config.fresh_data:
        if dataset.n < s:
            raise ArgumentError(f"fresh-data mode needs n >= s, got n={dataset.n}, s={s}")
        folds = np.array_split(np.arange(dataset.n), s)
    pinned: set[int] = set()
    rounds = []
    shared = None if folds else violating_patterns(dataset)
    for r in range(s):
        data = dataset.subset(folds[r]) if folds else dataset
        if len(pinned) >= d:
            raise ArgumentError(f"exclusions leave fewer than s={s} selectable coordinates")
        sol = lpsr_solve(data, 1, pinned, form=form, lp_method=config.lp_method, patterns=shared)
        k = sol.active.indices[0]
        pinned.add(k)
        pinned.update(config.partners(k))
        rounds.append(sol)
    return rounds


def slpsr(dataset: Dataset, s: int, exclusions: Optional[RecoveryConfig] = None, form: str = "dual") -> ActiveSet:
    rounds = slpsr_rounds(dataset, s, exclusions, form)
    return ActiveSet(tuple(r.active.indices[0] for r in rounds), dataset.d)


def recover_support(dataset: Dataset, s: int, config: Optional[RecoveryConfig] = None) -> ActiveSet:
    config = config or RecoveryConfig()
    if config.method is RecoveryMethod.LPSR:
        if config.exclusion_pairs:
            raise ArgumentError("LPSR cannot honour exclusion pairs; use S-LPSR or IPIR")
        return lpsr(dataset, s, lp_method=config.lp_method)
    if config.method is RecoveryMethod.SLPSR:
        return slpsr(dataset, s, config)
    return ActiveSet(ipir_search(dataset, s, config).best_subset, dataset.d)


def tsir_fit(
    dataset: Dataset,
    s: int,
    recovery: Optional[RecoveryConfig] = None,
    rule: Rule | str = Rule.MIN,
) -> SparseFit:
    """Two stages: estimate the active set, then fit exactly on it."""
    recovery = recovery or RecoveryConfig()
    active = recover_support(dataset, s, recovery)
    fit = solve_fixed(dataset, active, certify=True)
    return SparseFit(fit, Rule.parse(rule), dataset.features, f"tsir-{recovery.method.value}")
