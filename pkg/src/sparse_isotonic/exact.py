"""Exact monotone fits for a fixed active coordinate set.

Binary labels (noisy input model) are fitted by a minimum s-t cut on the
dominance DAG. Real labels (noisy output model) get the exact L2 isotonic
regression through recursive min-cut partitioning, clipped to [0, 1], with
a global optimality certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import (
    ActiveSet,
    ComparabilityRelation,
    ContractError,
    Dataset,
    NoiseModel,
    SizeGuardError,
    _coerce_active,
    build_comparability,
    transitive_reduction,
)
from .flow import FlowNetwork, max_flow

BRUTE_FORCE_MAX_N = 20


@dataclass(frozen=True, eq=False)
class FitResult:
    fitted: np.ndarray
    objective: float
    active: ActiveSet
    noise_model: NoiseModel
    certificate: Optional[float] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        F = np.array(self.fitted, dtype=float)
        F.setflags(write=False)
        object.__setattr__(self, "fitted", F)


def _relation(dataset: Dataset, active, relation: Optional[ComparabilityRelation]) -> ComparabilityRelation:
    active = _coerce_active(active, dataset.d)
    if relation is not None:
        if relation.active != active or relation.n != dataset.n:
            raise ContractError("comparability relation does not match dataset/active set")
        return relation
    return build_comparability(dataset, active)


def _max_upper_set_excess(weights: np.ndarray, dominance: np.ndarray) -> tuple[float, np.ndarray]:
    """Max of ``sum(weights[U])`` over upper sets ``U`` and the smallest maximiser.

    Classic closure reduction: s -> i with capacity w_i > 0, i -> t with -w_i
    for w_i < 0, and an infinite arc i -> j whenever i precedes j.
    """
    m = weights.shape[0]
    positive = float(weights[weights > 0].sum())
    if positive <= 0.0:
        return 0.0, np.zeros(m, dtype=bool)
    net = FlowNetwork(m + 2, m, m + 1)
    for i, w in enumerate(weights.tolist()):
        if w > 0:
            net.add_arc(m, i, w)
        elif w < 0:
            net.add_arc(i, m + 1, -w)
    tail, head = transitive_reduction(dominance)
    for a, b in zip(tail.tolist(), head.tolist()):
        net.add_arc(a, b, math.inf)
    res = max_flow(net)
    upper = np.zeros(m, dtype=bool)
    for v in res.source_side:
        if v < m:
            upper[v] = True
    return positive - res.value, upper


def solve_binary_labeling(
    dataset: Dataset,
    active: ActiveSet | Iterable[int],
    relation: Optional[ComparabilityRelation] = None,
) -> FitResult:
    """Minimum-misclassification monotone 0/1 labeling under ``<=_active``.

    Among optimal labelings the one with the fewest 1s is returned: the
    1-labeled set is the source side of the minimal minimum cut.
    """
    if dataset.noise_model is not NoiseModel.NOISY_INPUT:
        raise ContractError("binary labeling requires the noisy input model")
    rel = _relation(dataset, active, relation)
    n = dataset.n
    y = dataset.labels
    net = FlowNetwork(n + 2, n, n + 1)
    for i in range(n):
        if y[i] == 1.0:
            net.add_arc(n, i, 1.0)
        else:
            net.add_arc(i, n + 1, 1.0)
    tail, head = rel.cover_arcs()
    for a, b in zip(tail.tolist(), head.tolist()):
        net.add_arc(a, b, math.inf)
    res = max_flow(net)
    F = np.zeros(n)
    for v in res.source_side:
        if v < n:
            F[v] = 1.0
    errors = int(np.sum(F != y))
    if abs(errors - res.value) > 1e-9:
        raise RuntimeError(f"cut value {res.value} disagrees with {errors} misclassifications")
    return FitResult(F, float(errors), rel.active, NoiseModel.NOISY_INPUT)


def isotonic_blocks(y: np.ndarray, dominance: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Level sets of the (unbounded) L2 isotonic regression of ``y``.

    Recursive partitioning: a block is split along the upper set with the
    largest positive excess over the block mean; blocks without such a set
    are final and take their mean.
    """
    n = y.shape[0]
    final: list[np.ndarray] = []
    stack = [np.arange(n)]
    while stack:
        block = stack.pop()
        if block.size == 1:
            final.append(block)
            continue
        yb = y[block]
        sub = dominance[np.ix_(block, block)]
        if not np.any(sub & (yb[:, None] > yb[None, :])):
            final.extend(block[[i]] for i in range(block.size))
            continue
        w = yb - yb.mean()
        excess, upper = _max_upper_set_excess(w, sub)
        if excess <= tol * (1.0 + float(np.abs(w).sum())) or upper.all() or not upper.any():
            final.append(block)
            continue
        stack.append(block[~upper])
        stack.append(block[upper])
    return final


def isotonic_certificate(y: np.ndarray, fitted: np.ndarray, dominance: np.ndarray) -> float:
    """Largest optimality-condition violation of an unbounded L2 isotonic fit.

    ``fitted`` is the projection of ``y`` onto the monotone cone iff it is
    feasible, the residual sums to zero, is orthogonal to ``fitted``, and has
    non-positive sum over every upper set.
    """
    r = y - fitted
    infeasible = float(np.max(np.where(dominance, fitted[:, None] - fitted[None, :], 0.0), initial=0.0))
    excess, _ = _max_upper_set_excess(r, dominance)
    return max(infeasible, abs(float(r.sum())), abs(float(r @ fitted)), excess)


def solve_l2_isotonic(
    dataset: Dataset,
    active: ActiveSet | Iterable[int],
    relation: Optional[ComparabilityRelation] = None,
    certify: bool = True,
) -> FitResult:
    """Unique minimiser of sum (Y - F)^2 over monotone F with values in [0, 1].

    The box-constrained solution equals the unbounded isotonic regression
    clipped to [0, 1]; labels inside [0, 1] never need the clip.
    """
    if dataset.noise_model is not NoiseModel.NOISY_OUTPUT:
        raise ContractError("L2 isotonic regression requires the noisy output model")
    rel = _relation(dataset, active, relation)
    y = dataset.labels
    raw = np.empty_like(y)
    for block in isotonic_blocks(y, rel.dominance):
        raw[block] = y[block].mean()
    certificate = None
    if certify:
        certificate = isotonic_certificate(y, raw, rel.dominance)
        scale = 1.0 + float(np.abs(y).sum())
        if certificate > 1e-8 * scale:
            raise RuntimeError(f"isotonic fit failed its optimality check (violation {certificate:.3e})")
    F = np.clip(raw, 0.0, 1.0)
    objective = float(np.sum((y - F) ** 2))
    return FitResult(F, objective, rel.active, NoiseModel.NOISY_OUTPUT, certificate)


def solve_fixed(
    dataset: Dataset,
    active: ActiveSet | Iterable[int],
    relation: Optional[ComparabilityRelation] = None,
    certify: bool = True,
) -> FitResult:
    """Dispatch to the exact solver matching the dataset's noise model."""
    if dataset.noise_model is NoiseModel.NOISY_INPUT:
        return solve_binary_labeling(dataset, active, relation)
    return solve_l2_isotonic(dataset, active, relation, certify=certify)


def brute_force_binary(dataset: Dataset, active: ActiveSet | Iterable[int]) -> FitResult:
    """Exhaustive search over all monotone 0/1 labelings (n <= 20).

    Ties are broken toward fewer 1s, then the smallest bitmask.
    """
    if dataset.noise_model is not NoiseModel.NOISY_INPUT:
        raise ContractError("binary brute force requires the noisy input model")
    n = dataset.n
    if n > BRUTE_FORCE_MAX_N:
        raise SizeGuardError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got n={n}")
    rel = _relation(dataset, active, None)
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    ok = np.ones(masks.shape[0], dtype=bool)
    for i, j in zip(*np.nonzero(rel.dominance)):
        if i != j:
            ok &= ~(bits[:, i] & ~bits[:, j])
    y = dataset.labels.astype(bool)
    errors = np.sum(bits != y[None, :], axis=1)
    ones = bits.sum(axis=1)
    cand = np.flatnonzero(ok)
    order = np.lexsort((cand, ones[cand], errors[cand]))
    best = cand[order[0]]
    F = bits[best].astype(float)
    return FitResult(F, float(errors[best]), rel.active, NoiseModel.NOISY_INPUT)
