"""Counting monotone labelings of finite point sets and grid-cell checks.

A binary monotone labeling is the indicator of an upper set, so binary
counts are numbers of order ideals. Larger label alphabets are counted as
chains of ideals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .bench import make_rng
from .core import ArgumentError, SizeGuardError, dominance_matrix

BINARY_MAX_N = 30
MULTI_MAX_N = 20
MULTI_MAX_M = 6
EMPIRICAL_MAX_N = 16


@dataclass(frozen=True, eq=False)
class PointPoset:
    """A finite preorder, usually the coordinate-wise order of points.

    ``dominance[i, j]`` means ``x_i <= x_j``; it is reflexive and
    transitive. ``points`` is ``None`` for abstract posets.
    """

    dominance: np.ndarray
    points: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        D = np.array(self.dominance, dtype=bool)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ArgumentError("dominance must be a square matrix")
        if not np.all(np.diag(D)):
            raise ArgumentError("dominance must be reflexive")
        Di = D.astype(np.int64)
        if np.any(((Di @ Di) > 0) & ~D):
            raise ArgumentError("dominance must be transitive")
        D.setflags(write=False)
        object.__setattr__(self, "dominance", D)

    @classmethod
    def from_points(cls, points: np.ndarray) -> "PointPoset":
        P = np.asarray(points, dtype=float)
        if P.ndim == 1:
            P = P.reshape(-1, 1)
        return cls(dominance_matrix(P), P)

    @classmethod
    def from_relation(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "PointPoset":
        """Transitive closure of ``i <= j`` for the given pairs."""
        D = np.eye(n, dtype=bool)
        for i, j in pairs:
            D[i, j] = True
        while True:
            nxt = D | ((D.astype(np.int64) @ D.astype(np.int64)) > 0)
            if np.array_equal(nxt, D):
                return cls(D)
            D = nxt

    @property
    def n(self) -> int:
        return self.dominance.shape[0]

    def with_relation(self, i: int, j: int) -> "PointPoset":
        """The smallest preorder containing this one and ``i <= j``."""
        pairs = list(zip(*np.nonzero(self.dominance)))
        return PointPoset.from_relation(self.n, pairs + [(i, j)])


@dataclass(frozen=True)
class LabelingCount:
    m: int
    count: int

    def __int__(self) -> int:
        return self.count


def _masks(D: np.ndarray) -> tuple[list[int], list[int]]:
    n = D.shape[0]
    down = [0] * n
    up = [0] * n
    for i in range(n):
        for j in np.flatnonzero(D[:, i]).tolist():
            down[i] |= 1 << j
        for j in np.flatnonzero(D[i]).tolist():
            up[i] |= 1 << j
    return down, up


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def count_binary_labelings(poset: PointPoset) -> LabelingCount:
    """Number of order ideals, by memoised splitting on one element.

    For ``x`` in the remaining set ``P``: either ``x`` gets the high label
    and so does its whole upset, or the low label together with its downset.
    Comparability components are counted independently.
    """
    n = poset.n
    if n > BINARY_MAX_N:
        raise SizeGuardError(f"binary labeling count limited to n <= {BINARY_MAX_N}, got n={n}")
    down, up = _masks(poset.dominance)
    near = [down[i] | up[i] for i in range(n)]
    memo: dict[int, int] = {0: 1}

    def count(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        low = mask & -mask
        comp = 0
        frontier = low
        while frontier:
            comp |= frontier
            nxt = 0
            for i in _bits(frontier):
                nxt |= near[i]
            frontier = nxt & mask & ~comp
        if comp != mask:
            result = count(comp) * count(mask & ~comp)
        else:
            x = max(_bits(mask), key=lambda i: (bin(near[i] & mask).count("1"), -i))
            result = count(mask & ~up[x]) + count(mask & ~down[x])
        memo[mask] = result
        return result

    return LabelingCount(2, count((1 << n) - 1))


def _ideal_indicator(poset: PointPoset) -> np.ndarray:
    n = poset.n
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(masks.shape[0], dtype=bool)
    down, _ = _masks(poset.dominance)
    for i in range(n):
        has = (masks >> i) & 1 == 1
        ok &= ~has | ((masks & down[i]) == down[i])
    return ok


def count_m_labelings(poset: PointPoset, m: int) -> LabelingCount:
    """Order-preserving maps into ``{1..m}`` via nested ideals.

    ``f_t(J) = sum over ideals I inside J of f_{t-1}(I)``, evaluated for all
    ideals at once with a subset-sum transform over the Boolean cube.
    """
    n = poset.n
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ArgumentError(f"label count m must be a positive integer, got {m!r}")
    if n > MULTI_MAX_N or m > MULTI_MAX_M:
        raise SizeGuardError(f"m-labeling count limited to n <= {MULTI_MAX_N}, m <= {MULTI_MAX_M}")
    if m == 1 or n == 0:
        return LabelingCount(int(m), 1)
    # every intermediate value counts labelings of a subset, so m^n bounds it
    assert m**n < 2**63
    ideal = _ideal_indicator(poset)
    f = ideal.astype(np.int64)
    for _ in range(m - 1):
        g = np.where(ideal, f, 0)
        for i in range(n):
            g = g.reshape(-1, 2, 1 << i)
            g[:, 1, :] += g[:, 0, :]
            g = g.reshape(-1)
        f = np.where(ideal, g, 0)
    return LabelingCount(int(m), int(f[-1]))


def expected_count_lower(n: int, d: int) -> float:
    return math.exp(math.log(2.0) * (1.0 - math.exp(-1.0)) / math.factorial(d - 1) * n ** ((d - 1) / d))


def expected_count_upper(n: int, d: int) -> float:
    return math.exp((2.0**d + 2.0 * math.log(2.0) - 1.0) * n ** ((d - 1) / d))


class LabelingBounds(NamedTuple):
    mean_count: float
    lower: float
    upper: float
    within: bool


def empirical_labeling_bounds(n: int, d: int, trials: int, seed: int | Sequence[int]) -> LabelingBounds:
    """Average exact binary count over uniform point sets vs. the sandwich."""
    if n < 1 or d < 1 or trials < 1:
        raise ArgumentError("n, d and trials must be positive")
    if n > EMPIRICAL_MAX_N:
        raise SizeGuardError(f"empirical bounds limited to n <= {EMPIRICAL_MAX_N}, got n={n}")
    keys = tuple(seed) if isinstance(seed, (tuple, list)) else (int(seed),)
    rng = make_rng(*keys, n, d)
    total = 0
    for _ in range(trials):
        total += count_binary_labelings(PointPoset.from_points(rng.random((n, d)))).count
    mean = total / trials
    lo, hi = expected_count_lower(n, d), expected_count_upper(n, d)
    return LabelingBounds(mean, lo, hi, lo <= mean <= hi)


def border_cell_bound(m: int, d: int) -> int:
    if m < 1 or d < 2:
        raise ArgumentError("border cell bound needs m >= 1 and d >= 2")
    return m**d - (m - 1) ** d


def partition_cells(heights: np.ndarray, m: int) -> np.ndarray:
    """Boolean ``m^d`` grid of cells ``(x_1..x_{d-1}, x)`` with ``x <= A[x_1..]``."""
    A = np.asarray(heights, dtype=int)
    levels = np.arange(1, m + 1)
    return levels <= A[..., None]


def border_cell_count(heights: np.ndarray, m: int) -> int:
    """Partition cells sharing a face or corner with an in-grid non-partition cell."""
    cells = partition_cells(heights, m)
    outside = np.pad(~cells, 1, constant_values=False)
    d = cells.ndim
    near = np.zeros_like(cells)
    for shift in np.ndindex(*([3] * d)):
        sl = tuple(slice(s, s + m) for s in shift)
        near |= outside[sl]
    return int(np.sum(cells & near))


def integer_partitions(m: int, dim: int) -> Iterable[np.ndarray]:
    """All order-reversing maps ``[m]^dim -> {0..m}`` (``dim`` in {1, 2})."""
    if dim == 1:
        def rec(prefix: list[int], cap: int):
            if len(prefix) == m:
                yield np.array(prefix)
                return
            for v in range(cap, -1, -1):
                yield from rec(prefix + [v], v)
        yield from rec([], m)
        return
    if dim == 2:
        rows = [r for r in integer_partitions(m, 1)]
        def rec2(prefix: list[np.ndarray]):
            if len(prefix) == m:
                yield np.array(prefix)
                return
            for r in rows:
                if not prefix or np.all(r <= prefix[-1]):
                    yield from rec2(prefix + [r])
        yield from rec2([])
        return
    raise ArgumentError("partition enumeration supports dim 1 or 2")


def incomparable_cells_lower(N: int, d: int) -> int:
    if N < 1 or d < 1:
        raise ArgumentError("incomparable cell count needs N >= 1 and d >= 1")
    return math.comb(N + d - 2, d - 1)


def diagonal_cells(N: int, d: int) -> np.ndarray:
    """Cells of the ``N^d`` grid (1-based) whose coordinates sum to ``N + d - 1``."""
    grid = np.array(list(np.ndindex(*([N] * d)))) + 1
    return grid[grid.sum(axis=1) == N + d - 1]


def cells_incomparable(a: Sequence[int], b: Sequence[int]) -> bool:
    """Every point of cell ``a`` is incomparable to every point of cell ``b``
    (up to boundaries): some coordinate is larger and some is smaller."""
    a, b = np.asarray(a), np.asarray(b)
    return bool(np.any(a > b) and np.any(a < b))
