"""Data model, the coordinate-subset preorder and pairwise comparability.

Indices are 0-based everywhere in the library. Files and the CLI use
1-based coordinate and sample numbers; conversion happens at the I/O edge.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


class ArgumentError(ValueError):
    """An argument is outside the documented domain of an operation."""


class ContractError(ValueError):
    """An operation was called on data it is not defined for."""


class SizeGuardError(RuntimeError):
    """A request would exceed an enumeration or resource guard."""


class DataFormatError(ValueError):
    """Malformed input file. ``line`` is 1-based (header is line 1)."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NoiseModel(str, enum.Enum):
    NOISY_OUTPUT = "output"  # Y = f(X) + W
    NOISY_INPUT = "input"  # Y = f(X + W), binary labels

    @classmethod
    def parse(cls, value: "str | NoiseModel") -> "NoiseModel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "output": cls.NOISY_OUTPUT,
            "noisyoutput": cls.NOISY_OUTPUT,
            "noisy_output": cls.NOISY_OUTPUT,
            "input": cls.NOISY_INPUT,
            "noisyinput": cls.NOISY_INPUT,
            "noisy_input": cls.NOISY_INPUT,
        }
        if key not in aliases:
            raise ArgumentError(f"unknown noise model {value!r} (expected 'output' or 'input')")
        return aliases[key]


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` samples of features in R^d with real or binary labels.

    ``strict_range`` enforces Y in [0, 1] for the noisy output model. The
    synthetic anchor generator turns it off because its labels are
    ``f(X) + W`` with unbounded Gaussian ``W``.
    """

    features: np.ndarray
    labels: np.ndarray
    noise_model: NoiseModel = NoiseModel.NOISY_OUTPUT
    sparsity_hint: Optional[int] = None
    strict_range: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        X = np.array(self.features, dtype=float, copy=True)
        y = np.array(self.labels, dtype=float, copy=True).reshape(-1)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ArgumentError(f"features must be an n x d matrix with n, d >= 1, got shape {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise ArgumentError(f"{y.shape[0]} labels for {X.shape[0]} samples")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise ArgumentError("features and labels must be finite")
        model = NoiseModel.parse(self.noise_model)
        if model is NoiseModel.NOISY_INPUT:
            if not np.all((y == 0.0) | (y == 1.0)):
                raise ArgumentError("noisy input model requires labels in {0, 1}")
        elif self.strict_range and (y.min() < 0.0 or y.max() > 1.0):
            raise ArgumentError("noisy output model requires labels in [0, 1]")
        if self.sparsity_hint is not None and not 1 <= self.sparsity_hint <= X.shape[1]:
            raise ArgumentError(f"sparsity hint must lie in 1..{X.shape[1]}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "noise_model", model)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, rows: Sequence[int] | np.ndarray) -> "Dataset":
        rows = np.asarray(rows, dtype=int)
        return Dataset(
            self.features[rows],
            self.labels[rows],
            self.noise_model,
            self.sparsity_hint,
            strict_range=self.strict_range,
        )


@dataclass(frozen=True)
class ActiveSet:
    """Sorted distinct coordinate indices (0-based) out of ``d``."""

    indices: tuple[int, ...]
    d: int

    def __post_init__(self) -> None:
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(idx) == 0:
            raise ArgumentError("active set must contain at least one coordinate")
        if len(set(idx)) != len(idx):
            raise ArgumentError(f"duplicate coordinates in active set {idx}")
        if idx[0] < 0 or idx[-1] >= self.d:
            raise ArgumentError(f"active coordinates {idx} out of range for d={self.d}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_one_based(cls, indices: Iterable[int], d: int) -> "ActiveSet":
        return cls(tuple(int(i) - 1 for i in indices), d)

    @property
    def s(self) -> int:
        return len(self.indices)

    def one_based(self) -> list[int]:
        return [i + 1 for i in self.indices]

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, k: object) -> bool:
        return k in self.indices


def _check_index(value: int, upper: int, what: str) -> int:
    if not isinstance(value, (int, np.integer)) or not 0 <= value < upper:
        raise ArgumentError(f"{what} index {value!r} out of range 0..{upper - 1}")
    return int(value)


def q_indicator(dataset: Dataset, i: int, j: int, k: int) -> int:
    """1 if sample ``i`` strictly exceeds sample ``j`` in coordinate ``k``."""
    i = _check_index(i, dataset.n, "sample")
    j = _check_index(j, dataset.n, "sample")
    k = _check_index(k, dataset.d, "coordinate")
    return int(dataset.features[i, k] > dataset.features[j, k])


def _coerce_active(active: ActiveSet | Iterable[int], d: int) -> ActiveSet:
    if isinstance(active, ActiveSet):
        if active.d != d:
            raise ArgumentError(f"active set built for d={active.d}, dataset has d={d}")
        return active
    return ActiveSet(tuple(active), d)


def dominates(dataset: Dataset, i: int, j: int, active: ActiveSet | Iterable[int]) -> bool:
    """``X_i <=_A X_j``: no active coordinate of ``i`` exceeds that of ``j``."""
    active = _coerce_active(active, dataset.d)
    i = _check_index(i, dataset.n, "sample")
    j = _check_index(j, dataset.n, "sample")
    cols = list(active.indices)
    return bool(np.all(dataset.features[i, cols] <= dataset.features[j, cols]))


def dominance_matrix(points: np.ndarray) -> np.ndarray:
    """Dense ``D[i, j] = all(points[i] <= points[j])`` for an n x s array."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    D = np.ones((n, n), dtype=bool)
    for col in points.T:
        D &= col[:, None] <= col[None, :]
    return D


def transitive_reduction(D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Arcs generating the preorder ``D`` under transitive closure.

    Returns the cover relations of the strict part plus both directions of
    every tie (pairs dominating each other), as index arrays ``(tail, head)``.
    """
    n = D.shape[0]
    strict = D & ~D.T
    ties = D & D.T
    np.fill_diagonal(ties, False)
    if n == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    S = strict.astype(np.float32)
    two_step = (S @ S) > 0.5
    cover = strict & ~two_step
    tail, head = np.nonzero(cover | ties)
    return tail, head


@dataclass(frozen=True, eq=False)
class ComparabilityRelation:
    """Materialised ``<=_A`` over all sample pairs plus access to ``q``."""

    features: np.ndarray
    active: ActiveSet
    dominance: np.ndarray

    @property
    def n(self) -> int:
        return self.dominance.shape[0]

    def dominates(self, i: int, j: int) -> bool:
        return bool(self.dominance[i, j])

    def strict_coord(self, i: int, j: int, k: int) -> int:
        return int(self.features[i, k] > self.features[j, k])

    def violations(self, labels: np.ndarray, tol: float = 0.0) -> int:
        """Number of ordered pairs with ``i <=_A j`` but ``labels[i] > labels[j] + tol``."""
        labels = np.asarray(labels, dtype=float)
        bad = self.dominance & (labels[:, None] > labels[None, :] + tol)
        return int(bad.sum())

    def cover_arcs(self) -> tuple[np.ndarray, np.ndarray]:
        return transitive_reduction(self.dominance)


def build_comparability(dataset: Dataset, active: ActiveSet | Iterable[int]) -> ComparabilityRelation:
    active = _coerce_active(active, dataset.d)
    D = dominance_matrix(dataset.features[:, list(active.indices)])
    D.setflags(write=False)
    return ComparabilityRelation(dataset.features, active, D)


def read_dataset_csv(
    path: str | Path,
    noise_model: NoiseModel | str,
    strict_range: bool = True,
) -> Dataset:
    """Load ``x1,...,xd,y`` CSV. Errors carry the offending 1-based line."""
    model = NoiseModel.parse(noise_model)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataFormatError("empty file", 1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise DataFormatError("header needs at least one feature column and y", 1)
    d = len(header) - 1
    expected = [f"x{k}" for k in range(1, d + 1)] + ["y"]
    if [h.lower() for h in header] != expected:
        raise DataFormatError(f"header must be {','.join(expected)}", 1)
    X, y = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d + 1:
            raise DataFormatError(f"expected {d + 1} fields, found {len(row)}", lineno)
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise DataFormatError(f"non-numeric field ({exc})", lineno) from None
        if not all(np.isfinite(vals)):
            raise DataFormatError("non-finite value", lineno)
        label = vals[-1]
        if model is NoiseModel.NOISY_INPUT and label not in (0.0, 1.0):
            raise DataFormatError(f"label {row[-1].strip()} not in {{0,1}} for noisy input model", lineno)
        if model is NoiseModel.NOISY_OUTPUT and strict_range and not 0.0 <= label <= 1.0:
            raise DataFormatError(f"label {row[-1].strip()} outside [0,1] for noisy output model", lineno)
        X.append(vals[:-1])
        y.append(label)
    if not X:
        raise DataFormatError("no data rows", 2)
    return Dataset(np.array(X), np.array(y), model, strict_range=strict_range)


def read_points_csv(path: str | Path, d: Optional[int] = None) -> np.ndarray:
    """Feature-only CSV (header ``x1,...,xd``) used for prediction inputs."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataFormatError("empty file", 1)
    header = [h.strip().lower() for h in rows[0]]
    width = len(header)
    if header != [f"x{k}" for k in range(1, width + 1)]:
        raise DataFormatError(f"header must be x1,...,x{width}", 1)
    if d is not None and width != d:
        raise DataFormatError(f"points have {width} coordinates, expected {d}", 1)
    pts = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise DataFormatError(f"expected {width} fields, found {len(row)}", lineno)
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise DataFormatError(f"non-numeric field ({exc})", lineno) from None
        if not all(np.isfinite(vals)):
            raise DataFormatError("non-finite value", lineno)
        pts.append(vals)
    return np.array(pts, dtype=float).reshape(-1, width)


def write_dataset_csv(dataset: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{k}" for k in range(1, dataset.d + 1)] + ["y"])
        for row, label in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in row] + [repr(float(label))])
