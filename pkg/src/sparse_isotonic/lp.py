"""Linear programming: a dense two-phase tableau simplex and a HiGHS path.

``solve_lp`` minimises ``c @ x`` subject to rows ``a @ x (<=|>=|=) b`` and
bounds ``lo <= x <= hi``. The built-in simplex uses Bland's rule, so the
pivot sequence is a deterministic function of the problem. Large LPs
(support recovery at benchmark scale) go to SciPy's HiGHS dual simplex.
Both paths report row duals as the derivative of the optimum with respect
to each right-hand side.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .core import ArgumentError, ActiveSet, ContractError, Dataset, NoiseModel, _coerce_active

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
SENSES = ("<=", ">=", "=")
# tableau entries above which "auto" hands the problem to HiGHS
AUTO_DENSE_LIMIT = 400_000


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """``min c @ x`` s.t. ``A[r] @ x  senses[r]  b[r]`` and ``lo <= x <= hi``.

    ``A`` may be a dense array or a SciPy sparse matrix. Missing bounds
    default to ``[0, inf)``.
    """

    c: np.ndarray
    A: np.ndarray | sp.spmatrix
    senses: tuple[str, ...]
    b: np.ndarray
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float).reshape(-1)
        m = c.shape[0]
        if m == 0:
            raise ArgumentError("LP needs at least one variable")
        if sp.issparse(self.A):
            A = sp.csr_matrix(self.A, dtype=float)
        else:
            A = np.asarray(self.A, dtype=float)
            if A.size == 0:
                A = A.reshape(0, m)
        if A.ndim != 2 or A.shape[1] != m:
            raise ArgumentError(f"constraint matrix has shape {A.shape}, expected (k, {m})")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        senses = tuple(str(s) for s in self.senses)
        if b.shape[0] != A.shape[0] or len(senses) != A.shape[0]:
            raise ArgumentError("rows, senses and rhs must have equal length")
        bad = [s for s in senses if s not in SENSES]
        if bad:
            raise ArgumentError(f"unknown constraint sense {bad[0]!r}")
        lo = np.zeros(m) if self.lo is None else np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.full(m, np.inf) if self.hi is None else np.asarray(self.hi, dtype=float).reshape(-1)
        if lo.shape[0] != m or hi.shape[0] != m:
            raise ArgumentError("bounds must have one entry per variable")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ArgumentError("every variable needs lo <= hi")
        if np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ArgumentError("bounds lo=+inf or hi=-inf are empty")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(b)):
            raise ArgumentError("cost and rhs must be finite")
        dense_check = A.data if sp.issparse(A) else A
        if not np.all(np.isfinite(dense_check)):
            raise ArgumentError("constraint coefficients must be finite")
        for name, val in (("c", c), ("A", A), ("senses", senses), ("b", b), ("lo", lo), ("hi", hi)):
            object.__setattr__(self, name, val)

    @classmethod
    def from_rows(
        cls,
        c: Sequence[float],
        rows: Iterable[tuple[Sequence[float], str, float]],
        bounds: Optional[Sequence[tuple[float, float]]] = None,
    ) -> "LpProblem":
        rows = list(rows)
        m = len(c)
        A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), m)
        lo = hi = None
        if bounds is not None:
            lo = np.array([-np.inf if l is None else l for l, _ in bounds], dtype=float)
            hi = np.array([np.inf if h is None else h for _, h in bounds], dtype=float)
        return cls(np.asarray(c, float), A, tuple(r[1] for r in rows), np.array([r[2] for r in rows]), lo, hi)

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def dense_matrix(self) -> np.ndarray:
        return self.A.toarray() if sp.issparse(self.A) else self.A

    def residual(self, x: np.ndarray) -> float:
        """Largest violation of any row or bound at ``x``."""
        x = np.asarray(x, dtype=float)
        worst = float(np.max(np.maximum(self.lo - x, x - self.hi), initial=0.0))
        if self.n_rows:
            ax = self.A @ x
            s = np.array(self.senses)
            gap = np.where(s == "<=", ax - self.b, np.where(s == ">=", self.b - ax, np.abs(ax - self.b)))
            worst = max(worst, float(np.max(gap, initial=0.0)))
        return worst

    def to_text(self) -> str:
        """One line per constraint: ``r<k>: <coef> x<j> + ... <sense> <rhs>``."""

        def term_list(idx, vals) -> str:
            terms = [f"{v:.17g} x{j + 1}" for j, v in zip(idx, vals) if v != 0.0]
            return " + ".join(terms) if terms else "0"

        nz = np.flatnonzero(self.c)
        lines = [f"minimize: {term_list(nz, self.c[nz])}"]
        A = sp.csr_matrix(self.A)
        for r in range(self.n_rows):
            row = A.getrow(r)
            lines.append(f"r{r + 1}: {term_list(row.indices, row.data)} {self.senses[r]} {self.b[r]:.17g}")
        for j in range(self.n_vars):
            lines.append(f"bound x{j + 1}: {self.lo[j]:.17g} {self.hi[j]:.17g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    x: Optional[np.ndarray]
    objective: float
    duals: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None
    residual: float = 0.0
    iterations: int = 0
    method: str = "simplex"
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def solve_lp(problem: LpProblem, method: str = "auto", max_iter: int = 200_000) -> LpSolution:
    """Solve ``problem``; ``method`` is ``"simplex"``, ``"highs"`` or ``"auto"``."""
    if method not in ("auto", "simplex", "highs"):
        raise ArgumentError(f"unknown LP method {method!r}")
    if method == "auto":
        method = "simplex" if _dense_size(problem) <= AUTO_DENSE_LIMIT else "highs"
    if method == "highs":
        return _solve_highs(problem)
    return _Simplex(problem, max_iter).run()


def _dense_size(problem: LpProblem) -> int:
    lo_fin = np.isfinite(problem.lo)
    hi_fin = np.isfinite(problem.hi)
    cols = problem.n_vars + int(np.sum(~lo_fin & ~hi_fin))
    rows = problem.n_rows + int(np.sum(lo_fin & hi_fin))
    return rows * (cols + 2 * rows + 1)


class _Simplex:
    """Two-phase dense tableau simplex with Bland's smallest-index rule."""

    def __init__(self, problem: LpProblem, max_iter: int):
        self.p = problem
        self.max_iter = max_iter
        self.iterations = 0

    def _standard_form(self) -> None:
        p = self.p
        m = p.n_vars
        # x = offset + M @ z with z >= 0
        cols: list[tuple[int, float]] = []
        offset = np.zeros(m)
        bound_rows: list[tuple[int, float]] = []
        for j in range(m):
            lo, hi = p.lo[j], p.hi[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        N = len(cols)
        M = np.zeros((m, N))
        for z, (j, sgn) in enumerate(cols):
            M[j, z] = sgn
        A = p.dense_matrix()
        k0 = A.shape[0]
        rows = np.zeros((k0 + len(bound_rows), N))
        rows[:k0] = A @ M
        rhs = np.empty(k0 + len(bound_rows))
        rhs[:k0] = p.b - A @ offset
        senses = list(p.senses) + ["<="] * len(bound_rows)
        for r, (z, ub) in enumerate(bound_rows):
            rows[k0 + r, z] = 1.0
            rhs[k0 + r] = ub
        n_rows = rows.shape[0]
        n_slack = sum(s != "=" for s in senses)
        S = np.zeros((n_rows, n_slack))
        slack_of_row = np.full(n_rows, -1)
        t = 0
        for r, s in enumerate(senses):
            if s != "=":
                S[r, t] = 1.0 if s == "<=" else -1.0
                slack_of_row[r] = t
                t += 1
        sign = np.where(rhs < 0, -1.0, 1.0)
        rows *= sign[:, None]
        S *= sign[:, None]
        rhs *= sign
        self.M, self.offset, self.sign, self.k0 = M, offset, sign, k0
        self.N, self.n_slack, self.n_rows = N, n_slack, n_rows
        self.c_std = np.concatenate([M.T @ p.c, np.zeros(n_slack)])
        self.const = float(p.c @ offset)
        # crash basis: slack with +1 coefficient if available, else an artificial
        basis = np.empty(n_rows, dtype=int)
        art_rows = []
        for r in range(n_rows):
            t = slack_of_row[r]
            if t >= 0 and S[r, t] > 0:
                basis[r] = N + t
            else:
                art_rows.append(r)
        n_art = len(art_rows)
        Art = np.zeros((n_rows, n_art))
        for a, r in enumerate(art_rows):
            Art[r, a] = 1.0
            basis[r] = N + n_slack + a
        self.n_art = n_art
        self.n_cols = N + n_slack + n_art
        self.T = np.hstack([rows, S, Art, rhs[:, None]])
        self.basis = basis
        self.init_basis = basis.copy()

    def _reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        return cost - cost[self.basis] @ self.T[:, : self.n_cols]

    def _pivot(self, r: int, j: int, red: np.ndarray) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        nz = np.flatnonzero(col)
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
        red -= red[j] * T[r, : self.n_cols]
        red[j] = 0.0
        self.basis[r] = j
        self.iterations += 1

    def _iterate(self, cost: np.ndarray, allowed: np.ndarray) -> tuple[str, int]:
        red = self._reduced_costs(cost)
        T = self.T
        while True:
            if self.iterations >= self.max_iter:
                raise RuntimeError(f"simplex exceeded {self.max_iter} pivots")
            cand = np.flatnonzero((red < -PIVOT_TOL) & allowed)
            if cand.size == 0:
                return "optimal", -1
            j = int(cand[0])
            col = T[:, j]
            pos = np.flatnonzero(col > PIVOT_TOL)
            if pos.size == 0:
                return "unbounded", j
            ratios = T[pos, -1] / col[pos]
            best = ratios.min()
            tied = pos[ratios <= best + 1e-12 * (1.0 + abs(best))]
            r = int(tied[np.argmin(self.basis[tied])])
            self._pivot(r, j, red)

    def run(self) -> LpSolution:
        self._standard_form()
        N, n_slack, n_art = self.N, self.n_slack, self.n_art
        T = self.T
        art_start = N + n_slack
        scale = 1.0 + float(np.abs(T[:, -1]).max(initial=0.0))
        if n_art:
            cost1 = np.zeros(self.n_cols)
            cost1[art_start:] = 1.0
            self._iterate(cost1, np.ones(self.n_cols, dtype=bool))
            infeas = float(cost1[self.basis] @ T[:, -1])
            if infeas > FEAS_TOL * scale:
                return LpSolution(LpStatus.INFEASIBLE, None, math.nan, iterations=self.iterations,
                                  extra={"phase1_infeasibility": infeas})
            # drive zero-valued artificials out; rows with no other support are redundant
            for r in range(self.n_rows):
                if self.basis[r] >= art_start:
                    row = T[r, :art_start]
                    nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                    if nz.size:
                        red = np.zeros(self.n_cols)
                        self._pivot(r, int(nz[0]), red)
        cost2 = np.zeros(self.n_cols)
        cost2[:N] = self.c_std[:N]
        allowed = np.ones(self.n_cols, dtype=bool)
        allowed[art_start:] = False
        state, j = self._iterate(cost2, allowed)
        if state == "unbounded":
            dz = np.zeros(self.n_cols)
            dz[j] = 1.0
            dz[self.basis] = -T[:, j]
            ray = self.M @ dz[:N]
            return LpSolution(LpStatus.UNBOUNDED, None, -math.inf, ray=ray, iterations=self.iterations)
        z = np.zeros(self.n_cols)
        z[self.basis] = T[:, -1]
        x = self.offset + self.M @ z[:N]
        binv = T[:, self.init_basis]
        y_std = cost2[self.basis] @ binv
        duals = (self.sign * y_std)[: self.k0]
        obj = float(self.p.c @ x)
        return LpSolution(LpStatus.OPTIMAL, x, obj, duals=duals, residual=self.p.residual(x),
                          iterations=self.iterations, method="simplex")


def _solve_highs(problem: LpProblem) -> LpSolution:
    A = sp.csr_matrix(problem.A)
    senses = np.array(problem.senses)
    ub_rows = np.flatnonzero(senses != "=")
    eq_rows = np.flatnonzero(senses == "=")
    flip = np.where(senses[ub_rows] == ">=", -1.0, 1.0)
    kw = {}
    if ub_rows.size:
        kw["A_ub"] = sp.diags(flip) @ A[ub_rows]
        kw["b_ub"] = flip * problem.b[ub_rows]
    if eq_rows.size:
        kw["A_eq"] = A[eq_rows]
        kw["b_eq"] = problem.b[eq_rows]
    bounds = np.column_stack([problem.lo, problem.hi])
    res = linprog(problem.c, bounds=bounds, method="highs-ds", **kw)
    if res.status == 2:
        # HiGHS may flag "infeasible or unbounded"; a zero-cost solve settles it
        probe = linprog(np.zeros_like(problem.c), bounds=bounds, method="highs-ds", **kw)
        if probe.status == 0:
            return LpSolution(LpStatus.UNBOUNDED, None, -math.inf, method="highs")
        return LpSolution(LpStatus.INFEASIBLE, None, math.nan, method="highs")
    if res.status == 3:
        return LpSolution(LpStatus.UNBOUNDED, None, -math.inf, method="highs")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    duals = np.zeros(problem.n_rows)
    if ub_rows.size:
        duals[ub_rows] = flip * res.ineqlin.marginals
    if eq_rows.size:
        duals[eq_rows] = res.eqlin.marginals
    x = np.asarray(res.x, dtype=float)
    return LpSolution(LpStatus.OPTIMAL, x, float(problem.c @ x), duals=duals,
                      residual=problem.residual(x), iterations=int(res.nit), method="highs")


def labeling_relaxation(dataset: Dataset, active: ActiveSet | Iterable[int]) -> LpProblem:
    """LP relaxation of the fixed-support binary fit, with ``F`` in ``[0, 1]``.

    Objective ``sum_{Y=1} (1 - F_i) + sum_{Y=0} F_i`` (constant dropped), one
    row ``F_i - F_j <= sum_{k in A} q(i, j, k)`` per ordered pair ``i != j``.
    """
    active = _coerce_active(active, dataset.d)
    n = dataset.n
    y = dataset.labels
    Xa = dataset.features[:, list(active.indices)]
    I, J = np.nonzero(~np.eye(n, dtype=bool))
    qsum = np.sum(Xa[I] > Xa[J], axis=1).astype(float)
    A = sp.coo_matrix(
        (np.r_[np.ones(I.size), -np.ones(I.size)], (np.r_[np.arange(I.size), np.arange(I.size)], np.r_[I, J])),
        shape=(I.size, n),
    ).tocsr()
    c = np.where(y == 1.0, -1.0, 1.0)
    return LpProblem(c, A, ("<=",) * I.size, qsum, np.zeros(n), np.ones(n))


def check_integrality(
    dataset: Dataset,
    active: ActiveSet | Iterable[int],
    method: str = "simplex",
    tol: float = 1e-7,
) -> tuple[float, float, bool]:
    """Compare the relaxed LP optimum with the integer optimum from min-cut."""
    from .exact import solve_binary_labeling

    if dataset.noise_model is not NoiseModel.NOISY_INPUT:
        raise ContractError("integrality check requires the noisy input model")
    lp = labeling_relaxation(dataset, active)
    sol = solve_lp(lp, method=method)
    if not sol.optimal:
        raise RuntimeError(f"labeling relaxation returned {sol.status.value}")
    lp_obj = sol.objective + float(np.sum(dataset.labels == 1.0))
    ip_obj = solve_binary_labeling(dataset, active).objective
    return lp_obj, ip_obj, abs(lp_obj - ip_obj) <= tol
