"""Linear programming core for the decoding relaxations.

The relaxation is

    min c^T x   s.t.  H x - 2 z = 0,  A x <= b (cuts),  lo <= x <= hi,  z >= 0

solved by a bounded-variable revised simplex that keeps an explicit basis
inverse. The starting basis has every ``z_i`` and every cut slack basic and
each ``x_j`` at the bound favoured by the sign of ``c_j``; its duals are zero,
so it is dual feasible and the dual simplex runs from it directly. Adding a
cut appends a basic slack, which keeps dual feasibility, so re-optimisation
after new cuts is a warm dual simplex.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cuts import Cut
from .gf2 import BinaryMatrix

FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 50
RESIDUAL_TOL = 1e-11

BASIC, AT_LOWER, AT_UPPER = 0, 1, 2

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class SimplexError(RuntimeError):
    """Numerical breakdown or iteration limit inside the simplex."""


@dataclass(frozen=True)
class LpProblem:
    """Decoding LP with parity indicators and cuts. ``H=None`` drops the parity equalities and ``z``."""

    c: np.ndarray
    H: BinaryMatrix | None
    cuts: tuple[Cut, ...] = ()
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "cuts", tuple(self.cuts))
        if c.ndim != 1:
            raise ValueError("cost vector must be 1-D")
        if self.H is not None and self.H.n != c.size:
            raise ValueError(f"cost has length {c.size} but H has {self.H.n} columns")
        for cut in self.cuts:
            if (cut.plus and max(cut.plus) >= c.size) or (cut.minus and max(cut.minus) >= c.size):
                raise ValueError("cut references a column outside the problem")

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def m(self) -> int:
        return 0 if self.H is None else self.H.m

    def x_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.zeros(self.n) if self.lower is None else np.asarray(self.lower, dtype=float)
        hi = np.ones(self.n) if self.upper is None else np.asarray(self.upper, dtype=float)
        return lo, hi

    def with_cuts(self, cuts: Sequence[Cut]) -> "LpProblem":
        return replace(self, cuts=self.cuts + tuple(cuts))


@dataclass(frozen=True)
class _Basis:
    basis: np.ndarray
    state: np.ndarray
    binv: np.ndarray


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None
    z: np.ndarray | None
    objective: float | None
    iterations: int
    basis: _Basis | None = field(default=None, repr=False, compare=False)


class DualSimplex:
    """Stateful solver for one :class:`LpProblem`, re-optimised as cuts arrive."""

    def __init__(self, problem: LpProblem, *, feas_tol: float = FEAS_TOL,
                 max_iterations: int | None = None, warm: _Basis | None = None):
        self.problem = problem
        self.feas_tol = feas_tol
        self.max_iterations = max_iterations
        self.iterations = 0
        n, m = problem.n, problem.m
        self.n, self.m = n, m
        x_lo, x_hi = problem.x_bounds()
        self.lo = np.concatenate([x_lo, np.zeros(m)])
        self.hi = np.concatenate([x_hi, np.full(m, np.inf)])
        self.cost = np.concatenate([problem.c, np.zeros(m)])
        self.A = np.zeros((m, n + m))
        if m:
            self.A[:, :n] = problem.H.array
            self.A[:, n:] = -2.0 * np.eye(m)
        self.b = np.zeros(m)
        self.basis = np.arange(n, n + m)
        self.state = np.empty(n + m, dtype=np.int8)
        self.state[:n] = np.where(problem.c < 0, AT_UPPER, AT_LOWER)
        self.state[n:] = BASIC
        self.binv = -0.5 * np.eye(m)
        self._since_refactor = 0
        self.status = None
        self._start = 0
        if problem.cuts:
            self._append_rows(problem.cuts, fresh=warm is None)
        if warm is not None:
            if warm.basis.size != self.A.shape[0]:
                raise ValueError("warm basis does not match the problem size")
            self.basis = warm.basis.copy()
            self.state = warm.state.copy()
            self.binv = warm.binv.copy()

    # -- problem growth ---------------------------------------------------------

    def _append_rows(self, cuts: Sequence[Cut], fresh: bool = False):
        k = len(cuts)
        r, N = self.A.shape
        A = np.zeros((r + k, N + k))
        A[:r, :N] = self.A
        for t, cut in enumerate(cuts):
            A[r + t, list(cut.plus)] = 1.0
            A[r + t, list(cut.minus)] = -1.0
            A[r + t, N + t] = 1.0
        new_b = np.array([cut.rhs for cut in cuts], dtype=float)
        old_basis = self.basis
        self.A = A
        self.b = np.concatenate([self.b, new_b])
        self.cost = np.concatenate([self.cost, np.zeros(k)])
        self.lo = np.concatenate([self.lo, np.zeros(k)])
        self.hi = np.concatenate([self.hi, np.full(k, np.inf)])
        self.state = np.concatenate([self.state, np.full(k, BASIC, dtype=np.int8)])
        self.basis = np.concatenate([old_basis, np.arange(N, N + k)])
        if fresh:
            self._refactor()
            return
        # [[B, 0], [a_B, I]]^-1 = [[B^-1, 0], [-a_B B^-1, I]]
        binv = np.zeros((r + k, r + k))
        binv[:r, :r] = self.binv
        binv[r:, :r] = -A[r:, old_basis] @ self.binv
        binv[r:, r:] = np.eye(k)
        self.binv = binv

    def add_cuts(self, cuts: Sequence[Cut]):
        if cuts:
            self._append_rows(cuts)
            self.problem = self.problem.with_cuts(cuts)
            self.status = None

    def set_bounds(self, j: int, lo: float, hi: float):
        """Change the bounds of ``x_j``; the basis stays dual feasible."""
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise ValueError(f"invalid bounds [{lo}, {hi}] for x{j}")
        self.lo[j], self.hi[j] = lo, hi
        self.status = None

    # -- simplex ----------------------------------------------------------------

    def _values(self) -> np.ndarray:
        vals = np.where(self.state == AT_UPPER, self.hi, self.lo)
        vals[self.basis] = 0.0
        vals[self.basis] = self.binv @ (self.b - self.A @ vals)
        return vals

    def _reduced_costs(self) -> np.ndarray:
        y = self.cost[self.basis] @ self.binv
        d = self.cost - y @ self.A
        d[self.basis] = 0.0
        return d

    def _residual(self) -> float:
        if not self.A.shape[0]:
            return 0.0
        return float(np.abs(self.A @ self._values() - self.b).max())

    def _refactor(self):
        B = self.A[:, self.basis]
        diag = np.diagonal(B)
        if np.count_nonzero(B) == np.count_nonzero(diag) == B.shape[0]:
            self.binv = np.diag(1.0 / diag)
        else:
            self.binv = np.linalg.inv(B)
        self._since_refactor = 0

    def _pivot(self, p: int, q: int):
        col = self.binv @ self.A[:, q]
        piv = col[p]
        if abs(piv) < PIVOT_TOL:
            raise SimplexError(f"pivot element {piv:.3e} too small")
        self.binv[p] /= piv
        col[p] = 0.0
        self.binv -= np.outer(col, self.binv[p])
        self.basis[p] = q
        self.state[q] = BASIC
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self._refactor()

    def _limit(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        r, N = self.A.shape
        return 50 * (r + N) + 1000

    def _stall_limit(self) -> int:
        return 2 * self.A.shape[0] + 2 * self.n

    def _dual_phase(self) -> str:
        movable = self.lo < self.hi
        bland = False
        stall = 0
        limit = self.iterations + self._limit()
        while True:
            vals = self._values()
            xb = vals[self.basis]
            lb, ub = self.lo[self.basis], self.hi[self.basis]
            below = lb - xb
            above = xb - ub
            infeas = np.maximum(below, above)
            bad = np.flatnonzero(infeas > self.feas_tol)
            if bad.size == 0:
                return OPTIMAL
            if self.iterations >= limit:
                raise SimplexError(f"dual simplex exceeded {limit} iterations")
            if bland:
                p = int(bad[np.argmin(self.basis[bad])])
            else:
                p = int(bad[np.argmax(infeas[bad])])
            leaving = self.basis[p]
            going_low = below[p] > above[p]
            alpha = self.binv[p] @ self.A
            d = self._reduced_costs()
            at_lo = (self.state == AT_LOWER) & movable
            at_hi = (self.state == AT_UPPER) & movable
            if going_low:
                eligible = (at_lo & (alpha < -PIVOT_TOL)) | (at_hi & (alpha > PIVOT_TOL))
            else:
                eligible = (at_lo & (alpha > PIVOT_TOL)) | (at_hi & (alpha < -PIVOT_TOL))
            cand = np.flatnonzero(eligible)
            if cand.size == 0:
                return INFEASIBLE
            dc = np.where(self.state[cand] == AT_LOWER, np.maximum(d[cand], 0.0),
                          np.maximum(-d[cand], 0.0))
            ratios = dc / np.abs(alpha[cand])
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12]
            if bland:
                q = int(ties.min())
            else:
                q = int(ties[np.argmax(np.abs(alpha[ties]))])
            stall = stall + 1 if best <= 1e-12 else 0
            if stall > self._stall_limit():
                bland = True
            self.state[leaving] = AT_LOWER if going_low else AT_UPPER
            self._pivot(p, q)
            self.iterations += 1

    def _primal_phase(self) -> str:
        """Primal cleanup from a primal feasible basis (dual drift after the dual phase)."""
        movable = self.lo < self.hi
        bland = False
        stall = 0
        limit = self.iterations + self._limit()
        while True:
            d = self._reduced_costs()
            wrong = movable & (((self.state == AT_LOWER) & (d < -DUAL_TOL)) |
                               ((self.state == AT_UPPER) & (d > DUAL_TOL)))
            cand = np.flatnonzero(wrong)
            if cand.size == 0:
                return OPTIMAL
            if self.iterations >= limit:
                raise SimplexError(f"primal simplex exceeded {limit} iterations")
            q = int(cand.min()) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            direction = 1.0 if self.state[q] == AT_LOWER else -1.0
            vals = self._values()
            xb = vals[self.basis]
            lb, ub = self.lo[self.basis], self.hi[self.basis]
            delta = -direction * (self.binv @ self.A[:, q])
            with np.errstate(divide="ignore", invalid="ignore"):
                steps = np.where(delta < -PIVOT_TOL, (xb - lb) / -delta,
                                 np.where(delta > PIVOT_TOL, (ub - xb) / delta, np.inf))
            steps = np.maximum(steps, 0.0)
            flip = self.hi[q] - self.lo[q]
            t = steps.min() if steps.size else np.inf
            if not np.isfinite(t) and not np.isfinite(flip):
                return UNBOUNDED
            stall = stall + 1 if min(t, flip) <= 1e-12 else 0
            if stall > self._stall_limit():
                bland = True
            if flip <= t:
                self.state[q] = AT_UPPER if self.state[q] == AT_LOWER else AT_LOWER
                self.iterations += 1
                continue
            ties = np.flatnonzero(steps <= t + 1e-12)
            p = int(ties[np.argmin(self.basis[ties])]) if bland else int(ties[np.argmax(np.abs(delta[ties]))])
            leaving = self.basis[p]
            self.state[leaving] = AT_LOWER if delta[p] < 0 else AT_UPPER
            self._pivot(p, q)
            self.iterations += 1

    def optimize(self) -> LpSolution:
        self._start = self.iterations
        d = self._reduced_costs()
        movable = self.lo < self.hi
        dual_bad = movable & (((self.state == AT_LOWER) & (d < -DUAL_TOL)) |
                              ((self.state == AT_UPPER) & (d > DUAL_TOL)))
        if dual_bad.any():
            # bounded variables resting on the wrong bound are moved to the other one
            if not (np.isfinite(self.lo[dual_bad]).all() and np.isfinite(self.hi[dual_bad]).all()):
                raise SimplexError("starting basis is not dual feasible")
            self.state[dual_bad] = np.where(d[dual_bad] < 0, AT_UPPER, AT_LOWER)
        status = self._dual_phase()
        if status == OPTIMAL:
            if self._since_refactor and self._residual() > RESIDUAL_TOL:
                self._refactor()
            status = self._primal_phase()
            if status == OPTIMAL and self._dual_phase() != OPTIMAL:
                raise SimplexError("lost primal feasibility during cleanup")
        self.status = status
        return self.solution()

    def solution(self, snapshot: bool = True) -> LpSolution:
        if self.status != OPTIMAL:
            return LpSolution(self.status, None, None, None, self.iterations - self._start)
        vals = self._values()
        x = vals[: self.n].copy()
        z = vals[self.n: self.n + self.m].copy()
        basis = _Basis(self.basis.copy(), self.state.copy(), self.binv.copy()) if snapshot else None
        return LpSolution(OPTIMAL, x, z, float(self.problem.c @ x), self.iterations - self._start, basis)


def solve(p: LpProblem, **kwargs) -> LpSolution:
    """Cold solve from the slack basis."""
    return DualSimplex(p, **kwargs).optimize()


def resolve_with_cut(p: LpProblem, prev: LpSolution, new_cuts: Sequence[Cut],
                     tol: float = 1e-7, **kwargs) -> LpSolution:
    """Warm re-solve of ``p`` plus ``new_cuts`` from the optimal basis in ``prev``."""
    if prev.status != OPTIMAL or prev.basis is None:
        raise ValueError("warm start needs an optimal solution with its basis")
    for cut in new_cuts:
        if cut.violation(prev.x) <= tol:
            raise ValueError(f"cut {cut} is not violated by the previous optimum")
    solver = DualSimplex(p, warm=prev.basis, **kwargs)
    solver.add_cuts(list(new_cuts))
    return solver.optimize()


def to_lp_format(p: LpProblem) -> str:
    """Plain-text dump of the constraint system in CPLEX-LP style.

    Variables are ``x<j>`` and ``z<i>``; parity rows are named ``p<i>`` and cut
    rows ``c<k>``. Coefficients are written with ``repr`` precision.
    """

    out = io.StringIO()
    out.write("\\ decoding relaxation\nMinimize\n obj:")
    for j, cj in enumerate(p.c):
        out.write(f" {'-' if cj < 0 else '+'} {abs(float(cj))!r} x{j}")
    out.write("\nSubject To\n")
    if p.H is not None:
        for i, N in enumerate(p.H.neighborhoods):
            lhs = " + ".join(f"x{j}" for j in N)
            out.write(f" p{i}: {lhs} - 2 z{i} = 0\n")
    for k, cut in enumerate(p.cuts):
        parts = [f"+ x{j}" for j in cut.plus] + [f"- x{j}" for j in cut.minus]
        lhs = " ".join(parts).lstrip("+ ") if parts else "0 x0"
        out.write(f" c{k}: {lhs} <= {cut.rhs}\n")
    out.write("Bounds\n")
    lo, hi = p.x_bounds()
    for j in range(p.n):
        out.write(f" {lo[j]!r} <= x{j} <= {hi[j]!r}\n")
    for i in range(p.m):
        out.write(f" z{i} >= 0\n")
    out.write("End\n")
    return out.getvalue()
