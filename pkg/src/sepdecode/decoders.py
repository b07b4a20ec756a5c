"""Decoders: the cutting-plane separation decoder and its baselines.

All decoders take a cost vector ``c`` of channel LLRs (positive favours bit 0)
and minimise ``c^T x``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .codes import CodeSpec
from .cuts import (
    INTEGRALITY_TOL,
    VIOLATION_TOL,
    Cut,
    all_forbidden_set_inequalities,
    find_violated_fsi,
    gomory_cuts,
    is_integral,
    rpc_cuts,
)
from .gf2 import BinaryMatrix, construct_h_hat, enumerate_codewords, generator_from_h, is_codeword
from .lp import FEAS_TOL, OPTIMAL, DualSimplex, LpProblem, SimplexError

__all__ = [
    "Status",
    "FrameStats",
    "DecodeOutcome",
    "SeparationConfig",
    "decode_separation",
    "decode_lpd_explicit",
    "decode_adaptive_lp",
    "decode_ml",
    "decode_bp",
    "find_violated_fsi",
    "InvalidCutError",
]


class Status(str, Enum):
    ML_CERTIFIED = "ml_certified"
    CODEWORD = "codeword"  # valid codeword without an optimality certificate (BP)
    FAILURE_NO_CUT = "failure_no_cut"
    FAILURE_LIMIT = "failure_limit"


class InvalidCutError(SimplexError):
    """The relaxation became infeasible, which only an invalid cut can cause."""


@dataclass
class FrameStats:
    lps_solved: int = 0
    gomory_cuts: int = 0
    rpc_cuts: int = 0
    fsi_cuts: int = 0
    bp_iterations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class DecodeOutcome:
    word: np.ndarray | None
    status: Status
    objective: float | None
    stats: FrameStats
    x: np.ndarray | None = field(default=None, repr=False)
    cuts: tuple[Cut, ...] = field(default=(), repr=False)

    @property
    def certified(self) -> bool:
        return self.status is Status.ML_CERTIFIED

    @property
    def success(self) -> bool:
        """Decoder produced a codeword it stands behind."""
        return self.status in (Status.ML_CERTIFIED, Status.CODEWORD)


@dataclass(frozen=True)
class SeparationConfig:
    strategy: str = "all"
    max_iterations: int = 100
    rpc_enabled: bool = True
    integrality_tol: float = INTEGRALITY_TOL
    violation_tol: float = VIOLATION_TOL
    feas_tol: float = FEAS_TOL

    def __post_init__(self):
        if self.strategy not in ("all", "first"):
            raise ValueError(f"strategy must be 'all' or 'first', got {self.strategy!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def _matrix(code) -> BinaryMatrix:
    if isinstance(code, CodeSpec):
        return code.H
    if isinstance(code, BinaryMatrix):
        return code
    return BinaryMatrix.from_array(code)


def _costs(H: BinaryMatrix, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (H.n,):
        raise ValueError(f"cost vector has shape {c.shape}, expected ({H.n},)")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost vector contains non-finite values")
    return c


def _rounded(x: np.ndarray) -> np.ndarray:
    return (x > 0.5).astype(np.uint8)


def _certified(c, x, stats, t0, cuts=()) -> DecodeOutcome:
    word = _rounded(x)
    stats.wall_time = time.perf_counter() - t0
    return DecodeOutcome(word, Status.ML_CERTIFIED, float(c @ word), stats, x, tuple(cuts))


def _failed(status, x, objective, stats, t0, cuts=()) -> DecodeOutcome:
    stats.wall_time = time.perf_counter() - t0
    word = None if x is None else _rounded(x)
    return DecodeOutcome(word, status, objective, stats, x, tuple(cuts))


def _checked(sol):
    if sol.status != OPTIMAL:
        raise InvalidCutError(f"relaxation is {sol.status}; a cut must have been invalid")
    return sol


def decode_separation(code, c, cfg: SeparationConfig | None = None,
                      trace: list | None = None) -> DecodeOutcome:
    """Cutting-plane decoder over the relaxation with parity indicators ``z``.

    Integral ``(x, z)`` stops with the ML certificate. Integral ``x`` with a
    fractional ``z`` adds Gomory cuts; fractional ``x`` builds the row-reduced
    matrix and adds RPC cuts, stopping with ``failure_no_cut`` if none exist.

    ``trace``, when given, receives one dict per LP solved with keys
    ``iteration``, ``objective``, ``x`` and ``cuts`` (pairs of cut and its
    violation at ``x``).
    """
    cfg = cfg or SeparationConfig()
    t0 = time.perf_counter()
    H = _matrix(code)
    c = _costs(H, c)
    stats = FrameStats()
    solver = DualSimplex(LpProblem(c, H), feas_tol=cfg.feas_tol)
    pool: set[Cut] = set()
    added: list[Cut] = []
    tol = cfg.integrality_tol
    sol = None
    while stats.lps_solved < cfg.max_iterations:
        sol = _checked(solver.optimize())
        stats.lps_solved += 1
        x, z = sol.x, sol.z
        event = {"iteration": stats.lps_solved, "objective": sol.objective, "x": x, "cuts": []}
        if trace is not None:
            trace.append(event)
        x_integral = is_integral(x, tol)
        if x_integral and is_integral(z, tol):
            return _certified(c, x, stats, t0, added)
        if x_integral:
            new = gomory_cuts(H, x, z, cfg.strategy)
        elif cfg.rpc_enabled:
            new = rpc_cuts(construct_h_hat(H, x, tol), x, cfg.strategy, tol)
        else:
            new = []
        new = [cut for cut in new if cut not in pool and cut.violation(x) > cfg.violation_tol]
        if not new:
            return _failed(Status.FAILURE_NO_CUT, x, sol.objective, stats, t0, added)
        for cut in new:
            pool.add(cut)
            if cut.provenance == "gomory":
                stats.gomory_cuts += 1
            else:
                stats.rpc_cuts += 1
        event["cuts"] = [(cut, cut.violation(x)) for cut in new]
        added.extend(new)
        solver.add_cuts(new)
    return _failed(Status.FAILURE_LIMIT, sol.x, sol.objective, stats, t0, added)


@lru_cache(maxsize=8)
def _all_fsis(H: BinaryMatrix) -> tuple[Cut, ...]:
    return tuple(all_forbidden_set_inequalities(H))


def fsi_count(H: BinaryMatrix) -> int:
    return int(sum(2 ** (int(d) - 1) for d in H.check_degrees if d > 0))


def decode_lpd_explicit(code, c, max_degree: int = 12) -> DecodeOutcome:
    """LP decoding over the fundamental polytope with every FSI written out."""
    t0 = time.perf_counter()
    H = _matrix(code)
    c = _costs(H, c)
    if H.max_check_degree > max_degree:
        raise ValueError(
            f"check degree {H.max_check_degree} needs {fsi_count(H)} inequalities; limit is degree {max_degree}"
        )
    stats = FrameStats(fsi_cuts=fsi_count(H))
    sol = _checked(DualSimplex(LpProblem(c, None, _all_fsis(H))).optimize())
    stats.lps_solved = 1
    if is_integral(sol.x):
        return _certified(c, sol.x, stats, t0)
    return _failed(Status.FAILURE_NO_CUT, sol.x, sol.objective, stats, t0)


def decode_adaptive_lp(code, c, max_iterations: int = 1000,
                       tol: float = VIOLATION_TOL) -> DecodeOutcome:
    """Adaptive LP decoding: add the most violated FSI of each check until none is violated."""
    t0 = time.perf_counter()
    H = _matrix(code)
    c = _costs(H, c)
    stats = FrameStats()
    solver = DualSimplex(LpProblem(c, None))
    pool: set[Cut] = set()
    added: list[Cut] = []
    sol = None
    while stats.lps_solved < max_iterations:
        sol = _checked(solver.optimize())
        stats.lps_solved += 1
        new = [cut for cut in find_violated_fsi(H, sol.x, tol) if cut not in pool]
        if not new:
            if is_integral(sol.x):
                return _certified(c, sol.x, stats, t0, added)
            return _failed(Status.FAILURE_NO_CUT, sol.x, sol.objective, stats, t0, added)
        pool.update(new)
        added.extend(new)
        stats.fsi_cuts += len(new)
        solver.add_cuts(new)
    return _failed(Status.FAILURE_LIMIT, sol.x, sol.objective, stats, t0, added)


@lru_cache(maxsize=8)
def _codebook(H: BinaryMatrix) -> np.ndarray:
    return enumerate_codewords(H)


def decode_ml(code, c, method: str = "brute", node_limit: int = 200_000) -> DecodeOutcome:
    """Exact ML decoding by exhaustive search or branch-and-bound."""
    if method == "brute":
        return _ml_brute(code, c)
    if method in ("branch_and_bound", "bnb"):
        return _ml_branch_and_bound(code, c, node_limit)
    raise ValueError(f"unknown ML method {method!r}")


def _ml_brute(code, c) -> DecodeOutcome:
    t0 = time.perf_counter()
    H = _matrix(code)
    c = _costs(H, c)
    words = _codebook(H)
    costs = words @ c
    best = int(np.argmin(costs))
    stats = FrameStats(wall_time=time.perf_counter() - t0)
    word = words[best].copy()
    return DecodeOutcome(word, Status.ML_CERTIFIED, float(c @ word), stats, word.astype(float))


def _ml_branch_and_bound(code, c, node_limit: int) -> DecodeOutcome:
    """Depth-first branch-and-bound over the fundamental polytope.

    Each node solves the LP relaxation with its fixings, separating violated
    FSIs of ``H`` (valid for every codeword, so shared across the tree). An
    integral node optimum lies in the fundamental polytope and is therefore a
    codeword. Branching takes the most fractional ``x_j``.
    """
    t0 = time.perf_counter()
    H = _matrix(code)
    c = _costs(H, c)
    n = H.n
    stats = FrameStats()
    best_word = osd_incumbent(H, c)
    best = float(c @ best_word)
    solver = DualSimplex(LpProblem(c, None))
    pool: set[Cut] = set()
    stack = [(np.zeros(n), np.ones(n))]
    nodes = 0
    while stack:
        if nodes >= node_limit:
            x = None if best_word is None else best_word.astype(float)
            return _failed(Status.FAILURE_LIMIT, x, best if best_word is not None else None, stats, t0)
        nodes += 1
        lo, hi = stack.pop()
        for j in range(n):
            solver.set_bounds(j, lo[j], hi[j])
        while True:
            sol = solver.optimize()
            stats.lps_solved += 1
            if sol.status != OPTIMAL or sol.objective >= best - 1e-12:
                sol = None
                break
            new = [cut for cut in find_violated_fsi(H, sol.x) if cut not in pool]
            if not new:
                break
            pool.update(new)
            stats.fsi_cuts += len(new)
            solver.add_cuts(new)
        if sol is None:
            continue
        x = sol.x
        if is_integral(x):
            word = _rounded(x)
            obj = float(c @ word)
            if obj < best:
                best, best_word = obj, word
            continue
        frac = np.abs(x - 0.5)
        j = int(np.argmin(frac))
        down = (lo.copy(), hi.copy())
        down[1][j] = 0.0
        up = (lo.copy(), hi.copy())
        up[0][j] = 1.0
        # explore the side x_j leans towards first
        stack.extend([down, up] if x[j] > 0.5 else [up, down])
    stats.wall_time = time.perf_counter() - t0
    return DecodeOutcome(best_word, Status.ML_CERTIFIED, best, stats, best_word.astype(float))


@lru_cache(maxsize=8)
def _generator(H: BinaryMatrix) -> np.ndarray:
    return generator_from_h(H)


def osd_incumbent(H: BinaryMatrix, c, order: int = 1) -> np.ndarray:
    """Codeword from ordered-statistics re-encoding (order 0 or 1).

    The hard decisions on the ``k`` most reliable independent positions are
    re-encoded; order 1 also tries flipping each of those positions.
    """
    c = np.asarray(c, dtype=float)
    hard = (c < 0).astype(np.uint8)
    if is_codeword(H, hard):
        return hard
    G = _generator(H).copy()
    k = G.shape[0]
    info = []
    r = 0
    for j in np.argsort(-np.abs(c), kind="stable"):
        if r == k:
            break
        p = np.flatnonzero(G[r:, j])
        if p.size == 0:
            continue
        p = r + p[0]
        G[[r, p]] = G[[p, r]]
        mask = G[:, j].astype(bool)
        mask[r] = False
        G[mask] ^= G[r]
        info.append(j)
        r += 1
    base = (hard[info] @ G) % 2
    if order == 0:
        return base.astype(np.uint8)
    candidates = np.vstack([base, base ^ G]).astype(np.uint8)
    return candidates[int(np.argmin(candidates @ c))]


@lru_cache(maxsize=16)
def _tanner_edges(H: BinaryMatrix):
    rows, cols = np.nonzero(H.array)
    degrees = np.bincount(rows, minlength=H.m)
    width = int(degrees.max())
    slot = np.concatenate([np.arange(d) for d in degrees])
    return rows, cols, slot, width


LLR_CLIP = 50.0


def decode_bp(code, llr, max_iter: int = 200) -> DecodeOutcome:
    """Flooding sum-product decoding with the tanh rule.

    Messages are clipped to +-50. The decoder stops as soon as the hard
    decision satisfies every check; it carries no optimality certificate.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    t0 = time.perf_counter()
    H = _matrix(code)
    llr = _costs(H, llr)
    rows, cols, slot, width = _tanner_edges(H)
    stats = FrameStats()
    v2c = np.clip(llr[cols], -LLR_CLIP, LLR_CLIP)
    grid = np.ones((H.m, width))
    hard = (llr < 0).astype(np.uint8)
    for it in range(1, max_iter + 1):
        grid[rows, slot] = np.tanh(v2c / 2.0)
        # leave-one-out products via prefix and suffix products along each check
        prefix = np.cumprod(np.hstack([np.ones((H.m, 1)), grid[:, :-1]]), axis=1)
        suffix = np.cumprod(np.hstack([np.ones((H.m, 1)), grid[:, ::-1][:, :-1]]), axis=1)[:, ::-1]
        excl = (prefix * suffix)[rows, slot]
        c2v = 2.0 * np.arctanh(np.clip(excl, -1 + 1e-15, 1 - 1e-15))
        c2v = np.clip(c2v, -LLR_CLIP, LLR_CLIP)
        total = llr + np.bincount(cols, weights=c2v, minlength=H.n)
        hard = (total < 0).astype(np.uint8)
        stats.bp_iterations = it
        if is_codeword(H, hard):
            stats.wall_time = time.perf_counter() - t0
            return DecodeOutcome(hard, Status.CODEWORD, float(llr @ hard), stats, total)
        v2c = np.clip(total[cols] - c2v, -LLR_CLIP, LLR_CLIP)
    stats.wall_time = time.perf_counter() - t0
    return DecodeOutcome(hard, Status.FAILURE_NO_CUT, float(llr @ hard), stats, total)
