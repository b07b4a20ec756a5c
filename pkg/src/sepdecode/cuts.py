"""Cut generation: forbidden set inequalities, Gomory cuts and RPC cuts.

Every cut here has the form ``sum(x[plus]) - sum(x[minus]) <= rhs`` with
integer ``rhs``. Column indices are 0-based.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .gf2 import BinaryMatrix

VIOLATION_TOL = 1e-7
INTEGRALITY_TOL = 1e-6

PROVENANCES = ("fsi", "gomory", "rpc_odd", "rpc_even")


@dataclass(frozen=True)
class Cut:
    plus: tuple[int, ...]
    minus: tuple[int, ...]
    rhs: int
    provenance: str = field(default="fsi", compare=False)
    row: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if set(self.plus) & set(self.minus):
            raise ValueError("plus and minus index sets overlap")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def lhs(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x[list(self.plus)].sum() - x[list(self.minus)].sum())

    def violation(self, x) -> float:
        return self.lhs(x) - self.rhs

    def dense(self, n: int) -> np.ndarray:
        a = np.zeros(n)
        a[list(self.plus)] = 1.0
        a[list(self.minus)] = -1.0
        return a

    def trace_line(self, x=None) -> str:
        """One-line trace record: provenance, row, plus, minus, rhs, violation."""
        row = "-" if self.row is None else str(self.row)
        plus = ",".join(map(str, self.plus)) or "-"
        minus = ",".join(map(str, self.minus)) or "-"
        viol = "nan" if x is None else f"{self.violation(x):.6g}"
        return f"{self.provenance}\t{row}\t{plus}\t{minus}\t{self.rhs}\t{viol}"


TRACE_HEADER = "provenance\trow\tplus\tminus\trhs\tviolation"


def cut_matrix(cuts: Sequence[Cut], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Stack cuts into ``(A, b)`` with ``A x <= b``."""
    A = np.zeros((len(cuts), n))
    b = np.zeros(len(cuts))
    for r, cut in enumerate(cuts):
        A[r, list(cut.plus)] = 1.0
        A[r, list(cut.minus)] = -1.0
        b[r] = cut.rhs
    return A, b


def cut_violated(cut: Cut, x, tol: float = VIOLATION_TOL) -> bool:
    return cut.violation(x) > tol


def is_integral(v, tol: float = INTEGRALITY_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float)
    return bool(np.all(np.abs(v - np.round(v)) <= tol))


def forbidden_set_inequality(neighborhood: Iterable[int], S: Iterable[int], *,
                             provenance: str = "fsi", row: int | None = None) -> Cut:
    N = sorted(set(int(j) for j in neighborhood))
    S = sorted(set(int(j) for j in S))
    if not set(S) <= set(N):
        raise ValueError("S must be a subset of the neighborhood")
    if len(S) % 2 == 0:
        raise ValueError(f"|S| = {len(S)} is even; forbidden sets have odd size")
    minus = tuple(j for j in N if j not in set(S))
    return Cut(tuple(S), minus, len(S) - 1, provenance, row)


def all_forbidden_set_inequalities(H: BinaryMatrix) -> list[Cut]:
    """Every FSI of every row: ``2^(deg - 1)`` per check."""
    cuts = []
    for i, N in enumerate(H.neighborhoods):
        N = N.tolist()
        for size in range(1, len(N) + 1, 2):
            for S in combinations(N, size):
                cuts.append(forbidden_set_inequality(N, S, row=i))
    return cuts


def gomory_cuts(H: BinaryMatrix, x_star, z_star, strategy: str = "all") -> list[Cut]:
    """Gomory cuts for integral ``x_star`` and fractional indicator ``z_star``.

    Row ``i`` is flagged when ``2 z*_i`` is odd; its cut is the forbidden set
    inequality with ``S`` = the ones of ``x_star`` inside the row's support.
    """
    _check_strategy(strategy)
    x = np.round(np.asarray(x_star, dtype=float)).astype(np.int64)
    k = np.round(2.0 * np.asarray(z_star, dtype=float)).astype(np.int64)
    cuts = []
    for i in np.flatnonzero(k % 2 == 1):
        N = H.neighborhoods[i]
        S = N[x[N] == 1]
        cuts.append(forbidden_set_inequality(N, S, provenance="gomory", row=int(i)))
        if strategy == "first":
            break
    return cuts


def _bits(word: int) -> list[int]:
    out = []
    while word:
        low = word & -word
        out.append(low.bit_length() - 1)
        word ^= low
    return out


def _masks(x: np.ndarray, tol: float) -> tuple[int, int]:
    frac = (x > tol) & (x < 1 - tol)
    ones = x >= 1 - tol
    fmask = sum(1 << int(j) for j in np.flatnonzero(frac))
    omask = sum(1 << int(j) for j in np.flatnonzero(ones))
    return fmask, omask


def _rpc_from_word(row: int, fmask: int, omask: int, i: int | None) -> Cut | None:
    frac = row & fmask
    if frac == 0 or frac & (frac - 1):
        return None
    j = frac.bit_length() - 1
    ones = row & omask
    zeros = row & ~omask & ~frac
    k = ones.bit_count()
    if k % 2:
        return Cut(tuple(_bits(ones)), tuple(sorted(_bits(zeros) + [j])), k - 1, "rpc_odd", i)
    return Cut(tuple(sorted(_bits(ones) + [j])), tuple(_bits(zeros)), k, "rpc_even", i)


def rpc_cut_from_row(support: Iterable[int], x_star, tol: float = INTEGRALITY_TOL,
                     row: int | None = None) -> Cut | None:
    """RPC cut of one parity check, or ``None`` unless exactly one neighbor is fractional.

    With ``k`` the number of ones on the support and ``j`` the fractional
    column: odd ``k`` gives ``sum(ones) - x_j - sum(zeros) <= k - 1``, even
    ``k`` gives ``sum(ones) + x_j - sum(zeros) <= k``.
    """
    x = np.asarray(x_star, dtype=float)
    fmask, omask = _masks(x, tol)
    word = sum(1 << int(j) for j in set(support))
    return _rpc_from_word(word, fmask, omask, row)


def rpc_cuts(H_hat: BinaryMatrix, x_star, strategy: str = "all", tol: float = INTEGRALITY_TOL,
             counter: Counter | None = None) -> list[Cut]:
    """Scan the rows of ``H_hat`` for RPC cuts; an empty list means no cut exists."""
    _check_strategy(strategy)
    x = np.asarray(x_star, dtype=float)
    fmask, omask = _masks(x, tol)
    cuts = []
    for i, row in enumerate(H_hat.rows):
        if counter is not None:
            counter["entries"] += H_hat.n
        cut = _rpc_from_word(row, fmask, omask, i)
        if cut is not None:
            cuts.append(cut)
            if strategy == "first":
                break
    return cuts


def most_violated_fsi(neighborhood: np.ndarray, x_star, row: int | None = None,
                      tol: float = VIOLATION_TOL) -> Cut | None:
    """Most violated forbidden set inequality of one check, if any exceeds ``tol``.

    Each member ``j`` costs ``1 - x_j`` inside ``S`` and ``x_j`` outside, so the
    best ``S`` takes every ``x_j > 1/2``; when that set is even, the member
    with the smallest ``|1 - 2 x_j|`` is toggled.
    """
    N = np.asarray(neighborhood)
    if N.size == 0:
        return None
    xv = np.asarray(x_star, dtype=float)[N]
    inside = xv > 0.5
    if inside.sum() % 2 == 0:
        t = int(np.argmin(np.abs(1.0 - 2.0 * xv)))
        inside[t] = not inside[t]
    violation = 1.0 - (1.0 - xv[inside]).sum() - xv[~inside].sum()
    if violation <= tol:
        return None
    return Cut(tuple(int(j) for j in N[inside]), tuple(int(j) for j in N[~inside]),
               int(inside.sum()) - 1, "fsi", row)


def find_violated_fsi(H: BinaryMatrix, x_star, tol: float = VIOLATION_TOL) -> list[Cut]:
    """Most violated FSI of every check whose local polytope excludes ``x_star``."""
    cuts = []
    for i, N in enumerate(H.neighborhoods):
        cut = most_violated_fsi(N, x_star, row=i, tol=tol)
        if cut is not None:
            cuts.append(cut)
    return cuts


def _check_strategy(strategy: str):
    if strategy not in ("all", "first"):
        raise ValueError(f"strategy must be 'all' or 'first', got {strategy!r}")
