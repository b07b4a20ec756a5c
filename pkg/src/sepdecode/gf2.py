"""Bit-exact linear algebra over GF(2).

Rows are stored as Python integers with bit ``j`` holding column ``j``, so a
row addition is a single XOR of arbitrary-precision words.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_ENUM_DIMENSION = 24


def _pack(bits: Iterable[int]) -> int:
    word = 0
    for j, b in enumerate(bits):
        if b:
            word |= 1 << j
    return word


def _unpack(word: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.uint8)
    j = 0
    while word:
        if word & 1:
            out[j] = 1
        word >>= 1
        j += 1
    return out


@dataclass(frozen=True)
class BinaryMatrix:
    """Immutable m x n matrix over GF(2) with bit-packed rows."""

    rows: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.n < 1 or len(self.rows) < 1:
            raise ValueError("a binary matrix needs at least one row and one column")
        limit = 1 << self.n
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {self.n} columns")

    @classmethod
    def from_array(cls, a) -> "BinaryMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        return cls(tuple(_pack(row) for row in a), a.shape[1])

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.n

    @cached_property
    def array(self) -> np.ndarray:
        out = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = _unpack(r, self.n)
        out.setflags(write=False)
        return out

    def to_array(self) -> np.ndarray:
        return self.array.copy()

    @cached_property
    def neighborhoods(self) -> tuple[np.ndarray, ...]:
        """Column supports ``N_i`` of every row, as sorted index arrays."""
        return tuple(np.flatnonzero(row) for row in self.array)

    @cached_property
    def check_degrees(self) -> np.ndarray:
        return self.array.sum(axis=1).astype(int)

    @cached_property
    def variable_degrees(self) -> np.ndarray:
        return self.array.sum(axis=0).astype(int)

    @property
    def max_check_degree(self) -> int:
        return int(self.check_degrees.max())

    @cached_property
    def rank(self) -> int:
        return len(_echelon(list(self.rows))[1])

    def __getitem__(self, ij):
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"BinaryMatrix(m={self.m}, n={self.n})"

    def __str__(self):
        return "\n".join("".join(str(b) for b in row) for row in self.array)


def as_bits(x, n: int | None = None) -> np.ndarray:
    """Coerce ``x`` into a uint8 0/1 vector, checking its length against ``n``."""
    v = np.asarray(x)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D bit vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"bit vector has length {v.shape[0]}, expected {n}")
    if not np.isin(v, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    return v.astype(np.uint8)


def syndrome(H: BinaryMatrix, x) -> np.ndarray:
    """Mod-2 product ``H x``; all-zero exactly when ``x`` is a codeword."""
    word = _pack(as_bits(x, H.n))
    return np.array([(r & word).bit_count() & 1 for r in H.rows], dtype=np.uint8)


def is_codeword(H: BinaryMatrix, x) -> bool:
    word = _pack(as_bits(x, H.n))
    return not any((r & word).bit_count() & 1 for r in H.rows)


def row_add(M: BinaryMatrix, target: int, source: int) -> BinaryMatrix:
    """Return ``M`` with row ``source`` XORed into row ``target`` (0-based)."""
    for idx in (target, source):
        if not 0 <= idx < M.m:
            raise IndexError(f"row index {idx} out of range for {M.m} rows")
    if target == source:
        raise ValueError("adding a row into itself zeroes it; not an elementary operation")
    rows = list(M.rows)
    rows[target] ^= rows[source]
    return BinaryMatrix(tuple(rows), M.n)


def _echelon(rows: list[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of packed rows; returns (rows, pivot columns)."""
    rows = list(rows)
    pivots = []
    r = 0
    width = max((row.bit_length() for row in rows), default=0)
    for col in range(width):
        bit = 1 << col
        p = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def construct_h_hat(H: BinaryMatrix, x_star, tol: float = 1e-6) -> BinaryMatrix:
    """Row-equivalent matrix in which fractional columns of ``x_star`` become unit vectors.

    Fractional columns are visited in ascending order. For column ``j`` the
    smallest row ``i >= l`` holding a one is added into row ``l`` (when row
    ``l`` has a zero there), after which every other row with a one in column
    ``j`` receives row ``l``. ``l`` advances only after a successful pivot and
    the scan stops once all ``m`` rows have been used as pivots. Columns with
    no available pivot are skipped. All-zero rows are kept.
    """
    x = np.asarray(x_star, dtype=float)
    if x.shape != (H.n,):
        raise ValueError(f"x_star has shape {x.shape}, expected ({H.n},)")
    fractional = np.flatnonzero((x > tol) & (x < 1 - tol))
    rows = list(H.rows)
    m = len(rows)
    l = 0
    for j in fractional:
        if l >= m:
            break
        bit = 1 << int(j)
        p = next((i for i in range(l, m) if rows[i] & bit), None)
        if p is None:
            continue
        if p != l:
            rows[l] ^= rows[p]
        for i in range(m):
            if i != l and rows[i] & bit:
                rows[i] ^= rows[l]
        l += 1
    return BinaryMatrix(tuple(rows), H.n)


def nullspace_basis(H: BinaryMatrix) -> list[int]:
    """Packed basis of ``{x : Hx = 0}``."""
    rows, pivots = _echelon(list(H.rows))
    pivot_set = set(pivots)
    basis = []
    for free in range(H.n):
        if free in pivot_set:
            continue
        vec = 1 << free
        for row, p in zip(rows, pivots):
            if row >> free & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis


def generator_from_h(H: BinaryMatrix) -> np.ndarray:
    """Generator matrix (k x n uint8 array) with ``G H^T = 0``; empty when k = 0."""
    basis = nullspace_basis(H)
    if not basis:
        return np.zeros((0, H.n), dtype=np.uint8)
    return np.array([_unpack(v, H.n) for v in basis], dtype=np.uint8)


def enumerate_codewords(H: BinaryMatrix, max_dimension: int = MAX_ENUM_DIMENSION) -> np.ndarray:
    """All ``2^k`` codewords as rows of a uint8 array; row ``t`` combines the basis vectors set in ``t``."""
    basis = nullspace_basis(H)
    k = len(basis)
    if k > max_dimension:
        raise ValueError(f"code dimension {k} exceeds the enumeration limit {max_dimension}")
    G = np.array([_unpack(v, H.n) for v in basis], dtype=np.uint8).reshape(k, H.n)
    out = np.zeros((1 << k, H.n), dtype=np.uint8)
    # word t is the XOR of basis vectors selected by the set bits of t
    for b in range(k):
        half = 1 << b
        out[half:2 * half] = out[:half] ^ G[b]
    return out


def rank(rows: Sequence[Sequence[int]] | BinaryMatrix) -> int:
    if not isinstance(rows, BinaryMatrix):
        rows = BinaryMatrix.from_array(rows)
    return rows.rank
