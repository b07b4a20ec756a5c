"""Parity-check matrices used by the decoders: built-ins, alist files, BCH(63,39)."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .gf2 import BinaryMatrix

__all__ = [
    "AlistError",
    "CodeSpec",
    "parse_alist",
    "read_alist",
    "write_alist",
    "bch_63_39",
    "bch_generator_polynomial",
    "builtin",
    "available_codes",
    "load_code",
    "poly_mod",
]


class AlistError(ValueError):
    """Malformed alist input; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class CodeSpec:
    name: str
    H: BinaryMatrix

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError(f"code {self.name!r} has dimension k={self.k}; need 0 < k < n={self.n}")

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def m(self) -> int:
        return self.H.m

    @property
    def k(self) -> int:
        # always recomputed; alist headers are not trusted for the dimension
        return self.H.n - self.H.rank

    @property
    def rate(self) -> float:
        return self.k / self.n

    def info(self) -> dict:
        arr = self.H.array
        cdeg = self.H.check_degrees
        vdeg = self.H.variable_degrees
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "rank": self.H.rank,
            "rate": self.rate,
            "max_check_degree": int(cdeg.max()),
            "max_variable_degree": int(vdeg.max()),
            "density": float(arr.mean()),
            "check_degree_distribution": _distribution(cdeg),
            "variable_degree_distribution": _distribution(vdeg),
        }


def _distribution(degrees: np.ndarray) -> dict[int, int]:
    values, counts = np.unique(degrees, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


# --- alist ----------------------------------------------------------------

def _int_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        try:
            yield lineno, [int(tok) for tok in stripped.split()]
        except ValueError:
            raise AlistError(f"non-integer token in {stripped!r}", lineno) from None


def parse_alist(text: str | bytes, name: str = "alist") -> CodeSpec:
    """Parse MacKay's alist format and cross-check the column and row lists."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = list(_int_lines(text))
    cursor = iter(lines)

    def take(what: str, count: int | None = None):
        try:
            lineno, vals = next(cursor)
        except StopIteration:
            raise AlistError(f"unexpected end of input while reading {what}") from None
        if count is not None and len(vals) != count:
            raise AlistError(f"{what}: expected {count} values, got {len(vals)}", lineno)
        return lineno, vals

    lineno, (n, m) = take("dimensions", 2)
    if n <= 0 or m <= 0:
        raise AlistError(f"nonpositive dimensions n={n}, m={m}", lineno)
    lineno, (max_col, max_row) = take("maximum degrees", 2)
    col_line, col_deg = take("column degrees", n)
    row_line, row_deg = take("row degrees", m)
    if max(col_deg) > max_col:
        raise AlistError(f"column degree {max(col_deg)} exceeds declared maximum {max_col}", col_line)
    if max(row_deg) > max_row:
        raise AlistError(f"row degree {max(row_deg)} exceeds declared maximum {max_row}", row_line)

    H = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        lineno, vals = take(f"column list {j + 1}")
        entries = [v for v in vals if v != 0]
        if len(entries) != col_deg[j]:
            raise AlistError(f"column {j + 1} lists {len(entries)} rows, degree says {col_deg[j]}", lineno)
        for i in entries:
            if not 1 <= i <= m:
                raise AlistError(f"row index {i} out of range 1..{m}", lineno)
            if H[i - 1, j]:
                raise AlistError(f"duplicate entry ({i}, {j + 1})", lineno)
            H[i - 1, j] = 1

    for i in range(m):
        lineno, vals = take(f"row list {i + 1}")
        entries = [v for v in vals if v != 0]
        if len(entries) != row_deg[i]:
            raise AlistError(f"row {i + 1} lists {len(entries)} columns, degree says {row_deg[i]}", lineno)
        listed = set()
        for j in entries:
            if not 1 <= j <= n:
                raise AlistError(f"column index {j} out of range 1..{n}", lineno)
            listed.add(j - 1)
        expected = set(np.flatnonzero(H[i]).tolist())
        if listed != expected:
            missing = sorted(x + 1 for x in expected - listed)
            extra = sorted(x + 1 for x in listed - expected)
            raise AlistError(
                f"row {i + 1} disagrees with the column lists (missing {missing}, extra {extra})", lineno
            )

    for lineno, _ in cursor:
        raise AlistError("trailing data after row lists", lineno)

    return CodeSpec(name, BinaryMatrix.from_array(H))


def read_alist(path: str | os.PathLike, name: str | None = None) -> CodeSpec:
    path = Path(path)
    return parse_alist(path.read_text(), name=name or path.stem)


def write_alist(H: BinaryMatrix | CodeSpec, sink=None) -> str:
    """Serialize ``H`` as alist text with 0-padded index lists."""
    if isinstance(H, CodeSpec):
        H = H.H
    arr = H.array
    m, n = arr.shape
    cols = [np.flatnonzero(arr[:, j]) + 1 for j in range(n)]
    rows = [np.flatnonzero(arr[i]) + 1 for i in range(m)]
    max_col = max(len(c) for c in cols)
    max_row = max(len(r) for r in rows)

    def padded(idx, width):
        return " ".join(str(v) for v in list(idx) + [0] * (width - len(idx)))

    out = io.StringIO()
    out.write(f"{n} {m}\n{max_col} {max_row}\n")
    out.write(" ".join(str(len(c)) for c in cols) + "\n")
    out.write(" ".join(str(len(r)) for r in rows) + "\n")
    for c in cols:
        out.write(padded(c, max_col) + "\n")
    for r in rows:
        out.write(padded(r, max_row) + "\n")
    text = out.getvalue()
    if sink is not None:
        sink.write(text)
    return text


# --- BCH(63, 39) -------------------------------------------------------------

GF64_PRIMITIVE = 0b1000011  # x^6 + x + 1


def _gf64_tables():
    exp = [0] * 126
    log = [0] * 64
    a = 1
    for i in range(63):
        exp[i] = a
        log[a] = i
        a <<= 1
        if a & 0x40:
            a ^= GF64_PRIMITIVE
    for i in range(63, 126):
        exp[i] = exp[i - 63]
    return exp, log


def _gf64_mul(a: int, b: int, exp, log) -> int:
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


def _minimal_polynomial(power: int, exp, log) -> int:
    """Minimal polynomial of alpha^power over GF(2), as a bit-packed integer."""
    coset = []
    e = power % 63
    while e not in coset:
        coset.append(e)
        e = (2 * e) % 63
    # coefficients in GF(64), lowest degree first
    poly = [1]
    for e in coset:
        root = exp[e]
        nxt = [0] * (len(poly) + 1)
        for d, coef in enumerate(poly):
            nxt[d + 1] ^= coef
            nxt[d] ^= _gf64_mul(coef, root, exp, log)
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise ArithmeticError("minimal polynomial has coefficients outside GF(2)")
    return sum(c << d for d, c in enumerate(poly))


def _poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, b: int) -> tuple[int, int]:
    """Quotient and remainder of GF(2) polynomials packed as integers."""
    q = 0
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        shift = a.bit_length() - 1 - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def bch_generator_polynomial() -> int:
    """g(x) = lcm of the minimal polynomials of alpha, alpha^3, alpha^5, alpha^7."""
    exp, log = _gf64_tables()
    g = 1
    seen = set()
    for power in (1, 3, 5, 7):
        mp = _minimal_polynomial(power, exp, log)
        if mp not in seen:
            seen.add(mp)
            g = _poly_mul(g, mp)
    return g


def bch_63_39() -> CodeSpec:
    """Narrow-sense binary BCH code, n = 63, designed distance 9.

    The parity-check rows are the 24 cyclic shifts ``x^i h*(x)`` of the
    reciprocal check polynomial ``h(x) = (x^63 + 1) / g(x)``.
    """
    n = 63
    g = bch_generator_polynomial()
    h, rem = poly_mod((1 << n) | 1, g)
    if rem:
        raise ArithmeticError("generator polynomial does not divide x^63 + 1")
    deg_h = h.bit_length() - 1
    h_rec = int(format(h, f"0{deg_h + 1}b")[::-1], 2)
    m = n - deg_h
    return CodeSpec("bch_63_39", BinaryMatrix(tuple(h_rec << i for i in range(m)), n))


# --- registry ----------------------------------------------------------------

def _hamming(r: int) -> BinaryMatrix:
    n = (1 << r) - 1
    # column j is the binary expansion of j + 1
    arr = np.array([[((j + 1) >> (r - 1 - i)) & 1 for j in range(n)] for i in range(r)], dtype=np.uint8)
    return BinaryMatrix.from_array(arr)


_BUILTIN = {
    "hamming_7_4": lambda: CodeSpec("hamming_7_4", _hamming(3)),
    "hamming_15_11": lambda: CodeSpec("hamming_15_11", _hamming(4)),
    "rep_3_1": lambda: CodeSpec("rep_3_1", BinaryMatrix.from_array([[1, 1, 0], [0, 1, 1]])),
    "spc_8_7": lambda: CodeSpec("spc_8_7", BinaryMatrix.from_array([[1] * 8])),
    "bch_63_39": bch_63_39,
}


def _asset_names() -> list[str]:
    data = resources.files("sepdecode") / "data"
    return sorted(p.name[: -len(".alist")] for p in data.iterdir() if p.name.endswith(".alist"))


def available_codes() -> list[str]:
    return sorted(set(_BUILTIN) | set(_asset_names()))


def builtin(name: str) -> CodeSpec:
    if name in _BUILTIN:
        return _BUILTIN[name]()
    if name in _asset_names():
        text = (resources.files("sepdecode") / "data" / f"{name}.alist").read_text()
        return parse_alist(text, name=name)
    raise KeyError(f"unknown code {name!r}; available: {', '.join(available_codes())}")


def load_code(source: str) -> CodeSpec:
    """Resolve a built-in name or a path to an alist file."""
    path = Path(source)
    if path.suffix == ".alist" or path.is_file():
        if not path.is_file():
            raise FileNotFoundError(f"no alist file at {source}")
        return read_alist(path)
    return builtin(source)
