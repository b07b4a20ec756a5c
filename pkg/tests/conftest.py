import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sepdecode.codes import builtin

settings.register_profile(
    "repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def codebook_by_search(H) -> np.ndarray:
    """Every length-n word with zero syndrome, found by scanning all 2^n words.

    Independent of the library's nullspace code, so usable as an oracle.
    """
    A = np.asarray(H.to_array() if hasattr(H, "to_array") else H, dtype=np.int64)
    n = A.shape[1]
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    keep = ((words @ A.T) % 2 == 0).all(axis=1)
    return words[keep].astype(np.uint8)


def lp_oracle(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, bounds=None):
    from scipy.optimize import linprog

    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    assert res.status == 0, res.message
    return res.fun, res.x


@pytest.fixture(scope="session")
def hamming74():
    return builtin("hamming_7_4")


@pytest.fixture(scope="session")
def hamming1511():
    return builtin("hamming_15_11")


@pytest.fixture(scope="session")
def rep3():
    return builtin("rep_3_1")


def ripd_oracle(c, H, cuts=(), lower=None, upper=None):
    """Optimum of the parity relaxation with cuts, computed by HiGHS."""
    from sepdecode.cuts import cut_matrix

    c = np.asarray(c, float)
    n = c.size
    lo = np.zeros(n) if lower is None else lower
    hi = np.ones(n) if upper is None else upper
    bounds = list(zip(lo, hi))
    A_ub = b_ub = None
    if cuts:
        A, b = cut_matrix(list(cuts), n)
    if H is None:
        if cuts:
            A_ub, b_ub = A, b
        return lp_oracle(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds)
    m = H.m
    A_eq = np.hstack([H.to_array().astype(float), -2.0 * np.eye(m)])
    if cuts:
        A_ub, b_ub = np.hstack([A, np.zeros((len(b), m))]), b
    fun, xz = lp_oracle(np.concatenate([c, np.zeros(m)]), A_eq=A_eq, b_eq=np.zeros(m),
                        A_ub=A_ub, b_ub=b_ub, bounds=bounds + [(0, None)] * m)
    return fun, xz[:n]


def violated_rpc_fsis(H, x, rng, tries=40, tol=1e-7):
    """Violated forbidden set inequalities of random GF(2) row combinations of H."""
    from sepdecode.cuts import most_violated_fsi

    A = H.to_array()
    found = []
    for _ in range(tries):
        mix = rng.integers(0, 2, size=H.m)
        if not mix.any():
            continue
        support = np.flatnonzero((mix @ A) % 2)
        cut = most_violated_fsi(support, x, tol=tol)
        if cut is not None and cut not in found:
            found.append(cut)
    return found


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
