"""Input checks shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .codes import CodeSpec, load_code
from .gf2 import BinaryMatrix


def check_code(code) -> CodeSpec:
    """Accept a CodeSpec, a BinaryMatrix, a 0/1 array, a built-in name or an alist path."""
    if isinstance(code, CodeSpec):
        return code
    if isinstance(code, BinaryMatrix):
        return CodeSpec("custom", code)
    if isinstance(code, str):
        return load_code(code)
    H = check_array(code, dtype=None, ensure_min_samples=1, ensure_min_features=1)
    if not np.isin(H, (0, 1)).all():
        raise ValueError("parity-check matrix entries must be 0 or 1")
    return CodeSpec("custom", BinaryMatrix.from_array(H.astype(np.uint8)))


def check_llrs(X, n: int) -> tuple[np.ndarray, bool]:
    """Return ``(X, was_1d)`` with X a finite float matrix of shape (frames, n)."""
    X = np.asarray(X)
    was_1d = X.ndim == 1
    X = check_array(X.reshape(1, -1) if was_1d else X, dtype=np.float64)
    if X.shape[1] != n:
        raise ValueError(f"LLR rows have {X.shape[1]} entries, the code has length {n}")
    return X, was_1d


def check_words(y, shape: tuple[int, int]) -> np.ndarray:
    y = np.asarray(y)
    y = check_array(y.reshape(1, -1) if y.ndim == 1 else y, dtype=None)
    if y.shape != shape:
        raise ValueError(f"reference words have shape {y.shape}, expected {shape}")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("reference words must be binary")
    return y.astype(np.uint8)
