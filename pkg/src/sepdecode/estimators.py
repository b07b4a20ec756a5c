"""Scikit-learn style wrappers around the decoders.

``fit`` binds a code, ``predict`` maps a matrix of channel LLRs (one frame per
row) to decoded words, ``decode`` returns the full outcome for one frame and
``score`` is the fraction of frames decoded correctly.

>>> from sepdecode.estimators import SeparationDecoder
>>> dec = SeparationDecoder().fit("hamming_7_4")
>>> dec.predict([[1.0, 2.0, -0.5, 1.5, 0.7, 1.1, 0.9]])
array([[0, 0, 0, 0, 0, 0, 0]], dtype=uint8)
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_code, check_llrs, check_words
from .cuts import INTEGRALITY_TOL, VIOLATION_TOL
from .decoders import (
    DecodeOutcome,
    SeparationConfig,
    decode_adaptive_lp,
    decode_bp,
    decode_lpd_explicit,
    decode_ml,
    decode_separation,
)
from .lp import FEAS_TOL


class _Decoder(BaseEstimator):
    def fit(self, H, y=None):
        """Bind the code: a CodeSpec, BinaryMatrix, 0/1 array, built-in name or alist path."""
        self.code_ = check_code(H)
        self.n_features_in_ = self.code_.n
        self._validate()
        return self

    def _validate(self):
        pass

    def _run(self, c) -> DecodeOutcome:
        raise NotImplementedError

    def decode(self, c) -> DecodeOutcome:
        check_is_fitted(self, "code_")
        X, _ = check_llrs(c, self.code_.n)
        if X.shape[0] != 1:
            raise ValueError("decode takes a single frame; use decode_many or predict")
        return self._run(X[0])

    def decode_many(self, X) -> list[DecodeOutcome]:
        check_is_fitted(self, "code_")
        X, _ = check_llrs(X, self.code_.n)
        return [self._run(c) for c in X]

    def predict(self, X) -> np.ndarray:
        """Decoded words, shape (frames, n); a frame without a word falls back to hard decision."""
        check_is_fitted(self, "code_")
        X, was_1d = check_llrs(X, self.code_.n)
        out = np.empty(X.shape, dtype=np.uint8)
        for r, c in enumerate(X):
            word = self._run(c).word
            out[r] = (c < 0) if word is None else word
        return out[0] if was_1d else out

    def score(self, X, y) -> float:
        """Fraction of frames whose outcome is trusted by the decoder and equals ``y``."""
        outcomes = self.decode_many(X)
        y = check_words(y, (len(outcomes), self.code_.n))
        hits = [o.success and o.word is not None and np.array_equal(o.word, w)
                for o, w in zip(outcomes, y)]
        return float(np.mean(hits))


class SeparationDecoder(_Decoder):
    """Cutting-plane decoder with Gomory and RPC cuts."""

    def __init__(self, strategy="all", max_iterations=100, rpc_enabled=True,
                 integrality_tol=INTEGRALITY_TOL, violation_tol=VIOLATION_TOL, feas_tol=FEAS_TOL):
        self.strategy = strategy
        self.max_iterations = max_iterations
        self.rpc_enabled = rpc_enabled
        self.integrality_tol = integrality_tol
        self.violation_tol = violation_tol
        self.feas_tol = feas_tol

    def _validate(self):
        self.config_ = SeparationConfig(**self.get_params())

    def _run(self, c):
        return decode_separation(self.code_, c, self.config_)


class AdaptiveLPDecoder(_Decoder):
    def __init__(self, max_iterations=1000, tol=VIOLATION_TOL):
        self.max_iterations = max_iterations
        self.tol = tol

    def _run(self, c):
        return decode_adaptive_lp(self.code_, c, self.max_iterations, self.tol)


class ExplicitLPDecoder(_Decoder):
    """LP decoding with every forbidden set inequality written out up front."""

    def __init__(self, max_degree=12):
        self.max_degree = max_degree

    def _validate(self):
        if self.code_.H.max_check_degree > self.max_degree:
            raise ValueError(f"check degree {self.code_.H.max_check_degree} exceeds max_degree={self.max_degree}")

    def _run(self, c):
        return decode_lpd_explicit(self.code_, c, self.max_degree)


class BPDecoder(_Decoder):
    def __init__(self, max_iter=200):
        self.max_iter = max_iter

    def _run(self, c):
        return decode_bp(self.code_, c, self.max_iter)


class MLDecoder(_Decoder):
    def __init__(self, method="brute", node_limit=200_000):
        self.method = method
        self.node_limit = node_limit

    def _validate(self):
        if self.method not in ("brute", "branch_and_bound", "bnb"):
            raise ValueError(f"unknown ML method {self.method!r}")

    def _run(self, c):
        return decode_ml(self.code_, c, self.method, self.node_limit)


__all__ = ["SeparationDecoder", "AdaptiveLPDecoder", "ExplicitLPDecoder", "BPDecoder", "MLDecoder"]
