import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sepdecode.channel import ChannelConfig, frame_rng, receive
from sepdecode.codes import builtin
from sepdecode.decoders import Status, decode_separation
from sepdecode.estimators import (
    AdaptiveLPDecoder,
    BPDecoder,
    ExplicitLPDecoder,
    MLDecoder,
    SeparationDecoder,
)

ALL = [SeparationDecoder, AdaptiveLPDecoder, ExplicitLPDecoder, BPDecoder, MLDecoder]


def noisy(code, snr, count, seed=0):
    cfg = ChannelConfig(snr)
    return np.array([receive(np.zeros(code.n, np.uint8), cfg, frame_rng(seed, 0, f)).c
                     for f in range(count)])


@pytest.mark.parametrize("cls", ALL)
def test_fit_predict_shapes(cls, hamming74):
    X = noisy(hamming74, 3.0, 12)
    dec = cls().fit(hamming74)
    words = dec.predict(X)
    assert words.shape == (12, 7) and words.dtype == np.uint8
    assert dec.predict(X[0]).shape == (7,)
    assert dec.n_features_in_ == 7


@pytest.mark.parametrize("cls", ALL)
def test_clone_round_trips_params(cls):
    dec = cls()
    assert clone(dec).get_params() == dec.get_params()


@pytest.mark.parametrize("source", ["hamming_7_4", [[1, 1, 0], [0, 1, 1]]])
def test_fit_accepts_names_and_arrays(source):
    dec = SeparationDecoder().fit(source)
    assert dec.code_.n in (3, 7)


def test_unfitted():
    with pytest.raises(NotFittedError):
        SeparationDecoder().predict(np.ones((1, 7)))


def test_input_validation(hamming74):
    dec = SeparationDecoder().fit(hamming74)
    with pytest.raises(ValueError):
        dec.predict(np.ones((2, 6)))
    with pytest.raises(ValueError):
        dec.predict([[np.inf] * 7])
    with pytest.raises(ValueError):
        dec.decode(np.ones((2, 7)))
    with pytest.raises(ValueError):
        SeparationDecoder().fit([[0, 2, 1]])


def test_params_reach_decoder(rep3):
    dec = SeparationDecoder(max_iterations=1).fit(rep3)
    assert dec.decode([-1.0, 0.4, 0.4]).status is Status.FAILURE_LIMIT
    with pytest.raises(ValueError):
        SeparationDecoder(strategy="best").fit(rep3)
    with pytest.raises(ValueError):
        MLDecoder(method="greedy").fit(rep3)
    with pytest.raises(ValueError):
        ExplicitLPDecoder().fit(builtin("bch_63_39"))


def test_predict_agrees_with_function(hamming1511):
    X = noisy(hamming1511, 1.0, 30, seed=3)
    words = SeparationDecoder().fit(hamming1511).predict(X)
    for c, w in zip(X, words):
        out = decode_separation(hamming1511, c)
        expected = (c < 0) if out.word is None else out.word
        assert np.array_equal(w, expected)


def test_score(hamming1511):
    X = noisy(hamming1511, 2.0, 200, seed=4)
    y = np.zeros_like(X, dtype=np.uint8)
    ml = MLDecoder().fit(hamming1511).score(X, y)
    sep = SeparationDecoder().fit(hamming1511).score(X, y)
    assert 0.5 < sep <= ml <= 1.0
    with pytest.raises(ValueError):
        MLDecoder().fit(hamming1511).score(X, y[:, :3])
