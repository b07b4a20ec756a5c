import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sepdecode.channel import ChannelConfig, frame_rng, receive
from sepdecode.codes import builtin
from sepdecode.decoders import (
    SeparationConfig,
    Status,
    decode_adaptive_lp,
    decode_bp,
    decode_lpd_explicit,
    decode_ml,
    decode_separation,
    fsi_count,
    osd_incumbent,
)
from sepdecode.gf2 import BinaryMatrix, is_codeword

from conftest import codebook_by_search


def frames(code, snr, count, seed=0):
    cfg = ChannelConfig(snr)
    zero = np.zeros(code.n, np.uint8)
    for f in range(count):
        yield receive(zero, cfg, frame_rng(seed, 0, f)).c


costs7 = arrays(float, 7, elements=st.floats(-4, 4, allow_nan=False).map(lambda v: round(v, 3)))


class TestSeparation:
    def test_noiseless(self, hamming74):
        out = decode_separation(hamming74, np.full(7, 5.0))
        assert out.status is Status.ML_CERTIFIED
        assert not out.word.any()
        assert out.stats.lps_solved == 1
        assert out.cuts == ()

    def test_repetition_example(self, rep3):
        out = decode_separation(rep3, [-1.0, 0.4, 0.4])
        assert out.word.tolist() == [1, 1, 1]
        assert out.certified
        assert out.objective == pytest.approx(-0.2)

    def test_certified_objective_is_ml(self, hamming74, hamming1511):
        for code in (hamming74, hamming1511):
            book = codebook_by_search(code.H).astype(float)
            for c in frames(code, 2.0, 400, seed=1):
                out = decode_separation(code, c)
                if out.certified:
                    assert abs(out.objective - (book @ c).min()) <= 1e-9

    @given(costs7)
    def test_certificate_property(self, c):
        code = builtin("hamming_7_4")
        out = decode_separation(code, c)
        if out.certified:
            book = codebook_by_search(code.H).astype(float)
            assert c @ out.word <= (book @ c).min() + 1e-9

    def test_objective_chain(self, hamming1511):
        for c in frames(hamming1511, 1.0, 300, seed=2):
            trace = []
            sep = decode_separation(hamming1511, c, trace=trace)
            ml = decode_ml(hamming1511, c)
            first, last = trace[0]["objective"], trace[-1]["objective"]
            assert first <= last + 1e-9 <= ml.objective + 2e-9
            assert len(trace) == sep.stats.lps_solved
            s = sep.stats
            if sep.certified and s.lps_solved > 1:
                assert s.gomory_cuts + s.rpc_cuts >= s.lps_solved - 1

    def test_trace_records_cuts(self, rep3):
        trace = []
        out = decode_separation(rep3, [-1.0, 0.4, 0.4], trace=trace)
        assert [e["iteration"] for e in trace] == list(range(1, out.stats.lps_solved + 1))
        logged = [cut for e in trace for cut, _ in e["cuts"]]
        assert logged == list(out.cuts)
        assert all(v > 1e-7 for e in trace for _, v in e["cuts"])

    @given(costs7, st.floats(0.1, 20))
    def test_positive_scaling(self, c, alpha):
        code = builtin("hamming_7_4")
        a = decode_separation(code, c)
        b = decode_separation(code, alpha * c)
        assert a.status == b.status
        if a.certified:
            assert c @ a.word == pytest.approx(c @ b.word, abs=1e-9)

    def test_dominates_lp_decoding(self, hamming1511):
        for c in frames(hamming1511, 1.0, 300, seed=3):
            lpd = decode_adaptive_lp(hamming1511, c)
            if lpd.certified:
                sep = decode_separation(hamming1511, c)
                assert sep.certified
                assert sep.objective == pytest.approx(lpd.objective, abs=1e-9)

    def test_iteration_cap(self, rep3):
        out = decode_separation(rep3, [-1.0, 0.4, 0.4], SeparationConfig(max_iterations=1))
        assert out.status is Status.FAILURE_LIMIT and not out.success

    def test_rpc_disabled_can_fail(self):
        code = builtin("ldpc_32_16")
        statuses = {decode_separation(code, c, SeparationConfig(rpc_enabled=False)).status
                    for c in frames(code, -1.0, 60)}
        assert Status.FAILURE_NO_CUT in statuses

    def test_first_strategy_still_certifies_ml(self, hamming1511):
        book = codebook_by_search(hamming1511.H).astype(float)
        cfg = SeparationConfig(strategy="first")
        for c in frames(hamming1511, 1.5, 200, seed=4):
            out = decode_separation(hamming1511, c, cfg)
            if out.certified:
                assert abs(out.objective - (book @ c).min()) <= 1e-9

    def test_bad_config(self):
        with pytest.raises(ValueError):
            SeparationConfig(strategy="most")
        with pytest.raises(ValueError):
            SeparationConfig(max_iterations=0)

    def test_cost_validation(self, hamming74):
        with pytest.raises(ValueError):
            decode_separation(hamming74, np.ones(6))
        with pytest.raises(ValueError):
            decode_separation(hamming74, [np.nan] * 7)

    def test_channel_symmetry(self, hamming1511):
        # sending codeword w with mirrored noise flips the LLR signs on supp(w)
        book = codebook_by_search(hamming1511.H)
        rng = np.random.default_rng(5)
        for c in frames(hamming1511, 1.0, 200, seed=6):
            w = book[rng.integers(len(book))]
            base = decode_separation(hamming1511, c)
            moved = decode_separation(hamming1511, c * (1.0 - 2.0 * w))
            assert base.status == moved.status
            if base.certified:
                assert np.array_equal(moved.word, base.word ^ w)


class TestLpDecoding:
    def test_constraint_count(self, hamming74):
        assert fsi_count(hamming74.H) == 3 * 2 ** 3
        out = decode_lpd_explicit(hamming74, np.ones(7))
        assert out.stats.fsi_cuts == 24

    def test_noiseless(self, hamming1511):
        out = decode_lpd_explicit(hamming1511, np.full(15, 3.0))
        assert out.certified and not out.word.any()

    def test_matches_adaptive(self, hamming1511):
        for c in frames(hamming1511, 3.0, 200, seed=7):
            a = decode_lpd_explicit(hamming1511, c)
            b = decode_adaptive_lp(hamming1511, c)
            assert a.objective == pytest.approx(b.objective, abs=1e-9)

    def test_degree_guard(self):
        with pytest.raises(ValueError):
            decode_lpd_explicit(builtin("bch_63_39"), np.ones(63))

    def test_adaptive_hard_decision_codeword(self, hamming74):
        c = np.array([-1.0, -2, -1, 3, 2, 1, 4])  # hard decision 1110000
        assert is_codeword(hamming74.H, (c < 0).astype(int))
        out = decode_adaptive_lp(hamming74, c)
        assert out.stats.lps_solved == 1 and out.stats.fsi_cuts == 0
        assert out.word.tolist() == [1, 1, 1, 0, 0, 0, 0]

    def test_adaptive_lower_bounds_ml(self, hamming1511):
        for c in frames(hamming1511, 0.0, 200, seed=11):
            lp = decode_adaptive_lp(hamming1511, c)
            assert lp.objective <= decode_ml(hamming1511, c).objective + 1e-9


class TestML:
    def test_all_positive(self, hamming1511):
        out = decode_ml(hamming1511, np.ones(15))
        assert not out.word.any() and out.certified

    @pytest.mark.parametrize("method", ["brute", "branch_and_bound"])
    def test_repetition(self, rep3, method):
        out = decode_ml(rep3, [-1.0, 0.4, 0.4], method)
        assert out.word.tolist() == [1, 1, 1]
        assert out.objective == pytest.approx(-0.2)

    def test_branch_and_bound_matches_brute(self, hamming1511):
        for c in frames(hamming1511, 0.0, 1000, seed=8):
            a = decode_ml(hamming1511, c, "brute")
            b = decode_ml(hamming1511, c, "branch_and_bound")
            assert abs(a.objective - b.objective) <= 1e-9
            assert is_codeword(hamming1511.H, b.word)

    def test_branch_and_bound_ldpc(self):
        code = builtin("ldpc_32_16")
        for c in frames(code, -1.0, 40, seed=9):
            assert decode_ml(code, c, "bnb").objective == pytest.approx(decode_ml(code, c).objective, abs=1e-9)

    def test_brute_matches_search(self, hamming74):
        book = codebook_by_search(hamming74.H).astype(float)
        for c in frames(hamming74, 0.0, 100):
            assert decode_ml(hamming74, c).objective == pytest.approx((book @ c).min(), abs=1e-12)

    def test_unknown_method(self, hamming74):
        with pytest.raises(ValueError):
            decode_ml(hamming74, np.ones(7), "annealing")

    def test_node_limit(self):
        code = builtin("ldpc_32_16")
        hits = [decode_ml(code, c, "bnb", node_limit=1).status for c in frames(code, -2.0, 30)]
        assert Status.FAILURE_LIMIT in hits

    def test_osd_returns_codeword(self, hamming1511):
        for c in frames(hamming1511, 0.0, 50):
            for order in (0, 1):
                assert is_codeword(hamming1511.H, osd_incumbent(hamming1511.H, c, order))


class TestBP:
    def test_noiseless(self, hamming74):
        out = decode_bp(hamming74, np.full(7, 4.0))
        assert out.status is Status.CODEWORD and out.stats.bp_iterations == 1
        assert out.success and not out.certified

    def test_single_check_flips_weak_bit(self):
        from sepdecode.codes import CodeSpec

        code = CodeSpec("pair", BinaryMatrix.from_array([[1, 1]]))
        out = decode_bp(code, [-5.0, 0.5])
        assert out.word.tolist() == [1, 1]
        # tanh rule on one check: the extrinsic message equals the other LLR
        assert out.x[1] == pytest.approx(0.5 - 5.0)

    def test_not_worse_than_three_times_ml(self, hamming74):
        bp_err = ml_err = 0
        for c in frames(hamming74, 4.0, 10_000, seed=10):
            bp_err += decode_bp(hamming74, c).word.any()
            ml_err += decode_ml(hamming74, c).word.any()
        assert ml_err > 0
        assert bp_err <= 3 * ml_err

    def test_max_iter_validated(self, hamming74):
        with pytest.raises(ValueError):
            decode_bp(hamming74, np.ones(7), max_iter=0)
