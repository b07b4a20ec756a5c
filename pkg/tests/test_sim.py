import csv
import io

import numpy as np
import pytest

from sepdecode.codes import builtin
from sepdecode.sim import (
    CSV_COLUMNS,
    DecoderSpec,
    PointResult,
    Statistic,
    SweepConfig,
    SweepResult,
    paired_compare,
    run_sweep,
    write_csv,
    write_summary,
)

GOLDEN_HEADER = ("snr_db,frames,frame_errors,fer,lp_min,lp_avg,lp_max,"
                 "gom_min,gom_avg,gom_max,rpc_min,rpc_avg,rpc_max\n")


def test_noiseless_proxy(hamming74):
    res = run_sweep(SweepConfig(hamming74, "sep", (20.0,), 1, 100, seed=1))
    (p,) = res.points
    assert p.frames == 100 and p.fer == 0
    assert p.lps_solved == Statistic(1.0, 1.0, 1.0)


def test_deterministic(hamming1511):
    cfg = SweepConfig(hamming1511, "sep", (1.0, 2.0), 20, 500, seed=123)
    a, b = run_sweep(cfg), run_sweep(cfg)
    assert a == b
    assert write_csv(a) == write_csv(b)


def test_worker_count_irrelevant(hamming1511):
    cfg = SweepConfig(hamming1511, "sep", (1.0, 3.0), 15, 400, seed=9)
    assert run_sweep(cfg) == run_sweep(cfg, workers=2)


def test_early_stop_exact(hamming1511):
    cfg = SweepConfig(hamming1511, "adaptive", (0.0,), 10, 5000, seed=2)
    (p,) = run_sweep(cfg).points
    assert p.frame_errors == 10 and p.frames < 5000
    longer = SweepConfig(hamming1511, "adaptive", (0.0,), 11, 5000, seed=2)
    assert run_sweep(longer).points[0].frames > p.frames


def test_statistic_invariants(hamming1511):
    res = run_sweep(SweepConfig(hamming1511, "sep", (0.0, 2.0), 30, 800, seed=4))
    for p in res.points:
        assert p.fer == p.frame_errors / p.frames
        for st in (p.lps_solved, p.gomory_cuts, p.rpc_cuts):
            assert st.min <= st.avg <= st.max


def test_random_codeword_mode(hamming1511):
    zero = run_sweep(SweepConfig(hamming1511, "sep", (1.0,), 40, 2000, seed=5))
    rand = run_sweep(SweepConfig(hamming1511, "sep", (1.0,), 40, 2000, seed=5,
                                 transmit_mode="random_codeword"))
    # different noise draws, same channel: the two FERs agree statistically
    a, b = zero.points[0].fer, rand.points[0].fer
    assert abs(a - b) < 4 * np.sqrt(max(a, b) / min(zero.points[0].frames, rand.points[0].frames))


def test_table_sanity_high_snr():
    code = builtin("ldpc_32_16")
    (p,) = run_sweep(SweepConfig(code, "sep", (5.8,), 1, 300, seed=3)).points
    assert p.lps_solved.min == 1
    assert 1 <= p.lps_solved.avg <= 6


def test_config_validation(hamming74):
    with pytest.raises(ValueError):
        SweepConfig(hamming74, "sep", (2.0, 1.0))
    with pytest.raises(ValueError):
        SweepConfig(hamming74, "sep", (1.0,), min_frame_errors=0)
    with pytest.raises(ValueError):
        SweepConfig(hamming74, "sep", (1.0,), transmit_mode="gray")
    with pytest.raises(ValueError):
        SweepConfig(hamming74, "viterbi")
    with pytest.raises(ValueError):
        DecoderSpec("adaptive", strategy="first")


class TestPaired:
    def test_shared_frames_and_dominance(self, hamming1511):
        cfg = SweepConfig(hamming1511, snr_points=(1.0, 2.0, 3.0), min_frame_errors=30,
                          max_frames=3000, seed=8)
        paired = paired_compare(cfg, ["sep", "adaptive", "ml"])
        sep, ad, ml = (paired[k] for k in ("sep", "adaptive", "ml"))
        for s, a, m, errs in zip(sep.points, ad.points, ml.points, paired.errors):
            assert s.frames == a.frames == m.frames == errs.shape[0]
            assert m.fer <= s.fer <= a.fer
            assert errs.sum(axis=0).tolist() == [s.frame_errors, a.frame_errors, m.frame_errors]

    def test_single_decoder_is_run_sweep(self, hamming1511):
        cfg = SweepConfig(hamming1511, "sep", (1.0, 2.0), 20, 1000, seed=6)
        paired = paired_compare(cfg, ["sep"])
        assert paired["sep"] == run_sweep(cfg)

    def test_every_decoder_reaches_target(self, hamming1511):
        cfg = SweepConfig(hamming1511, snr_points=(1.0,), min_frame_errors=25, max_frames=5000, seed=1)
        paired = paired_compare(cfg, ["sep", "ml"])
        errors = [paired[k].points[0].frame_errors for k in ("sep", "ml")]
        assert min(errors) == 25

    def test_duplicate_labels_rejected(self, hamming74):
        with pytest.raises(ValueError):
            paired_compare(SweepConfig(hamming74), ["sep", "separation"])


class TestCsv:
    def test_empty_sweep(self):
        assert write_csv(SweepResult("sep")) == GOLDEN_HEADER

    def test_column_order(self):
        assert ",".join(CSV_COLUMNS) + "\n" == GOLDEN_HEADER

    def test_round_trip(self):
        st = Statistic(1.0, 1.8723456789, 6.0)
        p = PointResult(5.8, 1000, 3, 0, st, Statistic(0, 0.25, 2), Statistic(0, 0.5, 4))
        text = write_csv(SweepResult("sep", (p,)))
        row = next(csv.DictReader(io.StringIO(text)))
        assert float(row["snr_db"]) == 5.8 and int(row["frames"]) == 1000
        assert float(row["fer"]) == 0.003
        assert row["lp_avg"] == "1.87235"
        assert float(row["rpc_max"]) == 4

    def test_golden_row(self):
        p = PointResult(2.0, 3, 1, 0, Statistic(1, 4 / 3, 2), Statistic(0, 1 / 3, 1), Statistic(0, 0, 0))
        assert write_csv(SweepResult("sep", (p,))).splitlines()[1] == "2,3,1,0.333333,1,1.33333,2,0,0.333333,1,0,0,0"

    def test_sink(self):
        buf = io.StringIO()
        write_csv(SweepResult("sep"), buf)
        assert buf.getvalue() == GOLDEN_HEADER

    def test_summary(self, hamming74):
        cfg = SweepConfig(hamming74, snr_points=(3.0,), min_frame_errors=5, max_frames=300, seed=2)
        text = write_summary(paired_compare(cfg, ["sep", "bp"]))
        assert text.splitlines()[0] == "snr_db,frames,fer_sep,fer_bp"
