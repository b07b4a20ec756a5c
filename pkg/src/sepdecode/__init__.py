"""Cutting-plane decoding of binary linear codes by LP separation."""
from .channel import ChannelConfig, frame_rng, llr, modulate, receive, transmit
from .codes import CodeSpec, available_codes, bch_63_39, builtin, load_code, parse_alist, read_alist, write_alist
from .cuts import Cut, forbidden_set_inequality, gomory_cuts, is_integral, rpc_cut_from_row, rpc_cuts
from .decoders import (
    DecodeOutcome,
    FrameStats,
    SeparationConfig,
    Status,
    decode_adaptive_lp,
    decode_bp,
    decode_lpd_explicit,
    decode_ml,
    decode_separation,
    find_violated_fsi,
)
from .estimators import AdaptiveLPDecoder, BPDecoder, ExplicitLPDecoder, MLDecoder, SeparationDecoder
from .gf2 import BinaryMatrix, construct_h_hat, enumerate_codewords, generator_from_h, row_add, syndrome
from .lp import LpProblem, LpSolution, resolve_with_cut, solve
from .sim import DecoderSpec, SweepConfig, SweepResult, paired_compare, run_sweep, write_csv

__version__ = "0.1.0"
