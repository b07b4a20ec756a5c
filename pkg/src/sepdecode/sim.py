"""Monte-Carlo frame error rate sweeps over Es/N0.

Every frame draws its noise (and, in ``random_codeword`` mode, its message)
from a Philox substream keyed by ``(seed, snr_index, frame_index)``. Frames are
decoded in chunks, possibly by several worker processes, and merged in frame
order, so the early-stopping point and every statistic depend only on the
configuration.
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

import numpy as np

from .channel import ChannelConfig, frame_rng, receive
from .codes import CodeSpec
from .decoders import (
    DecodeOutcome,
    SeparationConfig,
    Status,
    decode_adaptive_lp,
    decode_bp,
    decode_lpd_explicit,
    decode_ml,
    decode_separation,
)
from .decoders import _generator
from .lp import SimplexError

DECODERS = ("sep", "lpd", "adaptive", "bp", "ml")
TRANSMIT_MODES = ("all_zero", "random_codeword")
CSV_COLUMNS = ("snr_db", "frames", "frame_errors", "fer",
               "lp_min", "lp_avg", "lp_max",
               "gom_min", "gom_avg", "gom_max",
               "rpc_min", "rpc_avg", "rpc_max")

_ALIASES = {"separation": "sep", "lp": "lpd", "explicit": "lpd", "adaptive_lp": "adaptive"}


@dataclass(frozen=True)
class DecoderSpec:
    """A decoder identifier plus its options, e.g. ``DecoderSpec("sep", strategy="first")``.

    Options by decoder: ``sep`` takes the :class:`SeparationConfig` fields,
    ``adaptive`` takes ``max_iterations``, ``lpd`` takes ``max_degree``,
    ``bp`` takes ``max_iter`` and ``ml`` takes ``method`` and ``node_limit``.
    """

    name: str
    options: tuple[tuple[str, object], ...] = ()

    def __init__(self, name: str, options=(), **kwargs):
        name = _ALIASES.get(name, name)
        if name not in DECODERS:
            raise ValueError(f"unknown decoder {name!r}; choose from {', '.join(DECODERS)}")
        merged = dict(options)
        merged.update(kwargs)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "options", tuple(sorted(merged.items())))
        self.bind()  # surface bad options at construction time

    @property
    def label(self) -> str:
        if not self.options:
            return self.name
        return self.name + "[" + ",".join(f"{k}={v}" for k, v in self.options) + "]"

    def bind(self) -> Callable[[CodeSpec, np.ndarray], DecodeOutcome]:
        opts = dict(self.options)
        if self.name == "sep":
            cfg = SeparationConfig(**opts)
            return lambda code, c: decode_separation(code, c, cfg)
        allowed = {"lpd": {"max_degree"}, "adaptive": {"max_iterations"},
                   "bp": {"max_iter"}, "ml": {"method", "node_limit"}}[self.name]
        extra = set(opts) - allowed
        if extra:
            raise ValueError(f"decoder {self.name!r} does not take {sorted(extra)}")
        fn = {"lpd": decode_lpd_explicit, "adaptive": decode_adaptive_lp,
              "bp": decode_bp, "ml": decode_ml}[self.name]
        return lambda code, c: fn(code, c, **opts)


def _as_decoder(d) -> DecoderSpec:
    return d if isinstance(d, DecoderSpec) else DecoderSpec(str(d))


@dataclass(frozen=True)
class SweepConfig:
    code: CodeSpec
    decoder: DecoderSpec | str = "sep"
    snr_points: tuple[float, ...] = (2.0,)
    min_frame_errors: int = 100
    max_frames: int = 10_000
    seed: int = 0
    transmit_mode: str = "all_zero"

    def __post_init__(self):
        object.__setattr__(self, "decoder", _as_decoder(self.decoder))
        pts = tuple(float(s) for s in self.snr_points)
        object.__setattr__(self, "snr_points", pts)
        if any(not np.isfinite(s) for s in pts):
            raise ValueError("snr_points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("snr_points must be strictly increasing")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be at least 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be at least 1")
        if self.transmit_mode not in TRANSMIT_MODES:
            raise ValueError(f"transmit_mode must be one of {TRANSMIT_MODES}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class Statistic:
    min: float
    avg: float
    max: float

    @classmethod
    def of(cls, values) -> "Statistic":
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            return cls(0.0, 0.0, 0.0)
        return cls(float(v.min()), float(v.mean()), float(v.max()))


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    frames: int
    frame_errors: int
    resource_failures: int
    lps_solved: Statistic
    gomory_cuts: Statistic
    rpc_cuts: Statistic

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


@dataclass(frozen=True)
class SweepResult:
    decoder: str
    points: tuple[PointResult, ...] = ()

    @property
    def fer(self) -> list[float]:
        return [p.fer for p in self.points]


@dataclass(frozen=True)
class PairedResult:
    """Per-decoder sweeps over shared frames, plus the frame-by-decoder error matrices."""

    results: dict[str, SweepResult]
    errors: tuple[np.ndarray, ...] = field(repr=False)  # one (frames, decoders) bool array per SNR

    def __getitem__(self, label: str) -> SweepResult:
        return self.results[label]


# per-frame record: error, resource failure, lps, gomory, rpc
_FIELDS = 5


def _transmitted(code: CodeSpec, mode: str, rng: np.random.Generator) -> np.ndarray:
    if mode == "all_zero":
        return np.zeros(code.n, dtype=np.uint8)
    G = _generator(code.H)
    u = rng.integers(0, 2, size=G.shape[0], dtype=np.uint8)
    return ((u.astype(np.int64) @ G) % 2).astype(np.uint8)


def _frame_record(run, code, c, sent) -> tuple[int, int, int, int, int]:
    try:
        out = run(code, c)
    except SimplexError:
        return 1, 1, 0, 0, 0
    s = out.stats
    error = (not out.success) or out.word is None or not np.array_equal(out.word, sent)
    failed = out.status is Status.FAILURE_LIMIT
    return int(error), int(failed), s.lps_solved, s.gomory_cuts, s.rpc_cuts


def _simulate_chunk(code, decoders, mode, seed, snr_idx, snr_db, start, stop) -> np.ndarray:
    """Records for frames ``start..stop-1``: shape (frames, decoders, fields)."""
    runs = [d.bind() for d in decoders]
    cfg = ChannelConfig(snr_db)
    out = np.zeros((stop - start, len(runs), _FIELDS), dtype=np.int64)
    for f in range(start, stop):
        rng = frame_rng(seed, snr_idx, f)
        sent = _transmitted(code, mode, rng)
        c = receive(sent, cfg, rng).c
        for d, run in enumerate(runs):
            out[f - start, d] = _frame_record(run, code, c, sent)
    return out


def _point(snr_db: float, rec: np.ndarray) -> PointResult:
    return PointResult(snr_db, int(rec.shape[0]), int(rec[:, 0].sum()), int(rec[:, 1].sum()),
                       Statistic.of(rec[:, 2]), Statistic.of(rec[:, 3]), Statistic.of(rec[:, 4]))


def _sweep(cfg: SweepConfig, decoders: Sequence[DecoderSpec], *, workers: int = 1,
           chunk: int = 100, progress_every: int = 1000, progress: TextIO | None = None):
    workers = max(1, int(workers))
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    per_point = []
    try:
        for si, snr in enumerate(cfg.snr_points):
            blocks, errors, done, next_report = [], np.zeros(len(decoders), int), 0, progress_every
            while done < cfg.max_frames:
                bounds = []
                for w in range(workers):
                    lo = done + w * chunk
                    if lo >= cfg.max_frames:
                        break
                    bounds.append((lo, min(lo + chunk, cfg.max_frames)))
                args = [(cfg.code, tuple(decoders), cfg.transmit_mode, int(cfg.seed), si, snr, lo, hi)
                        for lo, hi in bounds]
                if pool is None:
                    parts = [_simulate_chunk(*a) for a in args]
                else:
                    parts = list(pool.map(_simulate_chunk, *zip(*args)))
                block = np.concatenate(parts)
                # truncate at the first frame where every decoder reached the error target
                cum = errors + np.cumsum(block[:, :, 0], axis=0)
                hit = np.flatnonzero((cum >= cfg.min_frame_errors).all(axis=1))
                if hit.size:
                    block = block[: hit[0] + 1]
                blocks.append(block)
                errors = errors + block[:, :, 0].sum(axis=0)
                done += block.shape[0]
                if progress is not None and progress_every > 0:
                    while done >= next_report:
                        print(f"snr {snr:g} dB: {next_report} frames, errors "
                              + " ".join(f"{d.label}={e}" for d, e in zip(decoders, errors)),
                              file=progress, flush=True)
                        next_report += progress_every
                if hit.size:
                    break
            per_point.append(np.concatenate(blocks) if blocks else
                             np.zeros((0, len(decoders), _FIELDS), dtype=np.int64))
    finally:
        if pool is not None:
            pool.shutdown()
    return per_point


def run_sweep(cfg: SweepConfig, *, workers: int = 1, progress_every: int = 1000,
              progress: TextIO | None = None) -> SweepResult:
    """Simulate each SNR point until ``min_frame_errors`` errors or ``max_frames`` frames.

    A frame is an error when the decoder returns a word other than the one sent
    or does not stand behind its output (fractional optimum, iteration limit).
    Resource failures are counted as errors and also tallied separately.
    """
    recs = _sweep(cfg, [cfg.decoder], workers=workers,
                  progress_every=progress_every, progress=progress)
    return SweepResult(cfg.decoder.label,
                       tuple(_point(s, r[:, 0]) for s, r in zip(cfg.snr_points, recs)))


def paired_compare(cfg: SweepConfig, decoders: Sequence, *, workers: int = 1,
                   progress_every: int = 1000, progress: TextIO | None = None) -> PairedResult:
    """Run several decoders on identical received frames.

    ``cfg.decoder`` is ignored. Each SNR point stops at the first frame where
    every decoder has at least ``min_frame_errors`` errors, or at ``max_frames``.
    """
    specs = [_as_decoder(d) for d in decoders]
    if not specs:
        raise ValueError("paired_compare needs at least one decoder")
    labels = [d.label for d in specs]
    if len(set(labels)) != len(labels):
        raise ValueError("decoder labels must be distinct")
    recs = _sweep(cfg, specs, workers=workers, progress_every=progress_every, progress=progress)
    results = {
        label: SweepResult(label, tuple(_point(s, r[:, d]) for s, r in zip(cfg.snr_points, recs)))
        for d, label in enumerate(labels)
    }
    return PairedResult(results, tuple(r[:, :, 0].astype(bool) for r in recs))


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def write_csv(result: SweepResult, sink: TextIO | None = None) -> str:
    """Write the sweep as CSV and return the text; 6 significant digits, dot decimal."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in result.points:
        row = [_fmt(p.snr_db), str(p.frames), str(p.frame_errors), _fmt(p.fer)]
        for st in (p.lps_solved, p.gomory_cuts, p.rpc_cuts):
            row += [_fmt(st.min), _fmt(st.avg), _fmt(st.max)]
        w.writerow(row)
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def write_summary(paired: PairedResult, sink: TextIO | None = None) -> str:
    """Joint FER table: one row per SNR, one ``fer_<label>`` column per decoder."""
    labels = list(paired.results)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["snr_db", "frames"] + [f"fer_{lab}" for lab in labels])
    first = paired.results[labels[0]].points if labels else ()
    for i, p in enumerate(first):
        w.writerow([_fmt(p.snr_db), str(p.frames)]
                   + [_fmt(paired.results[lab].points[i].fer) for lab in labels])
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def default_workers() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


__all__ = ["DecoderSpec", "SweepConfig", "SweepResult", "PointResult", "Statistic", "PairedResult",
           "run_sweep", "paired_compare", "write_csv", "write_summary", "CSV_COLUMNS", "DECODERS"]
