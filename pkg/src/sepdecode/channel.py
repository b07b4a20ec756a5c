"""BPSK over AWGN and the LLR cost vector fed to the decoders."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN channel at a given Es/N0 (dB) with unit symbol energy."""

    es_n0_db: float
    sigma: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(np.sqrt(1.0 / (2.0 * 10.0 ** (self.es_n0_db / 10.0)))))


@dataclass(frozen=True)
class ReceivedFrame:
    y: np.ndarray
    c: np.ndarray

    @property
    def hard_decision(self) -> np.ndarray:
        # c == 0 resolves to bit 0
        return (self.c < 0).astype(np.uint8)


def frame_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based substream for one frame, keyed by ``(seed, *key)``.

    Philox is a counter-based generator, so the stream of a given frame does not
    depend on how many other frames were drawn before it or by which worker.
    """
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *key])
    return np.random.Generator(np.random.Philox(ss))


def modulate(x) -> np.ndarray:
    """Bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(x, dtype=float)


def transmit(s, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return s + cfg.sigma * rng.standard_normal(s.shape)


def llr(y, cfg: ChannelConfig) -> np.ndarray:
    """``log P(y|0) / P(y|1) = 2 y / sigma^2``; positive favours bit 0."""
    return 2.0 * np.asarray(y, dtype=float) / cfg.sigma ** 2


def receive(x, cfg: ChannelConfig, rng: np.random.Generator) -> ReceivedFrame:
    y = transmit(modulate(x), cfg, rng)
    return ReceivedFrame(y, llr(y, cfg))
