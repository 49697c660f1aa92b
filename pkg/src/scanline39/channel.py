"""Seeded symbol-flip channel standing in for the wired and wireless links.

Each symbol is flipped ('0' <-> '5') independently with ``flip_prob``. The
flip mask is exposed separately so a realized corruption can be replayed.
Monte Carlo callers derive one seed per trial as ``base_seed + trial_index``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scanline39.scanline import validate_stream

_SWAP_SUM = ord("0") + ord("5")


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelPreset:
    name: str
    flip_prob: float
    burst: bool = False

    def __post_init__(self):
        if self.name not in ("wired", "wireless", "custom"):
            raise ChannelError(f"unknown preset name {self.name!r}")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ChannelError(f"flip_prob must lie in [0, 1], got {self.flip_prob}")

    @classmethod
    def custom(cls, flip_prob: float, burst: bool = False) -> "ChannelPreset":
        return cls("custom", flip_prob, burst)


# measured link error rates: ~0.5% over the serial cable, 5% over the radio
WIRED = ChannelPreset("wired", 0.005)
WIRELESS = ChannelPreset("wireless", 0.05)
NOISELESS = ChannelPreset.custom(0.0)

PRESETS = {"none": NOISELESS, "wired": WIRED, "wireless": WIRELESS}


def flip_mask(length: int, flip_prob: float, seed, burst: bool = False) -> np.ndarray:
    """Boolean mask of positions to flip.

    In burst mode a flip event starts at each position with probability
    ``flip_prob / 1.5`` and covers 1 or 2 symbols (equally likely), which
    keeps the mean per-symbol flip rate near ``flip_prob``.
    """
    if not 0.0 <= flip_prob <= 1.0:
        raise ChannelError(f"flip_prob must lie in [0, 1], got {flip_prob}")
    rng = np.random.default_rng(seed)
    u = rng.random(length)
    if not burst:
        return u < flip_prob
    starts = u < min(flip_prob / 1.5, 1.0)
    doubles = starts & (rng.random(length) < 0.5)
    mask = starts.copy()
    mask[1:] |= doubles[:-1]
    return mask


def apply_mask(s: str, mask: np.ndarray) -> str:
    if len(mask) != len(s):
        raise ChannelError("mask length differs from stream length")
    if not mask.any():
        return s
    arr = np.frombuffer(s.encode("ascii"), dtype=np.uint8).copy()
    arr[mask] = _SWAP_SUM - arr[mask]
    return arr.tobytes().decode("ascii")


def corrupt(s: str, preset: ChannelPreset, seed) -> str:
    validate_stream(s)
    return apply_mask(s, flip_mask(len(s), preset.flip_prob, seed, preset.burst))


def measure_ser(a: str, b: str) -> float:
    """Fraction of positions at which two equal-length streams differ."""
    if len(a) != len(b):
        raise ChannelError(f"stream lengths differ: {len(a)} vs {len(b)}")
    if not a:
        return 0.0
    x = np.frombuffer(a.encode("ascii"), dtype=np.uint8)
    y = np.frombuffer(b.encode("ascii"), dtype=np.uint8)
    return float(np.count_nonzero(x != y)) / len(a)
