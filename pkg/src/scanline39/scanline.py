"""Synthesis of the raw scanner stream.

The card slides past the IR head at (nearly) constant speed. Each sampled
byte is reported as one symbol: ``'0'`` for black (IR absorbed) and ``'5'``
for white (IR reflected). A symbol stream is therefore a plain ``str``
over the alphabet ``"05"``; on the wire it is one line of those
characters followed by a newline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

S0 = "0"  # black, absorbed
S5 = "5"  # white, reflected
ALPHABET = frozenset(S0 + S5)


class StreamError(ValueError):
    pass


class Run(NamedTuple):
    symbol: str
    length: int


@dataclass(frozen=True)
class ScanConfig:
    narrow_units: int = 8
    wide_ratio: float = 2.5
    quiet_zone: int | None = None  # defaults to 3 * narrow_units
    jitter_pct: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.narrow_units, bool) or not isinstance(self.narrow_units, int):
            raise StreamError("narrow_units must be an integer")
        if self.narrow_units < 1:
            raise StreamError("narrow_units must be >= 1")
        if not self.wide_ratio > 1:
            raise StreamError("wide_ratio must be > 1")
        if self.quiet_zone is None:
            object.__setattr__(self, "quiet_zone", 3 * self.narrow_units)
        if self.quiet_zone < 0:
            raise StreamError("quiet_zone must be >= 0")
        if self.jitter_pct < 0:
            raise StreamError("jitter_pct must be >= 0")
        n = self.narrow_units
        if not n * (1 + self.jitter_pct) < n * self.wide_ratio * (1 - self.jitter_pct):
            raise StreamError(
                "jitter_pct too large: a jittered narrow element could outgrow a wide one"
            )


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def element_symbol(index: int) -> str:
    """Color of element ``index`` (0-based) of a pattern: bars are even, spaces odd."""
    return S0 if index % 2 == 0 else S5


def _element_colors(pattern: Sequence[int]) -> list[str]:
    # colors restart with a bar at every 9-element group
    return [element_symbol(i % 9) for i in range(len(pattern))]


def element_widths(pattern: Sequence[int], cfg: ScanConfig) -> list[int]:
    if cfg.jitter_pct > 0:
        rng = np.random.default_rng(cfg.seed)
        factors = rng.uniform(1 - cfg.jitter_pct, 1 + cfg.jitter_pct, size=len(pattern))
    else:
        factors = np.ones(len(pattern))
    widths = []
    for wide, f in zip(pattern, factors):
        base = cfg.narrow_units * (cfg.wide_ratio if wide else 1)
        widths.append(max(1, round_half_up(base * float(f))))
    return widths


def synthesize(pattern: Sequence[int], cfg: ScanConfig = ScanConfig()) -> str:
    """Render a width pattern into the symbol stream a constant-speed scan would emit."""
    if any(e not in (0, 1) for e in pattern):
        raise StreamError("pattern elements must be 0 (narrow) or 1 (wide)")
    parts = [S5 * cfg.quiet_zone]
    for color, width in zip(_element_colors(pattern), element_widths(pattern, cfg)):
        parts.append(color * width)
    parts.append(S5 * cfg.quiet_zone)
    return "".join(parts)


def expected_run_lengths(pattern: Sequence[int], cfg: ScanConfig = ScanConfig()) -> list[Run]:
    """Runs a jitter-free synthesis produces between the quiet zones.

    Neighbouring elements of the same color (the last bar of one digit and
    the first bar of the next) come out as a single run.
    """
    flat = ScanConfig(cfg.narrow_units, cfg.wide_ratio, 0, 0.0, cfg.seed)
    runs: list[Run] = []
    for color, width in zip(_element_colors(pattern), element_widths(pattern, flat)):
        if runs and runs[-1].symbol == color:
            runs[-1] = Run(color, runs[-1].length + width)
        else:
            runs.append(Run(color, width))
    return runs


def validate_stream(s: str) -> str:
    bad = set(s) - ALPHABET
    if bad:
        raise StreamError(f"symbol stream contains characters other than '0'/'5': {sorted(bad)}")
    return s


def format_stream(s: str) -> str:
    return validate_stream(s) + "\n"


def parse_stream(line: str | bytes) -> str:
    if isinstance(line, bytes):
        line = line.decode("ascii")
    return validate_stream(line.rstrip("\r\n"))

