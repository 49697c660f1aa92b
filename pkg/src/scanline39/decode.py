"""Receiving-side pipeline: symbol stream -> 36 width flags -> card code.

Stages, in order:

1. ``correct_errors``: short black dropouts inside white are painted white.
2. ``run_lengths``: one entry per contiguous block of equal symbols.
3. ``trim_quiet_zones``: drop the white margins.
4. ``split_merged_runs``: un-merge the bars that meet at digit boundaries.
5. ``threshold_classify``: midpoint of min and max run length separates
   wide from narrow.
6. ``decode_card``: maximum-match each 9-element group.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations, groupby
from typing import Sequence

from scanline39.code39 import (
    CARD_DIGITS,
    CARD_ELEMENTS,
    DIGIT_ELEMENTS,
    CardCode,
    MatchResult,
    decode_card,
    pattern_str,
)
from scanline39.scanline import S0, S5, Run, round_half_up

CORRECTION_MODES = ("on", "off", "symmetric")

# element index of the last bar of digits 1..3
_BOUNDARY_ELEMENTS = tuple(DIGIT_ELEMENTS * j - 1 for j in range(1, CARD_DIGITS))


class RunCountError(ValueError):
    pass


class FailureReason(enum.Enum):
    NONE = "none"
    BAD_RUN_COUNT = "bad_run_count"
    AMBIGUOUS_DIGIT = "ambiguous_digit"


def run_lengths(s: str) -> list[Run]:
    return [Run(sym, len(list(grp))) for sym, grp in groupby(s)]


def _expand(runs: Sequence[Run]) -> str:
    return "".join(r.symbol * r.length for r in runs)


def correct_errors(s: str, symmetric: bool = False) -> str:
    """Fill black runs of one or two symbols that sit between white symbols.

    Decisions are taken on the run structure of the input, in one pass, so
    a fill never enables another fill. With ``symmetric`` the mirror rule
    (short white runs between black) is applied in the same pass.
    """
    runs = run_lengths(s)
    out = list(runs)
    for i in range(1, len(runs) - 1):
        r = runs[i]
        if r.length > 2:
            continue
        if r.symbol == S0 and runs[i - 1].symbol == S5 and runs[i + 1].symbol == S5:
            out[i] = Run(S5, r.length)
        elif symmetric and r.symbol == S5 and runs[i - 1].symbol == S0 and runs[i + 1].symbol == S0:
            out[i] = Run(S0, r.length)
    return _expand(out)


def trim_quiet_zones(runs: Sequence[Run]) -> list[Run]:
    runs = list(runs)
    if runs and runs[0].symbol == S5:
        runs = runs[1:]
    if runs and runs[-1].symbol == S5:
        runs = runs[:-1]
    return runs


def _boundary_indices(merged: Sequence[int]) -> list[int]:
    """Run indices of the merged boundary runs, boundaries numbered 0..2."""
    return [_BOUNDARY_ELEMENTS[b] - sum(1 for m in merged if m < b) for b in merged]


def _width_estimates(lengths: Sequence[int]) -> tuple[float, float]:
    lo, hi = min(lengths), max(lengths)
    cut = (lo + hi) / 2
    narrow = [x for x in lengths if x <= cut]
    wide = [x for x in lengths if x > cut]
    n_est = sum(narrow) / len(narrow)
    w_est = sum(wide) / len(wide) if wide else n_est
    return n_est, w_est


def split_merged_runs(runs: Sequence[Run], expected_elements: int = CARD_ELEMENTS) -> list[Run]:
    """Split the black runs formed where one digit's last bar meets the next digit's first bar.

    With ``36 - k`` runs (k in 1..3) the k merged boundaries are chosen among
    the three digit boundaries; each candidate must be black and at least
    1.5 narrow widths long, and the longest admissible choice wins. A merged
    run whose length matches narrow+narrow or wide+wide is halved. A
    narrow+wide run is cut in proportion to the width estimates, with the
    wide half placed on the side whose digit still lacks a wide bar (every
    digit has exactly two). Anything else is returned unchanged.
    """
    runs = list(runs)
    k = expected_elements - len(runs)
    if k == 0 or expected_elements != CARD_ELEMENTS or k not in (1, 2, 3):
        return runs

    best = None
    for merged in combinations(range(CARD_DIGITS - 1), k):
        idx = _boundary_indices(merged)
        if any(runs[i].symbol != S0 for i in idx):
            continue
        others = [r.length for i, r in enumerate(runs) if i not in idx]
        n_est, w_est = _width_estimates(others)
        if any(runs[i].length < 1.5 * n_est for i in idx):
            continue
        total = sum(runs[i].length for i in idx)
        if best is None or total > best[0]:
            best = (total, idx, n_est, w_est)
    if best is None:
        return runs

    _, idx, n_est, w_est = best
    cut = (n_est + w_est) / 2
    out: list[Run] = []
    for i, r in enumerate(runs):
        if i not in idx:
            out.append(r)
            continue
        # bars of the digit on the left: elements 0, 2, 4, 6 of its group
        start = len(out) - (DIGIT_ELEMENTS - 1)
        left_wide = sum(out[start + e].length > cut for e in (0, 2, 4, 6))
        sums = {"nn": 2 * n_est, "nw": n_est + w_est, "ww": 2 * w_est}
        kind = min(sums, key=lambda key: abs(sums[key] - r.length))
        if kind == "nw" and left_wide in (1, 2):
            narrow = round_half_up(r.length * n_est / (n_est + w_est))
            narrow = min(max(narrow, 1), r.length - 1)
            first, second = (r.length - narrow, narrow) if left_wide == 1 else (narrow, r.length - narrow)
        else:
            first, second = (r.length + 1) // 2, r.length // 2
        out.append(Run(S0, first))
        out.append(Run(S0, second))
    return out


def threshold_classify(runs: Sequence[Run]) -> tuple[tuple[int, ...], float]:
    if len(runs) != CARD_ELEMENTS:
        raise RunCountError(f"expected {CARD_ELEMENTS} runs, got {len(runs)}")
    lengths = [r.length for r in runs]
    t = (min(lengths) + max(lengths)) / 2
    return tuple(1 if x > t else 0 for x in lengths), t


@dataclass
class DecodeReport:
    card: CardCode | None
    matches: list[MatchResult] = field(default_factory=list)
    threshold_used: float | None = None
    run_count_observed: int = 0
    failure_reason: FailureReason = FailureReason.NONE
    bits: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.failure_reason is FailureReason.NONE

    def render(self) -> str:
        lines = [f"runs observed: {self.run_count_observed}"]
        if self.bits is not None:
            groups = [
                pattern_str(self.bits[i : i + DIGIT_ELEMENTS])
                for i in range(0, CARD_ELEMENTS, DIGIT_ELEMENTS)
            ]
            lines.append(f"threshold: {self.threshold_used:g}")
            lines.append("bits: " + " ".join(groups))
            for pos, (grp, m) in enumerate(zip(groups, self.matches), 1):
                flag = " (ambiguous)" if m.ambiguous else ""
                lines.append(f"digit {pos}: {grp} -> {m.digit}  matched {m.score}/9{flag}")
        lines.append(f"result: {self.card if self.card is not None else '----'}")
        if not self.ok:
            lines.append(f"failure: {self.failure_reason.value}")
        return "\n".join(lines)

    def to_record(self) -> str:
        card = str(self.card) if self.card is not None else ""
        t = f"{self.threshold_used:g}" if self.threshold_used is not None else ""
        scores = ";".join(str(m.score) for m in self.matches)
        return f"{card},{self.failure_reason.value},{t},{self.run_count_observed},{scores}"


def decode_stream(s: str, strict: bool = True, correction: str = "on") -> DecodeReport:
    if correction not in CORRECTION_MODES:
        raise ValueError(f"correction must be one of {CORRECTION_MODES}")
    if correction != "off":
        s = correct_errors(s, symmetric=correction == "symmetric")
    runs = trim_quiet_zones(run_lengths(s))
    observed = len(runs)
    runs = split_merged_runs(runs)
    try:
        bits, t = threshold_classify(runs)
    except RunCountError:
        return DecodeReport(None, run_count_observed=observed, failure_reason=FailureReason.BAD_RUN_COUNT)
    card, matches = decode_card(bits)
    report = DecodeReport(card, matches, t, observed, FailureReason.NONE, bits)
    if strict and any(m.ambiguous for m in matches):
        report.card = None
        report.failure_reason = FailureReason.AMBIGUOUS_DIGIT
    return report
