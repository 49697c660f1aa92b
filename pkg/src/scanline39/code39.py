"""Code 39 digit table and pattern-level encode/decode.

A card carries four digits, each written as nine wide/narrow elements
(bars at positions 1, 3, 5, 7, 9 and spaces at 2, 4, 6, 8). The card is
the plain concatenation of the four groups: no start/stop characters and
no inter-character gaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

DIGIT_ELEMENTS = 9
CARD_DIGITS = 4
CARD_ELEMENTS = DIGIT_ELEMENTS * CARD_DIGITS

# 1 means wide, 0 means narrow
TABLE: dict[int, tuple[int, ...]] = {
    d: tuple(int(c) for c in row)
    for d, row in enumerate(
        [
            "000110100",
            "100100001",
            "001100001",
            "101100000",
            "000110001",
            "100110000",
            "001110000",
            "000100101",
            "100100100",
            "001100100",
        ]
    )
}

# Checked against a brute-force scan over all 45 row pairs in the tests.
MIN_TABLE_DISTANCE = 2


class Code39Error(ValueError):
    """Raised for out-of-range digits, malformed codes and wrong pattern lengths."""


@dataclass(frozen=True)
class CardCode:
    digits: tuple[int, ...]

    def __post_init__(self):
        if len(self.digits) != CARD_DIGITS:
            raise Code39Error(f"card code needs {CARD_DIGITS} digits, got {len(self.digits)}")
        for d in self.digits:
            if isinstance(d, bool) or not isinstance(d, int) or not 0 <= d <= 9:
                raise Code39Error(f"invalid digit {d!r}")

    @classmethod
    def parse(cls, text: str) -> "CardCode":
        if len(text) != CARD_DIGITS or not all(c in "0123456789" for c in text):
            raise Code39Error(f"card code must be exactly {CARD_DIGITS} decimal digits: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int) -> "CardCode":
        if not 0 <= value <= 9999:
            raise Code39Error(f"card code out of range: {value}")
        return cls.parse(f"{value:04d}")

    def __int__(self) -> int:
        return int(str(self))

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits)


@dataclass(frozen=True)
class MatchResult:
    digit: int
    score: int
    ambiguous: bool


def pattern_str(elements: Sequence[int]) -> str:
    return "".join(str(int(e)) for e in elements)


def encode_digit(d: int) -> tuple[int, ...]:
    if isinstance(d, bool) or not isinstance(d, int) or d not in TABLE:
        raise Code39Error(f"digit out of range: {d!r}")
    return TABLE[d]


def encode_card(code: CardCode | str) -> tuple[int, ...]:
    """Return the 36 width flags for a card (odd positions are bars)."""
    if isinstance(code, str):
        code = CardCode.parse(code)
    out: list[int] = []
    for d in code.digits:
        out.extend(encode_digit(d))
    return tuple(out)


def match_digit(bits: Sequence[int]) -> MatchResult:
    """Resolve nine width flags to the table digit agreeing in the most positions.

    Ties report the smallest tying digit with ``ambiguous`` set.
    """
    if len(bits) != DIGIT_ELEMENTS:
        raise Code39Error(f"digit group needs {DIGIT_ELEMENTS} elements, got {len(bits)}")
    bits = tuple(int(b) for b in bits)
    scores = [sum(a == b for a, b in zip(bits, TABLE[d])) for d in range(10)]
    best = max(scores)
    winners = [d for d, s in enumerate(scores) if s == best]
    return MatchResult(digit=winners[0], score=best, ambiguous=len(winners) > 1)


def decode_card(pattern: Sequence[int]) -> tuple[CardCode, list[MatchResult]]:
    if len(pattern) != CARD_ELEMENTS:
        raise Code39Error(f"card pattern needs {CARD_ELEMENTS} elements, got {len(pattern)}")
    results = [
        match_digit(pattern[i : i + DIGIT_ELEMENTS])
        for i in range(0, CARD_ELEMENTS, DIGIT_ELEMENTS)
    ]
    return CardCode(tuple(r.digit for r in results)), results


def table_distances() -> dict[tuple[int, int], int]:
    return {
        (a, b): sum(x != y for x, y in zip(TABLE[a], TABLE[b]))
        for a, b in combinations(range(10), 2)
    }
