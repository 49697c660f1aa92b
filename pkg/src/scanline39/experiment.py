"""Seeded Monte Carlo sweeps over flip probability and correction mode.

Trial ``i`` uses ``trial_seed = base_seed + i``. From it three independent
sub-seeds are drawn (card code, scan jitter, channel), so every
(flip_prob, correction) cell sees the same cards and the same uniform
draws. Sweeps are therefore paired, and a higher flip probability flips a
superset of the symbols flipped at a lower one.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from scanline39.channel import ChannelPreset, corrupt, measure_ser
from scanline39.code39 import CARD_DIGITS, CardCode, encode_card
from scanline39.decode import CORRECTION_MODES, correct_errors, decode_stream
from scanline39.scanline import ScanConfig, synthesize

CSV_HEADER = ("flip_prob", "correction", "trials", "success_rate", "residual_ser", "digit_errors")


@dataclass(frozen=True)
class ExperimentSpec:
    flip_probs: tuple[float, ...] = (0.0, 0.005, 0.02, 0.05)
    trials: int = 1000
    scan: ScanConfig = field(default_factory=ScanConfig)
    corrections: tuple[str, ...] = ("on", "off")
    base_seed: int = 0
    code: CardCode | None = None
    burst: bool = False
    strict: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for p in self.flip_probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"flip probability out of range: {p}")
        for mode in self.corrections:
            if mode not in CORRECTION_MODES:
                raise ValueError(f"unknown correction mode {mode!r}")


@dataclass(frozen=True)
class ExperimentRow:
    flip_prob: float
    correction: str
    trials: int
    success_rate: float
    residual_ser: float
    digit_errors: float

    def as_csv_fields(self) -> list[str]:
        return [
            f"{self.flip_prob:g}",
            self.correction,
            str(self.trials),
            f"{self.success_rate:.6f}",
            f"{self.residual_ser:.6f}",
            f"{self.digit_errors:.6f}",
        ]


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    residual_ser: float
    digit_errors: int


def trial_seeds(trial_seed: int) -> tuple[int, int, int]:
    code_seed, scan_seed, channel_seed = np.random.SeedSequence(trial_seed).generate_state(3)
    return int(code_seed), int(scan_seed), int(channel_seed)


def run_trial(
    trial_seed: int,
    flip_prob: float,
    correction: str,
    scan: ScanConfig = ScanConfig(),
    code: CardCode | None = None,
    burst: bool = False,
    strict: bool = True,
) -> tuple[CardCode, TrialOutcome]:
    code_seed, scan_seed, channel_seed = trial_seeds(trial_seed)
    if code is None:
        code = CardCode.from_int(int(np.random.default_rng(code_seed).integers(0, 10000)))
    clean = synthesize(encode_card(code), replace(scan, seed=scan_seed))
    noisy = corrupt(clean, ChannelPreset.custom(flip_prob, burst), channel_seed)
    received = noisy if correction == "off" else correct_errors(noisy, correction == "symmetric")
    report = decode_stream(noisy, strict=strict, correction=correction)
    if report.card is None:
        wrong = CARD_DIGITS
    else:
        wrong = sum(a != b for a, b in zip(report.card.digits, code.digits))
    return code, TrialOutcome(report.card == code, measure_ser(received, clean), wrong)


def run_cell(spec: ExperimentSpec, flip_prob: float, correction: str) -> ExperimentRow:
    successes = 0
    ser_sum = 0.0
    digit_sum = 0
    for i in range(spec.trials):
        _, out = run_trial(
            spec.base_seed + i, flip_prob, correction, spec.scan, spec.code, spec.burst, spec.strict
        )
        successes += out.success
        ser_sum += out.residual_ser
        digit_sum += out.digit_errors
    n = spec.trials
    return ExperimentRow(flip_prob, correction, n, successes / n, ser_sum / n, digit_sum / n)


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRow]:
    return [run_cell(spec, p, mode) for p in spec.flip_probs for mode in spec.corrections]


def rows_to_csv(rows: list[ExperimentRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_fields())
    return buf.getvalue()


def rows_to_table(rows: list[ExperimentRow]) -> str:
    cells = [list(CSV_HEADER)] + [row.as_csv_fields() for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(CSV_HEADER))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
