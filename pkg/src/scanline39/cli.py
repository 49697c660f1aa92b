"""Command line entry point.

Exit codes: 0 success / accept, 1 domain failure / reject, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from scanline39 import auth
from scanline39.channel import PRESETS, ChannelPreset, corrupt
from scanline39.code39 import Code39Error, CardCode, encode_card, pattern_str
from scanline39.decode import CORRECTION_MODES, decode_stream
from scanline39.experiment import (
    ExperimentSpec,
    rows_to_csv,
    rows_to_table,
    run_experiment,
    trial_seeds,
)
from scanline39.scanline import ScanConfig, StreamError, format_stream, parse_stream, synthesize

SEED_ENV = "SCANLINE39_SEED"
PASSWORD_ENV = "SCANLINE39_DEVICE_PASSWORD"
FACTORY_ENV = "SCANLINE39_FACTORY_CODE"


def _card(text: str) -> CardCode:
    try:
        return CardCode.parse(text)
    except Code39Error as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _prob(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1]: {text}")
    return p


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV} must be an integer, got {raw!r}") from None


def render_bars(pattern) -> str:
    # bars as '#', spaces as '.', wide elements take three columns
    out = []
    for i, wide in enumerate(pattern):
        ch = "#" if (i % 9) % 2 == 0 else "."
        out.append(ch * (3 if wide else 1))
    return "".join(out)


def _scan_config(args, seed: int = 0) -> ScanConfig:
    try:
        return ScanConfig(
            narrow_units=args.narrow_units,
            wide_ratio=args.wide_ratio,
            quiet_zone=args.quiet_zone,
            jitter_pct=args.jitter,
            seed=seed,
        )
    except StreamError as exc:
        args.parser.error(str(exc))


def _channel(args) -> ChannelPreset:
    if args.flip_prob is not None:
        return ChannelPreset.custom(args.flip_prob, args.burst)
    preset = PRESETS[args.channel]
    if args.burst:
        preset = ChannelPreset(preset.name, preset.flip_prob, True)
    return preset


def cmd_encode(args) -> int:
    pattern = encode_card(args.code)
    print(pattern_str(pattern))
    for i in range(0, len(pattern), 9):
        print(f"  {args.code.digits[i // 9]}: {pattern_str(pattern[i:i + 9])}")
    print(render_bars(pattern))
    return 0


def cmd_scan(args) -> int:
    _, scan_seed, channel_seed = trial_seeds(args.seed)
    stream = synthesize(encode_card(args.code), _scan_config(args, scan_seed))
    stream = corrupt(stream, _channel(args), channel_seed)
    sys.stdout.write(format_stream(stream))
    return 0


def cmd_decode(args) -> int:
    if args.input == "-":
        data = sys.stdin.buffer.readline()
    else:
        with open(args.input, "rb") as fh:
            data = fh.readline()
    try:
        stream = parse_stream(data)
    except (StreamError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = decode_stream(stream, strict=args.strict, correction=args.correction)
    print(report.to_record() if args.record else report.render())
    return 0 if report.ok else 1


def cmd_pipeline(args) -> int:
    try:
        with open(args.db, "rb") as fh:
            db = auth.load_db(fh)
    except (OSError, auth.DbParseError, Code39Error) as exc:
        print(f"error: {args.db}: {exc}", file=sys.stderr)
        return 1
    _, scan_seed, channel_seed = trial_seeds(args.seed)
    clean = synthesize(encode_card(args.code), _scan_config(args, scan_seed))
    received = corrupt(clean, _channel(args), channel_seed)
    report = decode_stream(received, strict=args.strict, correction=args.correction)
    print(report.render())

    name = auth.authenticate(report.card, db) if report.card is not None else None
    if args.log and report.card is not None and (name is not None or not args.success_only):
        entry = auth.LogEntry(report.card, name or auth.DENIED, auth.utc_now())
        with open(args.log, "ab") as sink:
            auth.append_log(entry, sink)
    if name is None:
        print("REJECT")
        return 1
    print(f"ACCEPT {name}")
    return 0


def cmd_experiment(args) -> int:
    spec = ExperimentSpec(
        flip_probs=tuple(args.flip_prob or (0.0, 0.005, 0.02, 0.05)),
        trials=args.trials,
        scan=_scan_config(args),
        corrections=tuple(args.correction or ("on", "off")),
        base_seed=args.seed,
        code=args.code,
        burst=args.burst,
        strict=args.strict,
    )
    rows = run_experiment(spec)
    sys.stdout.write(rows_to_table(rows) if args.table else rows_to_csv(rows))
    return 0


def _load_gate(path: Path) -> auth.PasswordGate:
    password = os.environ.get(PASSWORD_ENV)
    factory = os.environ.get(FACTORY_ENV)
    if password is None or factory is None:
        raise SystemExit(f"error: set {PASSWORD_ENV} and {FACTORY_ENV}")
    if not path.exists():
        return auth.PasswordGate(password, factory)
    data = json.loads(path.read_text())
    return auth.PasswordGate(
        password,
        factory,
        state=auth.GateState(data["state"]),
        attempts_remaining=int(data["attempts_remaining"]),
    )


def _save_gate(path: Path, gate: auth.PasswordGate) -> None:
    state = {"state": gate.state.value, "attempts_remaining": gate.attempts_remaining}
    path.write_text(json.dumps(state) + "\n")


def cmd_gate(args) -> int:
    path = Path(args.state)
    gate = _load_gate(path)
    rc = 0
    if args.action == "attempt":
        gate, outcome = auth.password_attempt(gate, args.secret)
        print(outcome.value)
        rc = 0 if outcome is auth.Outcome.GRANTED else 1
    elif args.action == "reset":
        gate, ok = auth.factory_reset(gate, args.secret)
        print("reset" if ok else "reset refused")
        rc = 0 if ok else 1
    if args.action != "status":
        _save_gate(path, gate)
    print(f"state={gate.state.value} attempts_remaining={gate.attempts_remaining}")
    return rc


def _add_scan_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scan geometry")
    g.add_argument("--narrow-units", type=int, default=8)
    g.add_argument("--wide-ratio", type=float, default=2.5)
    g.add_argument("--quiet-zone", type=int, default=None, help="default: 3 x narrow units")
    g.add_argument("--jitter", type=float, default=0.0, help="per-element width jitter fraction")


def _add_channel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--channel", choices=sorted(PRESETS), default="none")
    p.add_argument("--flip-prob", type=_prob, default=None, help="overrides --channel")
    p.add_argument("--burst", action="store_true", help="flip runs of 1-2 symbols")


def _add_decode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--correction", choices=CORRECTION_MODES, default="on")
    p.add_argument(
        "--strict",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="treat tied digit matches as failure (default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scanline39", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    p = sub.add_parser("encode", help="print the 36 width flags of a card")
    p.add_argument("code", type=_card)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("scan", help="emit the raw '0'/'5' line a scan would send")
    p.add_argument("code", type=_card)
    p.add_argument("--seed", type=int, default=seed)
    _add_channel_flags(p)
    _add_scan_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("decode", help="decode one '0'/'5' line from a file or stdin")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--record", action="store_true", help="single-line machine-readable output")
    _add_decode_flags(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("pipeline", help="encode, scan, transmit, decode and authenticate")
    p.add_argument("code", type=_card)
    p.add_argument("--db", required=True)
    p.add_argument("--log", default=None)
    p.add_argument("--success-only", action="store_true", help="do not log DENIED entries")
    p.add_argument("--seed", type=int, default=seed)
    _add_channel_flags(p)
    _add_decode_flags(p)
    _add_scan_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("experiment", help="Monte Carlo sweep, CSV on stdout")
    p.add_argument("--flip-prob", type=_prob, action="append")
    p.add_argument("--correction", choices=CORRECTION_MODES, action="append")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--code", type=_card, default=None, help="fix the card instead of sampling")
    p.add_argument("--burst", action="store_true")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--table", action="store_true", help="aligned table instead of CSV")
    _add_scan_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gate", help="drive the password gate stored in a state file")
    p.add_argument("action", choices=("attempt", "reset", "status"))
    p.add_argument("secret", nargs="?", default=None)
    p.add_argument("--state", default="gate.json")
    p.set_defaults(func=cmd_gate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.parser = parser
    if args.command == "experiment" and args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.command == "gate" and args.action != "status" and args.secret is None:
        parser.error(f"gate {args.action} needs a secret")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
