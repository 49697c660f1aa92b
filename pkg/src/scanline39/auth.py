"""User database, audit log and the scanner's password gate.

The database is a UTF-8 text file of ``CODE,NAME`` lines; the log is an
append-only file of ``YYYY-MM-DDTHH:MM:SSZ,CODE,NAME`` lines.

Nothing here locks. ``AuthDb`` is immutable once loaded and can be shared;
log appends and gate transitions must be serialized by whoever owns the
log file or gate.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from types import MappingProxyType
from typing import BinaryIO, Mapping

from scanline39.code39 import CardCode

DENIED = "DENIED"
MAX_ATTEMPTS = 3
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

_DB_LINE = re.compile(r"^([0-9]{4}),(.+)$")


class DbParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class UserRecord:
    code: CardCode
    name: str


@dataclass(frozen=True)
class AuthDb:
    records: Mapping[CardCode, UserRecord]

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, code: CardCode) -> bool:
        return code in self.records


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def load_db(source: bytes | str | BinaryIO) -> AuthDb:
    """Parse a user database. ``source`` may be bytes, text or a readable file."""
    table: dict[CardCode, UserRecord] = {}
    for lineno, line in enumerate(_as_text(source).splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        m = _DB_LINE.match(line)
        if m is None:
            raise DbParseError(lineno, f"expected CODE,NAME with a 4-digit code: {line!r}")
        code = CardCode.parse(m.group(1))
        if code in table:
            raise DbParseError(lineno, f"duplicate code {code}")
        table[code] = UserRecord(code, m.group(2))
    return AuthDb(MappingProxyType(table))


def authenticate(code: CardCode, db: AuthDb) -> str | None:
    """Name of the card holder on an exact match, ``None`` when the card is rejected."""
    rec = db.records.get(code)
    return rec.name if rec is not None else None


@dataclass(frozen=True)
class LogEntry:
    code: CardCode
    name: str
    timestamp: datetime

    def __post_init__(self):
        ts = self.timestamp
        if ts.tzinfo is None:
            raise ValueError("log timestamps must be timezone-aware")
        ts = ts.astimezone(timezone.utc).replace(microsecond=0)
        object.__setattr__(self, "timestamp", ts)

    def format(self) -> str:
        return f"{self.timestamp.strftime(TIMESTAMP_FORMAT)},{self.code},{self.name}"


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def append_log(entry: LogEntry, sink: BinaryIO) -> None:
    sink.write((entry.format() + "\n").encode("utf-8"))
    sink.flush()


def parse_log(source: bytes | str | BinaryIO) -> list[LogEntry]:
    entries = []
    for line in _as_text(source).splitlines():
        if not line:
            continue
        ts, code, name = line.split(",", 2)
        when = datetime.strptime(ts, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)
        entries.append(LogEntry(CardCode.parse(code), name, when))
    return entries


class GateState(enum.Enum):
    ACTIVE = "active"
    DISABLED = "disabled"


class Outcome(enum.Enum):
    GRANTED = "granted"
    RETRY = "retry"
    LOCKED_OUT = "locked_out"


@dataclass(frozen=True)
class PasswordGate:
    """Three-strike password stage in front of the scanner.

    Three consecutive wrong passwords disable the device; only the factory
    code brings it back. Transitions return a new gate.
    """

    device_password: str
    factory_code: str
    state: GateState = GateState.ACTIVE
    attempts_remaining: int = MAX_ATTEMPTS

    def __post_init__(self):
        if not 0 <= self.attempts_remaining <= MAX_ATTEMPTS:
            raise ValueError("attempts_remaining out of range")
        if (self.attempts_remaining == 0) != (self.state is GateState.DISABLED):
            raise ValueError("a gate is disabled exactly when no attempts remain")

    def __repr__(self) -> str:
        # keep secrets out of logs and tracebacks
        return f"PasswordGate(state={self.state.value}, attempts_remaining={self.attempts_remaining})"


def password_attempt(gate: PasswordGate, pwd: str) -> tuple[PasswordGate, Outcome]:
    if gate.state is GateState.DISABLED:
        return gate, Outcome.LOCKED_OUT
    if pwd == gate.device_password:
        return replace(gate, attempts_remaining=MAX_ATTEMPTS), Outcome.GRANTED
    left = gate.attempts_remaining - 1
    if left > 0:
        return replace(gate, attempts_remaining=left), Outcome.RETRY
    return replace(gate, state=GateState.DISABLED, attempts_remaining=0), Outcome.LOCKED_OUT


def factory_reset(gate: PasswordGate, code: str) -> tuple[PasswordGate, bool]:
    if code != gate.factory_code:
        return gate, False
    return replace(gate, state=GateState.ACTIVE, attempts_remaining=MAX_ATTEMPTS), True
