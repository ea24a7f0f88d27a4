"""
Domain entities for QOKD.

These are the objects the protocol layers pass around: raw-key transcripts,
oblivious keys, databases, session statuses and experiment configuration /
reports. They are immutable value objects with no dependencies on transports
or the command line.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from datetime import datetime
from enum import IntEnum
from typing import Any, Iterator, Mapping, NamedTuple, Union

import numpy as np
from bitarray import frozenbitarray

from qokd.core.bits import bits_from_array
from qokd.core.exceptions import ConfigurationError, TranscriptError, ValidationError
from qokd.core.limits import DEFAULT_RESTART_CAP, MAX_RAW_QUBITS
from qokd.core.models import Announcement, Conclusiveness, QubitState, VerdictCode
from qokd.core.rng import RandomStream

__all__ = [
    "RawKeyRecord",
    "RawKeyTranscript",
    "KeyBitDefinition",
    "KeyGuess",
    "ObliviousKeyView",
    "Database",
    "Role",
    "Completed",
    "Restarted",
    "Aborted",
    "SessionStatus",
    "SessionConfig",
    "ExperimentConfig",
    "ExperimentReport",
    "UNDEFINED_BIT",
    "Preparation",
    "MeasurementRequest",
]

# Marker for Bob bits that carry no value (biased diagonal states)
UNDEFINED_BIT = -1


# =============================================================================
# Raw keys
# =============================================================================

@dataclass(frozen=True)
class RawKeyRecord:
    """One position of a raw key, as seen by an auditor."""
    index: int
    bob_bit: int | None
    sent_state: QubitState
    announcement: Announcement
    outcome: QubitState | None
    alice_verdict: Conclusiveness

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "bob_bit": self.bob_bit,
            "sent_state": self.sent_state.name,
            "announcement": self.announcement.to_text(),
            "outcome": self.outcome.name if self.outcome is not None else None,
            "verdict": self.alice_verdict.to_code(),
        }


@dataclass(frozen=True, eq=False)
class RawKeyTranscript:
    """
    Column-wise record of a raw key exchange.

    Every column is a numpy array of length n. Octant columns hold QubitState
    values, `outcome` holds -1 where Alice got no outcome, `verdict` holds
    VerdictCode values and `bob_bit` holds -1 where Bob's bit is undefined.
    Per-position RawKeyRecord objects are only built on request.
    """
    sent: np.ndarray
    ann_lo: np.ndarray
    ann_hi: np.ndarray
    outcome: np.ndarray
    verdict: np.ndarray
    bob_bit: np.ndarray
    alice_strategy: str = "honest"
    bob_strategy: str = "honest"

    def __post_init__(self) -> None:
        n = len(self.sent)
        for f in ("ann_lo", "ann_hi", "outcome", "verdict", "bob_bit"):
            column = getattr(self, f)
            if len(column) != n:
                raise TranscriptError(
                    f"Transcript column {f} has length {len(column)}, expected {n}",
                    details={"column": f},
                )
            if isinstance(column, np.ndarray):
                column.setflags(write=False)
        self.sent.setflags(write=False)

    def __len__(self) -> int:
        return len(self.sent)

    @property
    def n(self) -> int:
        return len(self.sent)

    @property
    def conclusive_mask(self) -> np.ndarray:
        return self.verdict <= VerdictCode.CONCLUSIVE_1

    @property
    def conclusive_indices(self) -> np.ndarray:
        return np.flatnonzero(self.conclusive_mask)

    @property
    def conclusive_set(self) -> frozenset[int]:
        """Indices where Alice's verdict is Conclusive."""
        return frozenset(self.conclusive_indices.tolist())

    @property
    def guess_mask(self) -> np.ndarray:
        return (self.verdict == VerdictCode.GUESS_0) | (self.verdict == VerdictCode.GUESS_1)

    @property
    def alice_bits(self) -> np.ndarray:
        """Alice's bit per position: conclusive value, else her guess, else -1."""
        bits = np.full(self.n, -1, dtype=np.int8)
        conclusive = self.conclusive_mask
        bits[conclusive] = self.verdict[conclusive] - VerdictCode.CONCLUSIVE_0
        guesses = self.guess_mask
        bits[guesses] = self.verdict[guesses] - VerdictCode.GUESS_0
        return bits

    @property
    def bob_defined(self) -> bool:
        return bool(np.all(self.bob_bit >= 0))

    def bob_bits(self) -> np.ndarray:
        """Bob's bits as a 0/1 array; raises if any is undefined."""
        if not self.bob_defined:
            raise TranscriptError(
                "Transcript has undefined Bob bits",
                details={"bob_strategy": self.bob_strategy},
            )
        return self.bob_bit.astype(np.uint8)

    def record(self, i: int) -> RawKeyRecord:
        if not 0 <= i < self.n:
            raise ValidationError(f"Record index {i} out of range", parameter="index", value=i)
        outcome = int(self.outcome[i])
        bob = int(self.bob_bit[i])
        return RawKeyRecord(
            index=i,
            bob_bit=None if bob == UNDEFINED_BIT else bob,
            sent_state=QubitState(int(self.sent[i])),
            announcement=Announcement(QubitState(int(self.ann_lo[i])), QubitState(int(self.ann_hi[i]))),
            outcome=None if outcome < 0 else QubitState(outcome),
            alice_verdict=VerdictCode(int(self.verdict[i])).to_verdict(),
        )

    @property
    def records(self) -> list[RawKeyRecord]:
        return [self.record(i) for i in range(self.n)]

    def __iter__(self) -> Iterator[RawKeyRecord]:
        for i in range(self.n):
            yield self.record(i)

    @classmethod
    def from_records(
        cls,
        records: list[RawKeyRecord],
        alice_strategy: str = "honest",
        bob_strategy: str = "honest",
    ) -> "RawKeyTranscript":
        """Rebuild the columnar form; records must be indexed 0..n-1 in order."""
        for expected, rec in enumerate(records):
            if rec.index != expected:
                raise TranscriptError(
                    f"Record index {rec.index} found where {expected} was expected",
                    details={"index": rec.index},
                )

        def column(values: list[int]) -> np.ndarray:
            return np.asarray(values, dtype=np.int8)

        return cls(
            sent=column([r.sent_state for r in records]),
            ann_lo=column([r.announcement.first for r in records]),
            ann_hi=column([r.announcement.second for r in records]),
            outcome=column([-1 if r.outcome is None else r.outcome for r in records]),
            verdict=column([VerdictCode.of(r.alice_verdict) for r in records]),
            bob_bit=column([UNDEFINED_BIT if r.bob_bit is None else r.bob_bit for r in records]),
            alice_strategy=alice_strategy,
            bob_strategy=bob_strategy,
        )


# =============================================================================
# Oblivious keys
# =============================================================================

@dataclass(frozen=True)
class KeyBitDefinition:
    """The raw-key positions whose XOR defines key bit key_index."""
    key_index: int
    qubit_indices: frozenset[int]

    @property
    def k(self) -> int:
        return len(self.qubit_indices)


class KeyGuess(NamedTuple):
    bit: int
    confidence: float
    unknown_count: int


@dataclass(frozen=True, eq=False)
class ObliviousKeyView:
    """
    Both parties' view of one oblivious key.

    Bob holds the whole key. Alice holds the values at alice_known and, when
    requested, a best guess with its confidence for every other bit. Bits in
    `unreliable` are ones Bob only believes he knows (his qubits carried no
    basis bit).
    """
    bob_key: frozenbitarray
    alice_known: Mapping[int, int]
    scheme: str
    alice_guesses: Mapping[int, KeyGuess] | None = None
    unreliable: frozenbitarray | None = None
    k: int = 0
    raw_length: int = 0

    def __len__(self) -> int:
        return len(self.bob_key)

    @property
    def n(self) -> int:
        return len(self.bob_key)

    @property
    def known_count(self) -> int:
        return len(self.alice_known)

    def known_indices(self) -> list[int]:
        return sorted(self.alice_known)

    def is_reliable(self, j: int) -> bool:
        return self.unreliable is None or not self.unreliable[j]

    def mismatches(self) -> list[int]:
        """Known indices where Alice's value differs from Bob's reliable bit."""
        return [
            j for j in self.known_indices()
            if self.is_reliable(j) and self.bob_key[j] != self.alice_known[j]
        ]

    def is_consistent(self) -> bool:
        return not self.mismatches()


# =============================================================================
# Sessions
# =============================================================================

@dataclass(frozen=True)
class Database:
    """Bob's N-bit database."""
    bits: frozenbitarray

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, index: int) -> int:
        return self.bits[index]

    @classmethod
    def random(cls, n: int, rng: RandomStream) -> "Database":
        return cls(bits_from_array(rng.integers(0, 2, size=n, dtype=np.uint8)))

    @classmethod
    def from_bits(cls, bits: list[int] | str) -> "Database":
        return cls(frozenbitarray(bits, endian="little"))


class Role(IntEnum):
    """Session endpoints; the value is used in seeds and route prefaces."""
    ALICE = 1
    BOB = 2
    REFEREE = 3


@dataclass(frozen=True)
class Completed:
    retrieved_bit: int
    restarts: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {"status": "completed", "retrieved_bit": self.retrieved_bit, "restarts": self.restarts}


@dataclass(frozen=True)
class Restarted:
    """Status while a round is being redone."""
    count: int

    def to_dict(self) -> dict[str, Any]:
        return {"status": "restarted", "count": self.count}


@dataclass(frozen=True)
class Aborted:
    reason: str
    restarts: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {"status": "aborted", "reason": self.reason, "restarts": self.restarts}


SessionStatus = Union[Completed, Restarted, Aborted]


@dataclass(frozen=True)
class SessionConfig:
    """
    Parameters of one oblivious-transfer session.

    n is the key (and database) length. m is the raw length of the
    generalized scheme; None picks the minimal one. db_index None lets Alice
    draw the wanted database index from her own stream.
    """
    scheme: str = "modified"
    n: int = 10_000
    k: int = 6
    m: int | None = None
    r: int = 1
    alice: str = "honest"
    bob: str = "honest"
    seed: int = 0
    restart_cap: int = DEFAULT_RESTART_CAP
    db_index: int | None = None
    transport: str = "inproc"

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


# =============================================================================
# Experiments
# =============================================================================

EXPERIMENT_KINDS = ("run", "table1", "table2", "dilution", "attack")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything needed to replay one experiment.

    Parameters left as None take the experiment's own defaults.
    """
    experiment: str = "run"
    scheme: str = "modified"
    n: int | None = None
    k: int | None = None
    m: int | None = None
    r: int | None = None
    alice: str = "honest"
    bob: str = "honest"
    p: float | None = None
    runs: int = 100
    seed: int = 0
    transport: str = "inproc"
    port: int = 0
    known: int = 400
    trials: int = 200
    model: str = "alice-usd"
    restart_cap: int = DEFAULT_RESTART_CAP
    max_raw_qubits: int = MAX_RAW_QUBITS
    workers: int = 1
    output: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENT_KINDS:
            raise ValidationError(
                f"Unknown experiment: {self.experiment}",
                parameter="experiment",
                value=self.experiment,
            )
        if self.runs < 1:
            raise ValidationError("runs must be >= 1", parameter="runs", value=self.runs)
        if self.format not in ("json", "csv"):
            raise ValidationError(f"Unknown report format: {self.format}", parameter="format", value=self.format)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """
        Build a config from a loaded mapping (TOML file or report echo).

        Raises:
            ConfigurationError: On unknown keys or values of the wrong type
        """
        known = {f.name: f for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigurationError(f"Unknown configuration key: {key}", config_key=key)
        try:
            return cls(**dict(data))
        except TypeError as e:
            raise ConfigurationError(f"Invalid configuration: {e}") from e


@dataclass
class ExperimentReport:
    """
    Result of one experiment.

    Aggregates are always recomputable from records. Timing fields are the
    only part that differs between replays of the same config.
    """
    experiment: str
    config: dict[str, Any]
    records: list[dict[str, Any]] = field(default_factory=list)
    aggregates: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    tool_version: str = ""
    generated_at: datetime | None = None
    wall_clock_seconds: float | None = None
    exit_code: int = 0

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "experiment": self.experiment,
            "tool_version": self.tool_version,
            "config": self.config,
            "aggregates": self.aggregates,
            "records": self.records,
            "notes": self.notes,
        }
        if include_timing:
            data["generated_at"] = self.generated_at.isoformat() if self.generated_at else None
            data["wall_clock_seconds"] = self.wall_clock_seconds
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentReport":
        """Create from a dictionary produced by to_dict."""
        from dateutil.parser import isoparse

        generated_at = data.get("generated_at")
        return cls(
            experiment=data["experiment"],
            config=dict(data.get("config", {})),
            records=list(data.get("records", [])),
            aggregates=dict(data.get("aggregates", {})),
            notes=list(data.get("notes", [])),
            tool_version=data.get("tool_version", ""),
            generated_at=isoparse(generated_at) if generated_at else None,
            wall_clock_seconds=data.get("wall_clock_seconds"),
        )


# =============================================================================
# Strategy I/O
# =============================================================================

@dataclass(frozen=True, eq=False)
class Preparation:
    """Bob's prepared states and announcements for n rounds (octant arrays)."""
    sent: np.ndarray
    ann_lo: np.ndarray
    ann_hi: np.ndarray
    bob_bit: np.ndarray

    def __len__(self) -> int:
        return len(self.sent)


@dataclass(frozen=True, eq=False)
class MeasurementRequest:
    """
    What Alice asks the channel to do with n qubits.

    mode "basis" measures qubit i in bases[i] (0 up-down, 1 left-right).
    mode "usd" attempts unambiguous discrimination on every qubit.
    """
    mode: str
    bases: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("basis", "usd"):
            raise ValidationError(f"Unknown measurement mode: {self.mode}", parameter="mode", value=self.mode)
        if self.mode == "basis" and self.bases is None:
            raise ValidationError("Basis measurement needs bases", parameter="bases")
