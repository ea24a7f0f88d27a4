"""
Core value types for QOKD.

These immutable types describe the six planar qubit states used by the
protocol, the two SARG04 bases, Bob's state-pair announcements and Alice's
per-qubit verdicts. Everything above the quantum layer speaks in these
types.
"""

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any, Union

from qokd.core.exceptions import ValidationError

__all__ = [
    "QubitState",
    "Basis",
    "Announcement",
    "Conclusive",
    "Inconclusive",
    "Conclusiveness",
    "SARG04_STATES",
    "DIAGONAL_STATES",
    "circular_distance",
    "verdict_from_code",
    "VerdictCode",
]


class QubitState(IntEnum):
    """
    A planar qubit state identified by its octant on the real great circle
    of the Bloch sphere (angle 45 degrees times the octant).

    Octants 3 and 7 are not used by the protocol and cannot be represented.
    """
    UP = 0
    NE = 1
    RIGHT = 2
    DOWN = 4
    SW = 5
    LEFT = 6

    @property
    def octant(self) -> int:
        return int(self)

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    @property
    def is_diagonal(self) -> bool:
        return self in (QubitState.NE, QubitState.SW)

    @property
    def basis(self) -> "Basis | None":
        """SARG04 basis containing this state, or None for diagonal states."""
        if self in (QubitState.UP, QubitState.DOWN):
            return Basis.UP_DOWN
        if self in (QubitState.RIGHT, QubitState.LEFT):
            return Basis.LEFT_RIGHT
        return None

    @property
    def bit(self) -> int | None:
        """Bit value encoded by the basis of this state."""
        basis = self.basis
        return None if basis is None else basis.bit

    @property
    def antipode(self) -> "QubitState":
        """The orthogonal state (four octants away)."""
        return QubitState((self.octant + 4) % 8)

    @classmethod
    def from_name(cls, name: str) -> "QubitState":
        """Parse a state from its enum name or arrow symbol."""
        key = name.strip()
        for state, symbol in _SYMBOLS.items():
            if key == symbol:
                return state
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValidationError(f"Unknown qubit state: {name!r}", parameter="state", value=name)


_SYMBOLS = {
    QubitState.UP: "↑",
    QubitState.NE: "↗",
    QubitState.RIGHT: "→",
    QubitState.DOWN: "↓",
    QubitState.SW: "↙",
    QubitState.LEFT: "←",
}

SARG04_STATES = (QubitState.UP, QubitState.RIGHT, QubitState.DOWN, QubitState.LEFT)
DIAGONAL_STATES = (QubitState.NE, QubitState.SW)


class Basis(Enum):
    """
    SARG04 measurement/encoding basis.

    The basis carries the bit: up-down encodes 0, left-right encodes 1.
    """
    UP_DOWN = 0
    LEFT_RIGHT = 1

    @property
    def bit(self) -> int:
        return self.value

    @property
    def states(self) -> tuple[QubitState, QubitState]:
        """The two orthogonal eigenstates, lower octant first."""
        if self is Basis.UP_DOWN:
            return (QubitState.UP, QubitState.DOWN)
        return (QubitState.RIGHT, QubitState.LEFT)

    @classmethod
    def from_bit(cls, bit: int) -> "Basis":
        return cls.UP_DOWN if bit == 0 else cls.LEFT_RIGHT


def circular_distance(a: int, b: int) -> int:
    """Distance between two octants around the circle, in 0..4."""
    d = abs(int(a) - int(b)) % 8
    return min(d, 8 - d)


@dataclass(frozen=True)
class Announcement:
    """
    Bob's public state pair: one state from each SARG04 basis.

    The pair is stored in ascending octant order whatever order it was built
    from, so the encoding never reveals which of the two was sent.
    """
    first: QubitState
    second: QubitState

    def __post_init__(self) -> None:
        a, b = QubitState(self.first), QubitState(self.second)
        if a.basis is None or b.basis is None or a.basis is b.basis:
            raise ValidationError(
                "Announcement needs one state from each SARG04 basis",
                parameter="announcement",
                value=(a.name, b.name),
            )
        if circular_distance(a, b) != 2:
            raise ValidationError(
                "Announced states must be non-orthogonal",
                parameter="announcement",
                value=(a.name, b.name),
            )
        if a > b:
            a, b = b, a
        object.__setattr__(self, "first", a)
        object.__setattr__(self, "second", b)

    @classmethod
    def of(cls, a: QubitState, b: QubitState) -> "Announcement":
        return cls(a, b)

    @property
    def states(self) -> tuple[QubitState, QubitState]:
        return (self.first, self.second)

    def __contains__(self, state: object) -> bool:
        return state in (self.first, self.second)

    def other(self, state: QubitState) -> QubitState:
        """The announced state that is not `state`."""
        if state == self.first:
            return self.second
        if state == self.second:
            return self.first
        raise ValidationError("State is not part of the announcement", parameter="state", value=state.name)

    def bisector(self) -> QubitState | None:
        """The diagonal state halfway between the pair, if it is representable."""
        a, b = self.first.octant, self.second.octant
        mid = (a + 1) % 8 if (b - a) % 8 == 2 else (b + 1) % 8
        try:
            return QubitState(mid)
        except ValueError:
            return None

    def to_text(self) -> str:
        return f"{self.first.name},{self.second.name}"

    @classmethod
    def from_text(cls, text: str) -> "Announcement":
        parts = text.split(",")
        if len(parts) != 2:
            raise ValidationError(f"Malformed announcement: {text!r}", parameter="announcement", value=text)
        return cls(QubitState.from_name(parts[0]), QubitState.from_name(parts[1]))

    def __str__(self) -> str:
        return "{" + f"{self.first.symbol},{self.second.symbol}" + "}"


@dataclass(frozen=True)
class Conclusive:
    """Alice excluded one announced state and knows the bit."""
    bit: int

    @property
    def is_conclusive(self) -> bool:
        return True

    def to_code(self) -> str:
        return f"C{self.bit}"

    def to_dict(self) -> dict[str, Any]:
        return {"verdict": "conclusive", "bit": self.bit}


@dataclass(frozen=True)
class Inconclusive:
    """
    Alice could not exclude either state.

    guess_bit is her best guess, or None when the measurement left no usable
    guess (a failed unambiguous discrimination).
    """
    guess_bit: int | None

    @property
    def is_conclusive(self) -> bool:
        return False

    def to_code(self) -> str:
        return "I-" if self.guess_bit is None else f"I{self.guess_bit}"

    def to_dict(self) -> dict[str, Any]:
        return {"verdict": "inconclusive", "guess_bit": self.guess_bit}


Conclusiveness = Union[Conclusive, Inconclusive]


def verdict_from_code(code: str) -> Conclusiveness:
    """Parse the two-character verdict code used in transcript lines."""
    if len(code) == 2 and code[0] == "C" and code[1] in "01":
        return Conclusive(int(code[1]))
    if len(code) == 2 and code[0] == "I" and code[1] in "01-":
        return Inconclusive(None if code[1] == "-" else int(code[1]))
    raise ValidationError(f"Malformed verdict code: {code!r}", parameter="verdict", value=code)


class VerdictCode(IntEnum):
    """Compact per-position verdict codes used in columnar transcripts."""
    CONCLUSIVE_0 = 0
    CONCLUSIVE_1 = 1
    GUESS_0 = 2
    GUESS_1 = 3
    INVALID = 4
    NO_GUESS = 5

    @classmethod
    def of(cls, verdict: Conclusiveness) -> "VerdictCode":
        if isinstance(verdict, Conclusive):
            return cls(cls.CONCLUSIVE_0 + verdict.bit)
        if verdict.guess_bit is None:
            return cls.NO_GUESS
        return cls(cls.GUESS_0 + verdict.guess_bit)

    def to_verdict(self) -> Conclusiveness:
        if self in (VerdictCode.CONCLUSIVE_0, VerdictCode.CONCLUSIVE_1):
            return Conclusive(int(self) - VerdictCode.CONCLUSIVE_0)
        if self in (VerdictCode.GUESS_0, VerdictCode.GUESS_1):
            return Inconclusive(int(self) - VerdictCode.GUESS_0)
        if self is VerdictCode.NO_GUESS:
            return Inconclusive(None)
        raise ValidationError("Invalid verdict code has no verdict", parameter="verdict", value=int(self))
