"""
Session transcripts: every delivered message in order plus the final status.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from qokd.domain.entities import Aborted, Completed, Role, SessionStatus
from qokd.session.wire import MessageType, WireMessage, canonical_json

__all__ = ["TranscriptEntry", "SessionTranscript", "SessionOutcome"]


class TranscriptEntry(NamedTuple):
    source: Role
    destination: Role
    message: WireMessage

    def to_dict(self) -> dict:
        return {
            "src": self.source.name.lower(),
            "dst": self.destination.name.lower(),
            **self.message.to_dict(),
        }


@dataclass
class SessionTranscript:
    entries: list[TranscriptEntry] = field(default_factory=list)
    status: SessionStatus | None = None

    def append(self, source: Role, destination: Role, message: WireMessage) -> None:
        self.entries.append(TranscriptEntry(source, destination, message))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TranscriptEntry]:
        return iter(self.entries)

    def inbox(self, role: Role) -> list[WireMessage]:
        return [e.message for e in self.entries if e.destination == role]

    def count(self, msg_type: MessageType) -> int:
        return sum(1 for e in self.entries if e.message.type == msg_type)

    @property
    def completed(self) -> bool:
        return isinstance(self.status, Completed)

    @property
    def aborted(self) -> bool:
        return isinstance(self.status, Aborted)

    def to_jsonl(self) -> str:
        """One canonical JSON object per message, then a status line."""
        lines = [canonical_json(e.to_dict()) for e in self.entries]
        if self.status is not None:
            lines.append(canonical_json(self.status.to_dict()))
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_jsonl().encode("ascii")).hexdigest()


class SessionOutcome(NamedTuple):
    transcript: SessionTranscript
    expected_bit: int | None
    db_index: int | None = None

    @property
    def status(self) -> SessionStatus | None:
        return self.transcript.status

    @property
    def correct(self) -> bool | None:
        """Whether Alice retrieved Bob's plaintext bit; None unless completed."""
        status = self.transcript.status
        if not isinstance(status, Completed) or self.expected_bit is None:
            return None
        return status.retrieved_bit == self.expected_bit
