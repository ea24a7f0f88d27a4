"""
Line-oriented raw-key transcript format.

One record per line, fields separated by single spaces:

    index bob_bit sent pair outcome verdict

bob_bit and outcome are "-" when undefined; pair is "FIRST,SECOND" and the
verdict is a two-character code (C0, C1, I0, I1, I-). Example lines:

    17 0 UP UP,RIGHT LEFT C0
    3 - SW UP,RIGHT - I-

A leading "#" line records the strategy names.
"""

from pathlib import Path
from typing import Iterable, TextIO

from qokd.core.exceptions import TranscriptError, ValidationError
from qokd.core.limits import check_symlink
from qokd.core.models import Announcement, QubitState, verdict_from_code
from qokd.domain.entities import RawKeyRecord, RawKeyTranscript

__all__ = [
    "format_record",
    "parse_record",
    "write_transcript",
    "read_transcript",
    "dump_transcript",
    "load_transcript",
]

_HEADER_PREFIX = "# qokd-transcript"


def format_record(rec: RawKeyRecord) -> str:
    bob = "-" if rec.bob_bit is None else str(rec.bob_bit)
    outcome = "-" if rec.outcome is None else rec.outcome.name
    return " ".join((
        str(rec.index),
        bob,
        rec.sent_state.name,
        rec.announcement.to_text(),
        outcome,
        rec.alice_verdict.to_code(),
    ))


def parse_record(line: str) -> RawKeyRecord:
    """
    Parse one transcript line.

    Raises:
        TranscriptError: If the line is malformed
    """
    parts = line.split()
    if len(parts) != 6:
        raise TranscriptError(f"Expected 6 fields, got {len(parts)}: {line!r}")
    index, bob, sent, pair, outcome, verdict = parts
    try:
        return RawKeyRecord(
            index=int(index),
            bob_bit=None if bob == "-" else int(bob),
            sent_state=QubitState.from_name(sent),
            announcement=Announcement.from_text(pair),
            outcome=None if outcome == "-" else QubitState.from_name(outcome),
            alice_verdict=verdict_from_code(verdict),
        )
    except (ValueError, ValidationError) as e:
        raise TranscriptError(f"Malformed transcript line: {line!r}", details={"error": str(e)}) from e


def dump_transcript(t: RawKeyTranscript, stream: TextIO) -> None:
    stream.write(f"{_HEADER_PREFIX} alice={t.alice_strategy} bob={t.bob_strategy} n={t.n}\n")
    for rec in t:
        stream.write(format_record(rec) + "\n")


def load_transcript(lines: Iterable[str]) -> RawKeyTranscript:
    alice, bob = "honest", "honest"
    records = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_HEADER_PREFIX):
                for item in line[len(_HEADER_PREFIX):].split():
                    key, _, value = item.partition("=")
                    if key == "alice":
                        alice = value
                    elif key == "bob":
                        bob = value
            continue
        records.append(parse_record(line))
    return RawKeyTranscript.from_records(records, alice_strategy=alice, bob_strategy=bob)


def write_transcript(t: RawKeyTranscript, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        dump_transcript(t, f)


def read_transcript(path: Path | str) -> RawKeyTranscript:
    """Read a transcript file, following (and warning about) symlinks."""
    _, resolved = check_symlink(path)
    with open(resolved, encoding="utf-8") as f:
        return load_transcript(f)
