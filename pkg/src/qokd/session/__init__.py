"""
Classical oblivious-transfer session: wire format, endpoints and runner.
"""

from qokd.session.wire import (
    WIRE_VERSION,
    MessageType,
    WireMessage,
    encode_frame,
    decode_frame,
    encode_octants,
    decode_octants,
)
from qokd.session.ot import announce_shift, encrypt_db, decrypt_bit
from qokd.session.transcript import SessionTranscript, SessionOutcome, TranscriptEntry
from qokd.session.roles import Alice, Bob, Referee, Outgoing
from qokd.session.runner import run_session, replay_session, session_scheme, build_endpoints

__all__ = [
    "WIRE_VERSION",
    "MessageType",
    "WireMessage",
    "encode_frame",
    "decode_frame",
    "encode_octants",
    "decode_octants",
    "announce_shift",
    "encrypt_db",
    "decrypt_bit",
    "SessionTranscript",
    "SessionOutcome",
    "TranscriptEntry",
    "Alice",
    "Bob",
    "Referee",
    "Outgoing",
    "run_session",
    "replay_session",
    "session_scheme",
    "build_endpoints",
]
