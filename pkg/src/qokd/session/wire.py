"""
Wire format for session messages.

A frame is a 4-byte big-endian payload length, a version byte, a type byte
and the payload: canonical JSON with sorted keys and no whitespace. Bit
strings travel as base64 of packed little-endian bits, octant arrays as
base64 of one signed byte per state.
"""

import base64
import binascii
import json
import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any

import numpy as np

from qokd.core.exceptions import ProtocolError
from qokd.core.limits import LimitExceededError, MAX_FRAME_BYTES, validate_frame_length

__all__ = [
    "WIRE_VERSION",
    "HEADER_SIZE",
    "MessageType",
    "WireMessage",
    "encode_frame",
    "decode_frame",
    "frame_length",
    "encode_octants",
    "decode_octants",
    "canonical_json",
]

WIRE_VERSION = 0x01

_HEADER = struct.Struct(">IBB")
HEADER_SIZE = _HEADER.size


class MessageType(IntEnum):
    HELLO = 1
    STATE_DEPOSIT = 2
    MEASURE_REQUEST = 3
    MEASURE_RESULT = 4
    ANNOUNCE = 5
    RESTART = 6
    SHIFT = 7
    ENC_DB = 8
    DONE = 9
    ABORT = 10


@dataclass(frozen=True)
class WireMessage:
    type: MessageType
    payload: dict[str, Any] = field(default_factory=dict)
    version: int = WIRE_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {"version": self.version, "type": self.type.name, "payload": self.payload}


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def encode_frame(msg: WireMessage, max_bytes: int = MAX_FRAME_BYTES) -> bytes:
    """
    Serialize a message into one frame.

    Raises:
        LimitExceededError: If the payload is larger than max_bytes
    """
    body = canonical_json(msg.payload).encode("ascii")
    validate_frame_length(len(body), max_bytes)
    return _HEADER.pack(len(body), msg.version, int(msg.type)) + body


def frame_length(header: bytes, max_bytes: int = MAX_FRAME_BYTES) -> int:
    """
    Declared payload length of a frame header.

    Raises:
        ProtocolError: frame-too-large or malformed-frame
    """
    if len(header) < HEADER_SIZE:
        raise ProtocolError("Truncated frame header", reason="malformed-frame")
    length, _, _ = _HEADER.unpack_from(header)
    try:
        validate_frame_length(length, max_bytes)
    except LimitExceededError as e:
        raise ProtocolError(str(e), reason="frame-too-large") from e
    return length


def decode_frame(data: bytes, max_bytes: int = MAX_FRAME_BYTES) -> WireMessage:
    """
    Parse exactly one frame.

    Raises:
        ProtocolError: With reason version-mismatch, malformed-frame or
            frame-too-large
    """
    length = frame_length(data, max_bytes)
    _, version, type_code = _HEADER.unpack_from(data)
    if version != WIRE_VERSION:
        raise ProtocolError(
            f"Unsupported wire version {version}",
            reason="version-mismatch",
            details={"version": version},
        )
    if len(data) != HEADER_SIZE + length:
        raise ProtocolError(
            f"Frame declares {length} payload bytes but carries {len(data) - HEADER_SIZE}",
            reason="malformed-frame",
        )
    try:
        msg_type = MessageType(type_code)
    except ValueError as e:
        raise ProtocolError(f"Unknown message type {type_code}", reason="malformed-frame") from e
    try:
        payload = json.loads(data[HEADER_SIZE:].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ProtocolError(f"Payload is not JSON: {e}", reason="malformed-frame") from e
    if not isinstance(payload, dict):
        raise ProtocolError("Payload must be a JSON object", reason="malformed-frame")
    return WireMessage(msg_type, payload, version)


def encode_octants(values: np.ndarray) -> str:
    """One signed byte per state; -1 (no outcome) becomes 0xFF."""
    return base64.b64encode(np.asarray(values, dtype=np.int8).tobytes()).decode("ascii")


def decode_octants(text: str, length: int | None = None) -> np.ndarray:
    """
    Raises:
        ProtocolError: On bad base64 or a length other than the expected one
    """
    try:
        raw = base64.b64decode(text.encode("ascii"), validate=True)
    except (binascii.Error, ValueError, UnicodeEncodeError, AttributeError) as e:
        raise ProtocolError(f"Bad octant array: {e}", reason="malformed-frame") from e
    arr = np.frombuffer(raw, dtype=np.int8).copy()
    if length is not None and arr.shape[0] != length:
        raise ProtocolError(
            f"Expected {length} states, got {arr.shape[0]}",
            reason="malformed-frame",
        )
    return arr
