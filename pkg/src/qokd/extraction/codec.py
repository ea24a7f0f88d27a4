"""
Compact binary format for oblivious key views.

Layout (big-endian):

    magic     4s   b"QOKV"
    version   u8   1
    scheme    u8   tag, see SCHEME_CODES
    flags     u8   bit 0: unreliable mask present
    n         u64
    k         u32
    m         u32  raw length
    bob key   ceil(n / 8) bytes, little-endian bit order
    mask      ceil(n / 8) bytes, only when flag bit 0 is set
    count     u64
    known     count x (index u64, bit u8), ascending index

Alice's guesses are not part of the format.
"""

import struct

import numpy as np

from qokd.core.bits import bits_from_bytes, bits_to_bytes
from qokd.core.exceptions import ValidationError
from qokd.domain.entities import ObliviousKeyView

__all__ = ["MAGIC", "FORMAT_VERSION", "SCHEME_CODES", "encode_key_view", "decode_key_view"]

MAGIC = b"QOKV"
FORMAT_VERSION = 1
SCHEME_CODES = {"original": 1, "modified": 2, "generalized": 3, "diluted": 4}
_SCHEME_NAMES = {v: k for k, v in SCHEME_CODES.items()}

_HEADER = struct.Struct(">4sBBBQII")
_COUNT = struct.Struct(">Q")
_PAIR = np.dtype([("index", ">u8"), ("bit", "u1")])

_FLAG_UNRELIABLE = 0x01


def encode_key_view(view: ObliviousKeyView) -> bytes:
    code = SCHEME_CODES.get(view.scheme)
    if code is None:
        raise ValidationError(f"Scheme {view.scheme!r} has no binary tag", parameter="scheme", value=view.scheme)
    flags = _FLAG_UNRELIABLE if view.unreliable is not None else 0
    parts = [
        _HEADER.pack(MAGIC, FORMAT_VERSION, code, flags, view.n, view.k, view.raw_length),
        bits_to_bytes(view.bob_key),
    ]
    if view.unreliable is not None:
        parts.append(bits_to_bytes(view.unreliable))
    pairs = np.empty(view.known_count, dtype=_PAIR)
    indices = view.known_indices()
    pairs["index"] = indices
    pairs["bit"] = [view.alice_known[j] for j in indices]
    parts.append(_COUNT.pack(view.known_count))
    parts.append(pairs.tobytes())
    return b"".join(parts)


def decode_key_view(data: bytes) -> ObliviousKeyView:
    """
    Parse bytes produced by encode_key_view.

    Raises:
        ValidationError: On a bad magic, version, tag or truncated payload
    """
    if len(data) < _HEADER.size:
        raise ValidationError("Key view is truncated", parameter="data", value=len(data))
    magic, version, code, flags, n, k, m = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValidationError("Not a key view (bad magic)", parameter="magic", value=magic.hex())
    if version != FORMAT_VERSION:
        raise ValidationError(f"Unsupported key view version {version}", parameter="version", value=version)
    if code not in _SCHEME_NAMES:
        raise ValidationError(f"Unknown scheme tag {code}", parameter="scheme", value=code)

    nbytes = (n + 7) // 8
    offset = _HEADER.size
    need = offset + nbytes * (2 if flags & _FLAG_UNRELIABLE else 1) + _COUNT.size
    if len(data) < need:
        raise ValidationError("Key view is truncated", parameter="data", value=len(data))

    bob_key = bits_from_bytes(data[offset: offset + nbytes], n)
    offset += nbytes
    unreliable = None
    if flags & _FLAG_UNRELIABLE:
        unreliable = bits_from_bytes(data[offset: offset + nbytes], n)
        offset += nbytes
    (count,) = _COUNT.unpack_from(data, offset)
    offset += _COUNT.size
    if len(data) != offset + count * _PAIR.itemsize:
        raise ValidationError("Known-bit table length mismatch", parameter="count", value=count)
    pairs = np.frombuffer(data, dtype=_PAIR, count=count, offset=offset)
    indices = pairs["index"].astype(np.int64)
    if count and (np.any(np.diff(indices) <= 0) or indices[-1] >= n):
        raise ValidationError("Known indices must be ascending and below n", parameter="known")

    return ObliviousKeyView(
        bob_key=bob_key,
        alice_known=dict(zip(indices.tolist(), pairs["bit"].astype(int).tolist())),
        scheme=_SCHEME_NAMES[code],
        unreliable=unreliable,
        k=k,
        raw_length=m,
    )
