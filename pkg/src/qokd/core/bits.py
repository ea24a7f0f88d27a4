"""
Packed bit-string helpers.

Keys, databases and masks are held as little-endian bitarrays. These helpers
move them to and from numpy 0/1 arrays and the base64 text used on the wire.
"""

import base64

import numpy as np
from bitarray import bitarray, frozenbitarray

from qokd.core.exceptions import ValidationError

__all__ = [
    "bits_from_array",
    "bits_to_array",
    "bits_to_base64",
    "bits_from_base64",
    "bits_to_bytes",
    "bits_from_bytes",
]


def bits_from_array(values: np.ndarray | list[int]) -> frozenbitarray:
    """Pack a 0/1 sequence into a frozen little-endian bitarray."""
    arr = np.asarray(values, dtype=np.uint8)
    out = bitarray(endian="little")
    out.frombytes(np.packbits(arr, bitorder="little").tobytes())
    del out[arr.shape[0]:]
    return frozenbitarray(out)


def _endian(bits: bitarray) -> str:
    # a method before bitarray 3, a str attribute since
    e = bits.endian
    return e() if callable(e) else e


def _as_little(bits: bitarray) -> bitarray:
    return bits if _endian(bits) == "little" else bitarray(bits, endian="little")


def bits_to_array(bits: bitarray) -> np.ndarray:
    """Unpack a bitarray into a uint8 array of 0/1 values."""
    bits = _as_little(bits)
    raw = np.frombuffer(bits.tobytes(), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: len(bits)]


def bits_to_bytes(bits: bitarray) -> bytes:
    """Packed little-endian bytes; the final byte is zero padded."""
    return _as_little(bits).tobytes()


def bits_from_bytes(data: bytes, length: int) -> frozenbitarray:
    """Inverse of bits_to_bytes for a known bit length."""
    if length < 0 or len(data) != (length + 7) // 8:
        raise ValidationError(
            f"{len(data)} bytes cannot hold exactly {length} bits",
            parameter="length",
            value=length,
        )
    out = bitarray(endian="little")
    out.frombytes(data)
    del out[length:]
    return frozenbitarray(out)


def bits_to_base64(bits: bitarray) -> str:
    return base64.b64encode(bits_to_bytes(bits)).decode("ascii")


def bits_from_base64(text: str, length: int) -> frozenbitarray:
    try:
        data = base64.b64decode(text.encode("ascii"), validate=True)
    except (ValueError, UnicodeEncodeError) as e:
        raise ValidationError(f"Invalid base64 bit string: {e}", parameter="bits") from e
    return bits_from_bytes(data, length)
