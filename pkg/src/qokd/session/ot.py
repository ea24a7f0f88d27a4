"""
1-out-of-N oblivious transfer on top of an oblivious key.

Alice knows key bit j and wants database bit b. She announces
s = (j - b) mod N; Bob sends out[a] = db[a] ^ ok[(a + s) mod N]. Position b
is then masked by ok[j], the one bit Alice knows.
"""

from bitarray import bitarray, frozenbitarray

from qokd.core.exceptions import ValidationError

__all__ = ["announce_shift", "encrypt_db", "decrypt_bit"]


def announce_shift(j: int, b: int, n: int) -> int:
    """
    Example:
        announce_shift(7, 3, 10) == 4
        announce_shift(2, 9, 10) == 3
    """
    if n < 1:
        raise ValidationError("N must be positive", parameter="N", value=n)
    return (j - b) % n


def encrypt_db(db: bitarray, ok: bitarray, s: int) -> frozenbitarray:
    """
    Raises:
        ValidationError: If the database and key lengths differ
    """
    n = len(db)
    if len(ok) != n:
        raise ValidationError(
            f"Database has {n} bits but the key has {len(ok)}",
            parameter="ok",
        )
    s %= n
    return frozenbitarray(db ^ (ok[s:] + ok[:s]))


def decrypt_bit(enc: bitarray, b: int, ok_j: int) -> int:
    """
    Raises:
        ValidationError: If b is not an index of enc
    """
    if not 0 <= b < len(enc):
        raise ValidationError(f"Index {b} outside 0..{len(enc) - 1}", parameter="b", value=b)
    return enc[b] ^ (ok_j & 1)
