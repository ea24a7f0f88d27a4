"""
Key extraction schemes.

Provides three schemes for turning a raw key into an N-bit oblivious key:
1. OriginalScheme - N disjoint groups of k consecutive qubits (raw length kN)
2. ModifiedScheme - N overlapping circular windows of k qubits (raw length N)
3. GeneralizedScheme - the first N k-subsets of M qubits in colex order
"""

import math
from functools import lru_cache

import numpy as np

from qokd.core.exceptions import SchemeMismatchError, ValidationError
from qokd.core.limits import validate_positive
from qokd.domain.entities import KeyBitDefinition
from qokd.domain.services import ExtractionScheme
from qokd.extraction.combinatorics import iter_colex_masks, mask_to_subset, min_M

__all__ = [
    "OriginalScheme",
    "ModifiedScheme",
    "GeneralizedScheme",
    "SCHEME_TAGS",
    "make_scheme",
    "circular_window_sums",
    "circular_window_xor",
    "popcount64",
]

SCHEME_TAGS = ("original", "modified", "generalized")


def circular_window_sums(mask: np.ndarray, k: int) -> np.ndarray:
    """
    out[j] = mask[j] + ... + mask[(j + k - 1) mod n] for every j.

    Works for any 1 <= k <= n through a prefix sum over the wrapped array.
    """
    mask = np.asarray(mask)
    n = mask.shape[0]
    ext = np.concatenate([mask, mask[: k - 1]]).astype(np.int32)
    cs = np.zeros(ext.shape[0] + 1, dtype=np.int64)
    cs[1:] = np.cumsum(ext, dtype=np.int64)
    return (cs[k: k + n] - cs[:n]).astype(np.int32)


def circular_window_xor(bits: np.ndarray, k: int) -> np.ndarray:
    """out[j] = bits[j] ^ ... ^ bits[(j + k - 1) mod n], via a prefix XOR."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[0]
    ext = np.concatenate([bits, bits[: k - 1]])
    px = np.zeros(ext.shape[0] + 1, dtype=np.uint8)
    px[1:] = np.bitwise_xor.accumulate(ext)
    return px[k: k + n] ^ px[:n]


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def popcount64(x: np.ndarray) -> np.ndarray:
    """Set-bit count of each uint64 (SWAR)."""
    x = np.asarray(x, dtype=np.uint64)
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    with np.errstate(over="ignore"):
        return ((x * _H01) >> np.uint64(56)).astype(np.int32)


class OriginalScheme(ExtractionScheme):
    """
    Key bit j is the XOR of raw positions jk .. jk + k - 1.

    Example:
        scheme = OriginalScheme(k=2, n=2)
        scheme.window_xor(np.array([0, 1, 1, 0]))  # -> [1, 1]
    """

    tag = "original"

    def __init__(self, k: int, n: int):
        validate_positive(k, "k")
        validate_positive(n, "n")
        super().__init__(k, n)

    @property
    def raw_length(self) -> int:
        return self.k * self.n

    def definition(self, j: int) -> KeyBitDefinition:
        start = j * self.k
        return KeyBitDefinition(j, frozenset(range(start, start + self.k)))

    def window_sums(self, mask: np.ndarray) -> np.ndarray:
        return np.asarray(mask).reshape(self.n, self.k).sum(axis=1, dtype=np.int32)

    def window_xor(self, bits: np.ndarray) -> np.ndarray:
        return np.bitwise_xor.reduce(np.asarray(bits, dtype=np.uint8).reshape(self.n, self.k), axis=1)


class ModifiedScheme(ExtractionScheme):
    """
    Key bit j is the XOR of the circular window j .. j + k - 1 (mod N).

    Example:
        scheme = ModifiedScheme(k=2, n=4)
        scheme.window_xor(np.array([0, 1, 1, 0]))  # -> [1, 0, 1, 0]
    """

    tag = "modified"

    def __init__(self, k: int, n: int):
        validate_positive(k, "k")
        validate_positive(n, "n")
        if k > n:
            raise SchemeMismatchError(
                f"Window size k={k} exceeds key length {n}",
                scheme=self.tag,
                expected=n,
                actual=k,
            )
        super().__init__(k, n)

    @property
    def raw_length(self) -> int:
        return self.n

    def definition(self, j: int) -> KeyBitDefinition:
        return KeyBitDefinition(j, frozenset((j + i) % self.n for i in range(self.k)))

    def window_sums(self, mask: np.ndarray) -> np.ndarray:
        return circular_window_sums(mask, self.k)

    def window_xor(self, bits: np.ndarray) -> np.ndarray:
        return circular_window_xor(bits, self.k)


@lru_cache(maxsize=8)
def _colex_table(m: int, k: int, n: int) -> np.ndarray | tuple[int, ...]:
    masks = iter_colex_masks(k, n)
    if m <= 64:
        out = np.fromiter(masks, dtype=np.uint64, count=n)
        out.setflags(write=False)
        return out
    return tuple(masks)


class GeneralizedScheme(ExtractionScheme):
    """
    Key bit j is the parity of the j-th k-subset of the M raw qubits, in
    colex order. M defaults to the smallest value with binom(M, k) >= N.

    Subset masks are enumerated once per (M, k, N) and cached.
    """

    tag = "generalized"

    def __init__(self, m: int | None, k: int, n: int):
        validate_positive(k, "k")
        validate_positive(n, "n")
        if m is None:
            m = min_M(n, k)
        if m < k or math.comb(m, k) < n:
            raise SchemeMismatchError(
                f"binom({m}, {k}) is smaller than the key length {n}",
                scheme=self.tag,
                expected=n,
                actual=math.comb(m, k) if m >= k else 0,
            )
        super().__init__(k, n)
        self.m = m

    @property
    def raw_length(self) -> int:
        return self.m

    @property
    def masks(self) -> np.ndarray | tuple[int, ...]:
        return _colex_table(self.m, self.k, self.n)

    def definition(self, j: int) -> KeyBitDefinition:
        if not 0 <= j < self.n:
            raise ValidationError(f"Key index {j} out of range", parameter="j", value=j)
        return KeyBitDefinition(j, frozenset(mask_to_subset(int(self.masks[j]))))

    @staticmethod
    def _pack(values: np.ndarray) -> int:
        out = 0
        for i in np.flatnonzero(np.asarray(values)).tolist():
            out |= 1 << i
        return out

    def window_sums(self, mask: np.ndarray) -> np.ndarray:
        packed = self._pack(mask)
        masks = self.masks
        if isinstance(masks, np.ndarray):
            return popcount64(masks & np.uint64(packed))
        return np.fromiter(((d & packed).bit_count() for d in masks), dtype=np.int32, count=self.n)

    def window_xor(self, bits: np.ndarray) -> np.ndarray:
        return (self.window_sums(bits) & 1).astype(np.uint8)

    def describe(self) -> dict[str, int | str]:
        return {**super().describe(), "m": self.m}

    def __repr__(self) -> str:
        return f"GeneralizedScheme(m={self.m}, k={self.k}, n={self.n})"


def make_scheme(name: str, n: int, k: int, m: int | None = None) -> ExtractionScheme:
    """Build a scheme from its name and parameters."""
    if name == "original":
        return OriginalScheme(k, n)
    if name == "modified":
        return ModifiedScheme(k, n)
    if name == "generalized":
        return GeneralizedScheme(m, k, n)
    raise ValidationError(f"Unknown scheme: {name}", parameter="scheme", value=name)
