"""
Exact k-subset combinatorics in colexicographic order.

A k-subset of {0..M-1} is written as an integer bitmask (bit i set when i is
a member). Colex order is then plain integer order of the masks, and the
next mask follows from Gosper's bit trick.
"""

import math
import warnings
from itertools import combinations
from typing import Iterable, Iterator

from qokd.core.exceptions import ValidationError
from qokd.core.limits import MAX_COLEX_ENUMERATION, validate_positive

__all__ = [
    "colex_rank",
    "colex_unrank",
    "next_colex_mask",
    "iter_colex_masks",
    "mask_to_subset",
    "subset_to_mask",
    "ranks_within",
    "min_M",
    "count_full_space",
]


def subset_to_mask(subset: Iterable[int]) -> int:
    mask = 0
    for i in subset:
        mask |= 1 << int(i)
    return mask


def mask_to_subset(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def colex_rank(subset: Iterable[int]) -> int:
    """
    Position of a subset in colex order.

    For c_0 < c_1 < ... < c_{k-1} the rank is sum(binom(c_i, i + 1)).

    Example:
        colex_rank({0, 1}) == 0
        colex_rank({0, 2}) == 1
        colex_rank({1, 2}) == 2
    """
    return sum(math.comb(c, i + 1) for i, c in enumerate(sorted(int(c) for c in subset)))


def colex_unrank(rank: int, k: int) -> tuple[int, ...]:
    """Inverse of colex_rank for k-subsets."""
    if rank < 0:
        raise ValidationError("Rank must be non-negative", parameter="rank", value=rank)
    out = []
    for i in range(k, 0, -1):
        # largest c with binom(c, i) <= rank
        c = i - 1
        while math.comb(c + 1, i) <= rank:
            c += 1
        out.append(c)
        rank -= math.comb(c, i)
    return tuple(reversed(out))


def next_colex_mask(v: int) -> int:
    """Next mask with the same popcount, in increasing order (Gosper)."""
    t = (v | (v - 1)) + 1
    return t | ((((t & -t) // (v & -v)) >> 1) - 1)


def iter_colex_masks(k: int, count: int) -> Iterator[int]:
    """
    Yield the first count k-subset masks in colex order.

    Warns when the enumeration is unusually large.
    """
    if k < 1:
        raise ValidationError("k must be >= 1", parameter="k", value=k)
    if count > MAX_COLEX_ENUMERATION:
        warnings.warn(
            f"Enumerating {count:,} colex subsets; this may be slow",
            UserWarning,
            stacklevel=2,
        )
    v = (1 << k) - 1
    for _ in range(count):
        yield v
        v = next_colex_mask(v)


def ranks_within(members: Iterable[int], k: int) -> Iterator[int]:
    """Colex ranks of every k-subset of members."""
    for combo in combinations(sorted(int(m) for m in members), k):
        yield colex_rank(combo)


def count_full_space(x: int, k: int) -> int:
    """Number of k-subsets of x conclusive qubits, binom(x, k)."""
    return math.comb(x, k)


def min_M(n: int, k: int) -> int:
    """
    Smallest M with binom(M, k) >= n, in exact integers.

    Examples:
        min_M(10**5, 4) == 41
        min_M(10**5, 8) == 20
        min_M(10**10, 12) == 42
        min_M(1, 1) == 1
    """
    validate_positive(n, "n")
    validate_positive(k, "k")
    lo, hi = k, k + n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if math.comb(mid, k) >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo
