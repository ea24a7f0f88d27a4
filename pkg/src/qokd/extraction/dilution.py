"""
Dilution: XOR-combining several oblivious keys under cyclic shifts.

The final key is fin[j] = key_1[j + s_1] ^ ... ^ key_r[j + s_r] (mod N).
Alice knows fin[j] only if she knows every term, so her known set is the
intersection of the shifted known sets. She picks the shifts; picking them
well keeps a few more bits alive than random shifts do.
"""

import logging
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from bitarray import bitarray, frozenbitarray
from bitarray.util import zeros

from qokd.core.exceptions import ValidationError
from qokd.domain.entities import ObliviousKeyView

__all__ = [
    "DilutionPlan",
    "dilute",
    "combine_known",
    "shift_overlap_counts",
    "optimal_shift",
    "greedy_dilution_shifts",
    "surviving_after",
]

logger = logging.getLogger(__name__)

# Above this many index pairs the overlap scan switches to an FFT
_PAIRWISE_LIMIT = 4_000_000


class DilutionPlan(NamedTuple):
    shifts: list[int]
    survivors: list[int]


def _rotate(bits: frozenbitarray, s: int) -> bitarray:
    """rot[j] = bits[(j + s) mod N]."""
    return bits[s:] + bits[:s]


def dilute(keys: Sequence[ObliviousKeyView], shifts: Sequence[int]) -> ObliviousKeyView:
    """
    Combine r keys with Alice's shifts.

    Raises:
        ValidationError: On an empty key list, a shift count mismatch or
            keys of different lengths
    """
    if not keys:
        raise ValidationError("Dilution needs at least one key", parameter="keys")
    if len(shifts) != len(keys):
        raise ValidationError(
            f"Got {len(shifts)} shifts for {len(keys)} keys",
            parameter="shifts",
        )
    n = len(keys[0])
    for key in keys:
        if len(key) != n:
            raise ValidationError(
                f"Key lengths differ ({len(key)} vs {n})",
                parameter="keys",
            )

    norm = [int(s) % n for s in shifts]
    bob = zeros(n, endian="little")
    unreliable = None
    for key, s in zip(keys, norm):
        bob ^= _rotate(key.bob_key, s)
        if key.unreliable is not None:
            rot = _rotate(key.unreliable, s)
            unreliable = rot if unreliable is None else (unreliable | rot)

    first = keys[0]
    alice = combine_known([key.alice_known for key in keys], norm, n)

    return ObliviousKeyView(
        bob_key=frozenbitarray(bob),
        alice_known=alice,
        scheme="diluted",
        unreliable=frozenbitarray(unreliable) if unreliable is not None else None,
        k=first.k,
    )


def combine_known(known_maps: Sequence[Mapping[int, int]], shifts: Sequence[int], n: int) -> dict[int, int]:
    """
    Alice's side of dilution: the final bits she knows and their values.

    fin[j] is known when every key i knows index (j + s_i) mod N.
    """
    if len(known_maps) != len(shifts):
        raise ValidationError(
            f"Got {len(shifts)} shifts for {len(known_maps)} keys",
            parameter="shifts",
        )
    if not known_maps:
        return {}
    norm = [int(s) % n for s in shifts]
    # walk the first key's known set and look the others up
    out: dict[int, int] = {}
    for i, value in known_maps[0].items():
        j = (i - norm[0]) % n
        bit = value
        for known, s in zip(known_maps[1:], norm[1:]):
            other = known.get((j + s) % n)
            if other is None:
                break
            bit ^= other
        else:
            out[j] = bit
    return dict(sorted(out.items()))


def _index_array(known: "set[int] | Sequence[int] | np.ndarray") -> np.ndarray:
    return np.fromiter((int(i) for i in known), dtype=np.int64)


def shift_overlap_counts(known_a, known_b, n: int) -> np.ndarray:
    """
    counts[s] = |{j in A : (j + s) mod N in B}| for every shift s.

    Sparse sets use a bincount over the pairwise differences; large ones a
    circular cross-correlation by FFT.
    """
    a = _index_array(known_a)
    b = _index_array(known_b)
    if a.size == 0 or b.size == 0:
        return np.zeros(n, dtype=np.int64)
    if a.size * b.size <= _PAIRWISE_LIMIT:
        diffs = (b[None, :] - a[:, None]) % n
        return np.bincount(diffs.ravel(), minlength=n)
    fa = np.zeros(n)
    fb = np.zeros(n)
    fa[a] = 1.0
    fb[b] = 1.0
    corr = np.fft.irfft(np.conj(np.fft.rfft(fa)) * np.fft.rfft(fb), n=n)
    return np.rint(corr).astype(np.int64)


def optimal_shift(known_a, known_b, n: int) -> tuple[int, int]:
    """
    Shift s maximizing |{j in A : (j + s) mod N in B}|, smallest s on ties.

    Example:
        optimal_shift({0}, {3}, 5) == (3, 1)
    """
    counts = shift_overlap_counts(known_a, known_b, n)
    s = int(np.argmax(counts))
    return s, int(counts[s])


def surviving_after(known_a, known_b, s: int, n: int) -> set[int]:
    """Indices j of A with (j + s) mod N in B."""
    b = set(int(i) for i in known_b)
    return {int(j) for j in known_a if (int(j) + s) % n in b}


def greedy_dilution_shifts(known_sets: Sequence, n: int) -> DilutionPlan:
    """
    Shifts for r keys chosen one key at a time.

    The first key is unshifted. Each further key gets the optimal shift
    against the known set combined so far.

    Returns:
        The shifts and the combined known-set size after each key
    """
    if not known_sets:
        raise ValidationError("Need at least one known set", parameter="known_sets")
    combined = {int(i) for i in known_sets[0]}
    shifts = [0]
    survivors = [len(combined)]
    for known in known_sets[1:]:
        s, count = optimal_shift(combined, known, n)
        combined = surviving_after(combined, known, s, n)
        shifts.append(s)
        survivors.append(count)
    logger.debug("greedy dilution r=%d survivors=%s", len(shifts), survivors)
    return DilutionPlan(shifts, survivors)
