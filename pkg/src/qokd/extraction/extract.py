"""
Oblivious key extraction from raw-key transcripts.
"""

import logging
import math
from typing import Iterable

import numpy as np

from qokd.core.bits import bits_from_array
from qokd.core.exceptions import ValidationError
from qokd.core.models import VerdictCode
from qokd.domain.entities import KeyGuess, ObliviousKeyView, RawKeyTranscript
from qokd.domain.services import ExtractionScheme
from qokd.extraction.combinatorics import ranks_within
from qokd.extraction.schemes import GeneralizedScheme, ModifiedScheme

__all__ = [
    "as_mask",
    "extract",
    "count_known",
    "knowable_adjacent_parities",
    "knowable_pair_parities_generalized",
]

logger = logging.getLogger(__name__)


def as_mask(conclusive: "Iterable[int] | np.ndarray", length: int) -> np.ndarray:
    """Normalize an index set or boolean array to a boolean mask of length."""
    if isinstance(conclusive, np.ndarray) and conclusive.dtype == np.bool_:
        if conclusive.shape[0] != length:
            raise ValidationError(
                f"Mask has length {conclusive.shape[0]}, expected {length}",
                parameter="conclusive",
            )
        return conclusive
    mask = np.zeros(length, dtype=bool)
    idx = np.fromiter((int(i) for i in conclusive), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= length):
        raise ValidationError("Conclusive index out of range", parameter="conclusive")
    mask[idx] = True
    return mask


def extract(t: RawKeyTranscript, scheme: ExtractionScheme, with_guesses: bool = False) -> ObliviousKeyView:
    """
    Derive both views of the oblivious key.

    Bob's key is the XOR of his bits over each definition. Alice knows key
    bit j exactly when every position of definition j is conclusive; its
    value is the XOR of her conclusive bits there. Where Bob's bits are
    undefined (biased states) the key bits are marked unreliable.

    With with_guesses, every unknown bit also gets Alice's best guess: the
    XOR of her per-position guesses, with the group guess probability as
    confidence (1/2 when some position carries no guess).

    Raises:
        SchemeMismatchError: If the transcript length does not fit the scheme
    """
    scheme.check_raw_length(t.n)

    conclusive = t.conclusive_mask
    known = scheme.known_mask(conclusive)

    bob_raw = t.bob_bit
    defined = bob_raw >= 0
    bob_key = scheme.window_xor(np.where(defined, bob_raw, 0).astype(np.uint8))
    unreliable = None
    if not np.all(defined):
        unreliable = bits_from_array(~scheme.known_mask(defined))

    alice_raw = t.alice_bits
    alice_key = scheme.window_xor(np.where(conclusive, alice_raw, 0).astype(np.uint8))
    known_idx = np.flatnonzero(known)
    alice_known = dict(zip(known_idx.tolist(), alice_key[known_idx].tolist()))

    guesses = None
    if with_guesses:
        from qokd.analytics.guessing import guess_prob_group

        guess_key = scheme.window_xor(np.where(alice_raw >= 0, alice_raw, 0).astype(np.uint8))
        unknown_counts = scheme.k - scheme.window_sums(conclusive)
        blind = scheme.window_sums(t.verdict == VerdictCode.NO_GUESS) > 0
        guesses = {}
        for j in np.flatnonzero(~known).tolist():
            x = int(unknown_counts[j])
            confidence = 0.5 if blind[j] else guess_prob_group(x)
            guesses[j] = KeyGuess(int(guess_key[j]), confidence, x)

    view = ObliviousKeyView(
        bob_key=bits_from_array(bob_key),
        alice_known=alice_known,
        scheme=scheme.tag,
        alice_guesses=guesses,
        unreliable=unreliable,
        k=scheme.k,
        raw_length=scheme.raw_length,
    )
    logger.debug("extracted %s key n=%d known=%d", scheme.tag, scheme.n, view.known_count)
    return view


def count_known(conclusive: "Iterable[int] | np.ndarray", scheme: ExtractionScheme) -> int:
    """
    Number of key bits Alice knows, without computing their values.

    For the generalized scheme with X conclusive qubits, the k-subsets of the
    conclusive set are ranked directly when binom(X, k) is below N; only
    those with rank < N are key bits.
    """
    mask = as_mask(conclusive, scheme.raw_length)
    if isinstance(scheme, GeneralizedScheme):
        x = int(np.count_nonzero(mask))
        if math.comb(x, scheme.k) < scheme.n:
            return sum(1 for r in ranks_within(np.flatnonzero(mask), scheme.k) if r < scheme.n)
    return scheme.window_count(mask)


def knowable_adjacent_parities(conclusive: "Iterable[int] | np.ndarray", scheme: ModifiedScheme) -> set[int]:
    """
    Key indices j whose parity with key bit j + 1 Alice can compute.

    The windows of j and j + 1 share all but positions j and j + k, so the
    parity is known when both of those are conclusive.
    """
    if not isinstance(scheme, ModifiedScheme):
        raise ValidationError("Adjacent parities are defined for the modified scheme", parameter="scheme")
    mask = as_mask(conclusive, scheme.n)
    both = mask & np.roll(mask, -scheme.k)
    return set(np.flatnonzero(both).tolist())


def knowable_pair_parities_generalized(conclusive: "Iterable[int] | np.ndarray", scheme: GeneralizedScheme) -> int:
    """
    Count key-bit pairs (j1 < j2) whose parity Alice can compute.

    The parity of two key bits is the XOR over the symmetric difference of
    their subsets, so it is known when that difference is all conclusive.
    Quadratic in N; meant for small instances.
    """
    if not isinstance(scheme, GeneralizedScheme):
        raise ValidationError("Pair parities are counted for the generalized scheme", parameter="scheme")
    mask = as_mask(conclusive, scheme.m)
    packed = 0
    for i in np.flatnonzero(mask).tolist():
        packed |= 1 << i
    masks = [int(d) for d in scheme.masks]
    outside = ~packed
    total = 0
    for a in range(len(masks)):
        da = masks[a]
        total += sum(1 for db in masks[a + 1:] if ((da ^ db) & outside) == 0)
    return total
