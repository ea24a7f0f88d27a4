"""
Raw key generation by repeated SARG04 rounds.
"""

import logging
from typing import NamedTuple

import numpy as np

from qokd.core.exceptions import TranscriptError, ValidationError
from qokd.core.limits import validate_positive, validate_raw_qubits
from qokd.core.models import Announcement, QubitState, VerdictCode
from qokd.core.rng import RandomStream
from qokd.domain.entities import MeasurementRequest, RawKeyTranscript
from qokd.domain.services import AliceStrategy, BobStrategy
from qokd.exchange.strategies import BiasBob, UsdIndividualAlice
from qokd.quantum.model import conclusive_probability, discriminate_many, measure_many

__all__ = [
    "GuessStats",
    "run_exchange",
    "referee_measure",
    "bias_conclusive_probability",
    "guess_accuracy_stats",
]

logger = logging.getLogger(__name__)


class GuessStats(NamedTuple):
    conclusive_fraction: float
    inconclusive_guess_accuracy: float | None
    conclusive_count: int
    inconclusive_count: int


def referee_measure(sent: np.ndarray, request: MeasurementRequest, rng: RandomStream) -> np.ndarray:
    """
    Apply Alice's measurement request to Bob's prepared qubits.

    Returns:
        Octant array of outcomes, -1 where discrimination failed
    """
    sent = np.asarray(sent, dtype=np.int8)
    if request.mode == "usd":
        return discriminate_many(sent, rng)
    bases = np.asarray(request.bases, dtype=np.int8)
    if bases.shape[0] != sent.shape[0]:
        raise ValidationError(
            f"Got {bases.shape[0]} bases for {sent.shape[0]} qubits",
            parameter="bases",
        )
    return measure_many(sent, bases, rng)


def run_exchange(n: int, alice: AliceStrategy, bob: BobStrategy, rng: RandomStream) -> RawKeyTranscript:
    """
    Simulate n SARG04 rounds.

    Bob prepares and announces, the channel applies Alice's request and
    Alice judges the outcomes. Draws happen in that fixed order, so a
    given stream always yields the same transcript.

    Args:
        n: Number of rounds (>= 1)
        alice: Alice's strategy
        bob: Bob's strategy
        rng: Random stream

    Returns:
        Raw-key transcript of length n

    Raises:
        ValidationError: On n < 1, an oversized n, or USD against biased states
    """
    validate_positive(n, "n")
    validate_raw_qubits(n)
    if isinstance(alice, UsdIndividualAlice) and isinstance(bob, BiasBob):
        raise ValidationError(
            "Unambiguous discrimination is undefined for diagonal states",
            parameter="alice",
            value=alice.name,
        )

    prep = bob.prepare(n, rng)
    request = alice.request(n, rng)
    outcomes = referee_measure(prep.sent, request, rng)
    verdicts = alice.evaluate(outcomes, prep.ann_lo, prep.ann_hi)

    transcript = RawKeyTranscript(
        sent=prep.sent,
        ann_lo=prep.ann_lo,
        ann_hi=prep.ann_hi,
        outcome=outcomes,
        verdict=verdicts,
        bob_bit=prep.bob_bit,
        alice_strategy=alice.name,
        bob_strategy=bob.name,
    )
    logger.debug("exchange n=%d alice=%s bob=%s conclusive=%d",
                 n, alice.name, bob.name, int(np.count_nonzero(transcript.conclusive_mask)))
    return transcript


def bias_conclusive_probability(sent: QubitState, ann: Announcement) -> float:
    """
    Exact chance that an honest Alice is conclusive on a diagonal state.

    Examples:
        bias_conclusive_probability(SW, {UP,RIGHT}) ~= 0.8536
        bias_conclusive_probability(NE, {UP,RIGHT}) ~= 0.1464

    Raises:
        ValidationError: If sent is not diagonal
    """
    sent = QubitState(sent)
    if not sent.is_diagonal:
        raise ValidationError(
            "Biasing needs a diagonal state",
            parameter="sent",
            value=sent.name,
        )
    return conclusive_probability(sent, ann)


def guess_accuracy_stats(t: RawKeyTranscript) -> GuessStats:
    """
    Conclusive fraction and the hit rate of Alice's inconclusive guesses.

    The accuracy is None when there are no inconclusive records.

    Raises:
        TranscriptError: If Bob's bits are undefined or Alice does not guess
    """
    if t.n == 0:
        raise TranscriptError("Transcript is empty")
    bob = t.bob_bits()
    if t.alice_strategy == "usd" or np.any(t.verdict == VerdictCode.NO_GUESS):
        raise TranscriptError(
            "Transcript has inconclusive records without a guess",
            details={"alice_strategy": t.alice_strategy},
        )
    conclusive = int(np.count_nonzero(t.conclusive_mask))
    guesses = t.guess_mask
    inconclusive = int(np.count_nonzero(guesses))
    accuracy = None
    if inconclusive:
        hits = np.count_nonzero(t.alice_bits[guesses] == bob[guesses])
        accuracy = float(hits) / inconclusive
    return GuessStats(
        conclusive_fraction=conclusive / t.n,
        inconclusive_guess_accuracy=accuracy,
        conclusive_count=conclusive,
        inconclusive_count=inconclusive,
    )
