"""
Born-rule model of single planar qubits.

States are octants on the real great circle of the Bloch sphere. The
squared overlap between two states depends only on their circular octant
distance d, as cos^2(22.5 deg * d). That gives 1/2 between states of
different SARG04 bases, 0 between orthogonal states and p_plus / p_minus
between a diagonal state and its neighbours. All probabilities below come
from that one table.

Scalar functions work on QubitState values. The *_many variants apply the
same rules to numpy octant arrays and are what the exchange uses.
"""

import math

import numpy as np

from qokd.core.exceptions import ValidationError
from qokd.core.models import (
    Announcement,
    Basis,
    Conclusive,
    Conclusiveness,
    Inconclusive,
    QubitState,
    SARG04_STATES,
    VerdictCode,
    circular_distance,
)
from qokd.core.rng import RandomStream

__all__ = [
    "P_PLUS",
    "P_MINUS",
    "P_USD",
    "OVERLAP_BY_DISTANCE",
    "OVERLAP_MATRIX",
    "NO_OUTCOME",
    "overlap_sq",
    "outcome_probabilities",
    "measure",
    "measure_many",
    "discriminate_many",
    "conclusiveness",
    "verdict_table",
    "usd_success_from_overlap",
    "usd_success_prob",
    "conclusive_probability",
]

P_PLUS = 0.5 + 1.0 / (2.0 * math.sqrt(2.0))
P_MINUS = 0.5 - 1.0 / (2.0 * math.sqrt(2.0))
P_USD = 1.0 - 1.0 / math.sqrt(2.0)

# cos^2(22.5 deg * d) for d = 0..4
OVERLAP_BY_DISTANCE = (1.0, P_PLUS, 0.5, P_MINUS, 0.0)

OVERLAP_MATRIX = np.array(
    [[OVERLAP_BY_DISTANCE[circular_distance(a, b)] for b in range(8)] for a in range(8)],
    dtype=np.float64,
)

# Marker for "no outcome" in octant arrays (failed discrimination)
NO_OUTCOME = -1


def overlap_sq(a: QubitState, b: QubitState) -> float:
    """
    Squared overlap |<a|b>|^2 of two states.

    Examples:
        overlap_sq(UP, UP) == 1.0
        overlap_sq(UP, RIGHT) == 0.5
        overlap_sq(UP, DOWN) == 0.0
    """
    return OVERLAP_BY_DISTANCE[circular_distance(a, b)]


def outcome_probabilities(state: QubitState, basis: Basis) -> dict[QubitState, float]:
    """Born-rule distribution of the two outcomes of measuring state in basis."""
    first, second = basis.states
    p_first = overlap_sq(state, first)
    return {first: p_first, second: 1.0 - p_first}


def measure(state: QubitState, basis: Basis, rng: RandomStream) -> QubitState:
    """
    Projectively measure one qubit.

    Args:
        state: Prepared state (any of the six)
        basis: Measurement basis
        rng: Random stream

    Returns:
        The observed eigenstate of basis
    """
    first, second = basis.states
    return first if rng.random() < overlap_sq(state, first) else second


def measure_many(states: np.ndarray, bases: np.ndarray, rng: RandomStream) -> np.ndarray:
    """
    Measure an array of states, each in its own basis.

    Args:
        states: Octant array (int8)
        bases: Basis bits, 0 for up-down and 1 for left-right

    Returns:
        Octant array of outcomes
    """
    states = np.asarray(states, dtype=np.int8)
    bases = np.asarray(bases, dtype=np.int8)
    first = np.where(bases == 0, QubitState.UP, QubitState.RIGHT).astype(np.int8)
    p_first = OVERLAP_MATRIX[states, first]
    hit = rng.random(states.shape[0]) < p_first
    return np.where(hit, first, (first + 4) % 8).astype(np.int8)


def discriminate_many(states: np.ndarray, rng: RandomStream, success: float = P_USD) -> np.ndarray:
    """
    Individual unambiguous state discrimination, one qubit at a time.

    Each attempt succeeds independently with probability success. A success
    reveals the prepared state; a failure yields NO_OUTCOME.
    """
    states = np.asarray(states, dtype=np.int8)
    ok = rng.random(states.shape[0]) < success
    return np.where(ok, states, NO_OUTCOME).astype(np.int8)


def conclusiveness(outcome: QubitState, ann: Announcement) -> Conclusiveness:
    """
    Evaluate a measurement outcome against Bob's announced pair.

    If the outcome is orthogonal to exactly one announced state, that state
    is excluded and the other one (with its basis bit) must have been sent.
    Otherwise the result is inconclusive and Alice guesses the announced
    state equal to the outcome, or the nearer one if neither matches (ties
    toward bit 0).

    Raises:
        ValidationError: If outcome is a diagonal state
    """
    outcome = QubitState(outcome)
    if outcome.is_diagonal:
        raise ValidationError(
            "Only basis eigenstates can be measurement outcomes",
            parameter="outcome",
            value=outcome.name,
        )

    excluded = [s for s in ann.states if overlap_sq(outcome, s) == 0.0]
    if len(excluded) == 1:
        return Conclusive(ann.other(excluded[0]).bit)

    if outcome in ann:
        return Inconclusive(outcome.bit)

    first, second = ann.states
    o1, o2 = overlap_sq(outcome, first), overlap_sq(outcome, second)
    if o1 == o2:
        return Inconclusive(0)
    return Inconclusive(first.bit if o1 > o2 else second.bit)


def _build_verdict_table() -> np.ndarray:
    table = np.full((8, 8, 8), VerdictCode.INVALID, dtype=np.int8)
    for lo in SARG04_STATES:
        for hi in SARG04_STATES:
            try:
                ann = Announcement(lo, hi)
            except ValidationError:
                continue
            for outcome in SARG04_STATES:
                code = VerdictCode.of(conclusiveness(outcome, ann))
                table[outcome, ann.first, ann.second] = code
                table[outcome, ann.second, ann.first] = code
    table.setflags(write=False)
    return table


_VERDICT_TABLE = _build_verdict_table()


def verdict_table() -> np.ndarray:
    """
    Read-only lookup [outcome, ann_lo, ann_hi] -> verdict code.

    Codes are VerdictCode values; INVALID marks impossible combinations.
    Built from conclusiveness() so vectorised and scalar paths agree.
    """
    return _VERDICT_TABLE


def usd_success_from_overlap(overlap: float) -> float:
    """USD success bound 1 - F for a pair with squared overlap `overlap`."""
    if not 0.0 <= overlap <= 1.0:
        raise ValidationError("Overlap must lie in [0, 1]", parameter="overlap", value=overlap)
    return 1.0 - math.sqrt(overlap)


def usd_success_prob(ann: Announcement) -> float:
    """
    Best success probability of unambiguously discriminating the pair.

    Equals 1 - 1/sqrt(2) ~= 0.2929 for every SARG04 pair.
    """
    return usd_success_from_overlap(overlap_sq(ann.first, ann.second))


def conclusive_probability(sent: QubitState, ann: Announcement) -> float:
    """
    Exact probability that an honest random-basis measurement of sent is
    conclusive against ann.
    """
    total = 0.0
    for basis in Basis:
        for outcome, p in outcome_probabilities(sent, basis).items():
            if isinstance(conclusiveness(outcome, ann), Conclusive):
                total += 0.5 * p
    return total
