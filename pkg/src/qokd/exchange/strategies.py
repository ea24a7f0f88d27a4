"""
Party strategies for the SARG04 exchange.

Provides two strategies for each side:
1. HonestBob - uniform SARG04 state with a uniform non-orthogonal decoy
2. BiasBob - diagonal states that push conclusiveness up or down
3. HonestImmediateAlice - measures every qubit in a random basis
4. UsdIndividualAlice - unambiguous discrimination, one qubit at a time
"""

import numpy as np

from qokd.core.exceptions import ValidationError
from qokd.core.models import QubitState, VerdictCode
from qokd.core.rng import RandomStream
from qokd.domain.entities import UNDEFINED_BIT, MeasurementRequest, Preparation
from qokd.domain.services import AliceStrategy, BobStrategy
from qokd.quantum.model import NO_OUTCOME, P_MINUS, verdict_table

__all__ = [
    "HonestBob",
    "BiasBob",
    "HonestImmediateAlice",
    "UsdIndividualAlice",
    "split_attack_positions",
    "ALICE_STRATEGIES",
    "BOB_STRATEGIES",
    "make_alice",
    "make_bob",
]


def _pair(sent: np.ndarray, decoy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.minimum(sent, decoy).astype(np.int8), np.maximum(sent, decoy).astype(np.int8)


class HonestBob(BobStrategy):
    """
    Sends a uniformly random SARG04 state and announces it together with a
    uniformly chosen state of the other basis.

    Example:
        prep = HonestBob().prepare(1000, rng)
        assert set(prep.bob_bit) <= {0, 1}
    """

    @property
    def name(self) -> str:
        return "honest"

    def prepare(self, n: int, rng: RandomStream) -> Preparation:
        bits = rng.integers(0, 2, size=n, dtype=np.int8)
        flips = rng.integers(0, 2, size=n, dtype=np.int8)
        decoy_flips = rng.integers(0, 2, size=n, dtype=np.int8)
        # basis bit b lives at octants 2b and 2b + 4
        sent = (2 * bits + 4 * flips).astype(np.int8)
        decoy = (2 * (1 - bits) + 4 * decoy_flips).astype(np.int8)
        lo, hi = _pair(sent, decoy)
        return Preparation(sent=sent, ann_lo=lo, ann_hi=hi, bob_bit=bits)


class BiasBob(BobStrategy):
    """
    Conclusiveness-biasing Bob.

    Announces {UP,RIGHT} or {DOWN,LEFT} uniformly. At plus positions he sends
    the diagonal state that makes an honest Alice conclusive with p_plus,
    elsewhere the one giving p_minus. Diagonal states carry no basis bit, so
    every bob_bit is undefined.
    """

    def __init__(self, plus_positions: "set[int] | range | np.ndarray"):
        self.plus_positions = plus_positions

    @property
    def name(self) -> str:
        return "bias"

    def plus_mask(self, n: int) -> np.ndarray:
        positions = self.plus_positions
        if isinstance(positions, np.ndarray) and positions.dtype == np.bool_:
            if positions.shape[0] != n:
                raise ValidationError(
                    "Plus mask length differs from the number of rounds",
                    parameter="plus_positions",
                    value=int(positions.shape[0]),
                )
            return positions
        mask = np.zeros(n, dtype=bool)
        idx = np.fromiter((int(i) for i in positions), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValidationError("Plus position out of range", parameter="plus_positions")
        mask[idx] = True
        return mask

    def prepare(self, n: int, rng: RandomStream) -> Preparation:
        plus = self.plus_mask(n)
        pair = rng.integers(0, 2, size=n, dtype=np.int8)
        lo = (4 * pair).astype(np.int8)
        hi = (lo + 2).astype(np.int8)
        # the bisector of each pair gives p_minus; its antipode gives p_plus
        bisector = lo + 1
        sent = np.where(plus, (bisector + 4) % 8, bisector).astype(np.int8)
        return Preparation(
            sent=sent,
            ann_lo=lo,
            ann_hi=hi,
            bob_bit=np.full(n, UNDEFINED_BIT, dtype=np.int8),
        )


def split_attack_positions(n: int) -> range:
    """
    Plus segment of the split attack: the first round(p_minus * n) rounds.

    With that split the overall conclusive fraction stays at 2 p_plus p_minus,
    which equals the honest 1/4.
    """
    return range(int(round(P_MINUS * n)))


class HonestImmediateAlice(AliceStrategy):
    """Measures immediately in a uniformly random basis."""

    @property
    def name(self) -> str:
        return "honest"

    def request(self, n: int, rng: RandomStream) -> MeasurementRequest:
        return MeasurementRequest("basis", rng.integers(0, 2, size=n, dtype=np.int8))

    def evaluate(self, outcomes: np.ndarray, ann_lo: np.ndarray, ann_hi: np.ndarray) -> np.ndarray:
        outcomes = np.asarray(outcomes, dtype=np.int8)
        if outcomes.size and outcomes.min() < 0:
            raise ValidationError("Basis measurement left positions without outcome", parameter="outcomes")
        codes = verdict_table()[outcomes, ann_lo, ann_hi]
        if np.any(codes == VerdictCode.INVALID):
            raise ValidationError("Outcome or announcement is not a SARG04 state", parameter="outcomes")
        return codes.astype(np.int8)


class UsdIndividualAlice(AliceStrategy):
    """
    Delays measurement until the announcement and tries unambiguous
    discrimination on each qubit. A success reveals the sent state and so
    the bit; a failure leaves no usable guess.
    """

    @property
    def name(self) -> str:
        return "usd"

    def request(self, n: int, rng: RandomStream) -> MeasurementRequest:
        return MeasurementRequest("usd")

    def evaluate(self, outcomes: np.ndarray, ann_lo: np.ndarray, ann_hi: np.ndarray) -> np.ndarray:
        outcomes = np.asarray(outcomes, dtype=np.int8)
        found = outcomes != NO_OUTCOME
        if np.any(found & (outcomes % 2 == 1)):
            raise ValidationError("Discrimination of diagonal states is undefined", parameter="outcomes")
        codes = np.full(outcomes.shape[0], VerdictCode.NO_GUESS, dtype=np.int8)
        # octants 0,4 carry bit 0 and 2,6 carry bit 1
        codes[found] = (outcomes[found] // 2) % 2 + VerdictCode.CONCLUSIVE_0
        return codes


ALICE_STRATEGIES = ("honest", "usd")
BOB_STRATEGIES = ("honest", "bias", "bias-plus", "bias-minus")


def make_bob(name: str, n: int | None = None) -> BobStrategy:
    """Build a Bob strategy by name; 'bias' uses the split-attack segment."""
    if name == "honest":
        return HonestBob()
    if name not in ("bias", "bias-plus", "bias-minus"):
        raise ValidationError(f"Unknown Bob strategy: {name}", parameter="bob", value=name)
    if n is None:
        raise ValidationError("Bias strategies need the raw length", parameter="n")
    if name == "bias":
        return BiasBob(split_attack_positions(n))
    return BiasBob(np.full(n, name == "bias-plus", dtype=bool))


def make_alice(name: str) -> AliceStrategy:
    if name == "honest":
        return HonestImmediateAlice()
    if name == "usd":
        return UsdIndividualAlice()
    raise ValidationError(f"Unknown Alice strategy: {name}", parameter="alice", value=name)
