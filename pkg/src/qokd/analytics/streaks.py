"""
Streak statistics for Bernoulli conclusiveness strings.

A survivor is a window of k consecutive conclusive positions. Under the
modified scheme windows are circular, so each survivor is exactly one key
bit Alice knows.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from qokd.core.exceptions import ValidationError
from qokd.core.limits import validate_positive, validate_probability
from qokd.core.rng import RandomStream
from qokd.extraction.schemes import circular_window_sums

__all__ = [
    "StreakStats",
    "KChoice",
    "SurvivorCount",
    "K_ROUNDING_SLACK",
    "expected_streaks",
    "streak_stats",
    "markov_streak_bound",
    "k_for_target",
    "abort_prob_original",
    "count_windows",
    "StreamingWindowCounter",
    "simulate_survivors",
]

# log4 units subtracted before rounding k up; 9.003 becomes 9, not 10
K_ROUNDING_SLACK = 0.01

_BLOCK = 1 << 22


@dataclass(frozen=True)
class StreakStats:
    n: int
    p: float
    l: int
    expected_count: float
    at_least_one_estimate: float

    def to_dict(self) -> dict[str, float | int]:
        return {
            "N": self.n,
            "p": self.p,
            "l": self.l,
            "expected_count": self.expected_count,
            "at_least_one_estimate": self.at_least_one_estimate,
        }


class KChoice(NamedTuple):
    exact: float
    recommended: int


class SurvivorCount(NamedTuple):
    circular: int
    linear: int


def expected_streaks(n: int, p: float, l: int) -> float:
    """
    Expected number of length-l all-conclusive circular windows, N * p^l.

    Examples:
        expected_streaks(10**4, 0.25, 6) ~= 2.441
        expected_streaks(n, 1.0, l) == n
    """
    validate_positive(n, "N")
    validate_positive(l, "l")
    validate_probability(p, "p")
    return n * p ** l


def streak_stats(n: int, p: float, l: int) -> StreakStats:
    """expected_streaks with a Poisson estimate of P(at least one)."""
    e = expected_streaks(n, p, l)
    return StreakStats(n=n, p=p, l=l, expected_count=e, at_least_one_estimate=1.0 - math.exp(-e))


def markov_streak_bound(e: float, t: float) -> float:
    """Markov bound on P(streak count >= t), min(1, E / t)."""
    if e < 0:
        raise ValidationError("Expectation must be non-negative", parameter="E", value=e)
    if t <= 0:
        raise ValidationError("Threshold must be positive", parameter="t", value=t)
    return min(1.0, e / t)


def k_for_target(n: int, c: float) -> KChoice:
    """
    Window size leaving Alice about c known bits, log4(N / c).

    The recommendation rounds up after subtracting K_ROUNDING_SLACK.

    Examples:
        k_for_target(1024, 1) == KChoice(5.0, 5)
        k_for_target(10**6, 3.8).recommended == 9
    """
    if not n > c > 0:
        raise ValidationError("Need N > c > 0", parameter="c", value=c)
    exact = math.log(n / c, 4)
    return KChoice(exact, max(1, math.ceil(exact - K_ROUNDING_SLACK)))


def abort_prob_original(c: float) -> float:
    """Chance that the original scheme leaves Alice no known bit, e^-c."""
    if c < 0:
        raise ValidationError("c must be non-negative", parameter="c", value=c)
    return math.exp(-c)


def _linear_window_count(mask: np.ndarray, k: int) -> int:
    if mask.shape[0] < k:
        return 0
    cs = np.zeros(mask.shape[0] + 1, dtype=np.int64)
    cs[1:] = np.cumsum(mask, dtype=np.int64)
    return int(np.count_nonzero(cs[k:] - cs[:-k] == k))


def count_windows(mask: np.ndarray, k: int, circular: bool = True) -> int:
    """Number of all-true windows of length k, circular or linear."""
    validate_positive(k, "k")
    mask = np.asarray(mask, dtype=bool)
    if circular:
        if k > mask.shape[0]:
            return 0
        return int(np.count_nonzero(circular_window_sums(mask, k) == k))
    return _linear_window_count(mask, k)


class StreamingWindowCounter:
    """
    Count all-true windows over a mask fed block by block.

    Only the last k - 1 and the first k - 1 values are kept between blocks,
    so arbitrarily long strings can be counted in constant memory.

    Example:
        counter = StreamingWindowCounter(k=7)
        for block in blocks:
            counter.feed(block)
        result = counter.finish()   # SurvivorCount(circular, linear)
    """

    def __init__(self, k: int):
        validate_positive(k, "k")
        self.k = k
        self.length = 0
        self.linear = 0
        self._carry = np.zeros(0, dtype=bool)
        self._head = np.zeros(0, dtype=bool)

    def feed(self, block: np.ndarray) -> None:
        block = np.asarray(block, dtype=bool)
        if self._head.shape[0] < self.k - 1:
            need = self.k - 1 - self._head.shape[0]
            self._head = np.concatenate([self._head, block[:need]])
        ext = np.concatenate([self._carry, block])
        # the carry is shorter than k, so every window counted here is new
        self.linear += _linear_window_count(ext, self.k)
        self._carry = ext[max(0, ext.shape[0] - (self.k - 1)):] if self.k > 1 else ext[:0]
        self.length += block.shape[0]

    def finish(self) -> SurvivorCount:
        """Counts so far, with the wrap-around windows added for circular."""
        if self.length < self.k:
            return SurvivorCount(0, self.linear)
        wrap = _linear_window_count(np.concatenate([self._carry, self._head]), self.k)
        return SurvivorCount(self.linear + wrap, self.linear)


def simulate_survivors(n: int, k: int, p: float, rng: RandomStream, block: int = _BLOCK) -> SurvivorCount:
    """
    Draw an n-position Bernoulli(p) conclusiveness string in blocks and
    count its surviving windows.
    """
    validate_positive(n, "N")
    validate_probability(p, "p")
    counter = StreamingWindowCounter(k)
    remaining = n
    while remaining:
        size = min(block, remaining)
        counter.feed(rng.random(size) < p)
        remaining -= size
    return counter.finish()
