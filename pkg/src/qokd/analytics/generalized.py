"""
Exact binomial statistics for the generalized scheme.

With M raw qubits each conclusive with probability p, the number X of
conclusive qubits is Binomial(M, p) and Alice knows binom(X, k) key bits.
All sums are done in exact rationals, so the tail is exact for any M.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from qokd.core.exceptions import ValidationError
from qokd.core.limits import validate_positive

__all__ = [
    "GeneralizedStats",
    "generalized_stats",
    "nobit_probability",
    "prefix_nobit_probability",
    "expected_known_bruteforce",
]


@dataclass(frozen=True)
class GeneralizedStats:
    m: int
    k: int
    p: float
    nobit_prob: float
    conditional_average: float
    expected_known: float

    @property
    def nobit_percent(self) -> float:
        return 100.0 * self.nobit_prob

    def to_dict(self) -> dict[str, float | int]:
        return {
            "M": self.m,
            "k": self.k,
            "p": self.p,
            "nobit": self.nobit_prob,
            "nobit_percent": self.nobit_percent,
            "cond_avg": self.conditional_average,
            "expected_known": self.expected_known,
        }


def _check(m: int, k: int, p: float) -> Fraction:
    validate_positive(k, "k")
    if k > m:
        raise ValidationError(f"k={k} exceeds M={m}", parameter="k", value=k)
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"p must lie in (0, 1], got {p}", parameter="p", value=p)
    return Fraction(p)


def _pmf(m: int, x: int, p: Fraction) -> Fraction:
    return math.comb(m, x) * p ** x * (1 - p) ** (m - x)


def nobit_probability(m: int, k: int, p: float) -> Fraction:
    """P(Binomial(M, p) < k) as an exact fraction."""
    q = _check(m, k, p)
    return sum((_pmf(m, x, q) for x in range(k)), Fraction(0))


def expected_known_bruteforce(m: int, k: int, p: float) -> Fraction:
    """E[binom(X, k)] summed over all M + 1 outcomes of X."""
    q = _check(m, k, p)
    return sum((_pmf(m, x, q) * math.comb(x, k) for x in range(m + 1)), Fraction(0))


def generalized_stats(m: int, k: int, p: float) -> GeneralizedStats:
    """
    No-survivor probability and conditional mean of known key bits.

    nobit = P(X < k); the conditional average is
    binom(M, k) p^k / (1 - nobit), the mean of binom(X, k) given X >= k.

    Examples:
        generalized_stats(29, 5, 0.25)  # cond ~ 131, nobit ~ 11.5 %
        generalized_stats(20, 8, 0.25)  # cond ~ 19, nobit ~ 89.8 %
        generalized_stats(6, 6, 1.0)    # cond == 1, nobit == 0
    """
    q = _check(m, k, p)
    nobit = nobit_probability(m, k, p)
    expected = math.comb(m, k) * q ** k
    conditional = expected / (1 - nobit)
    return GeneralizedStats(
        m=m,
        k=k,
        p=p,
        nobit_prob=float(nobit),
        conditional_average=float(conditional),
        expected_known=float(expected),
    )


def _cdf(t: int, m: int, p: Fraction) -> Fraction:
    if t < 0:
        return Fraction(0)
    if t >= m:
        return Fraction(1)
    return sum((_pmf(m, x, p) for x in range(t + 1)), Fraction(0))


@lru_cache(maxsize=4096)
def _prefix_none(r: int, j: int, size: int, t: int, p: Fraction) -> Fraction:
    # P(|X ∩ [size]| <= t and none of the first r colex j-subsets lies in X)
    if t < 0:
        return Fraction(0)
    if r == 0:
        return _cdf(t, size, p)
    if j == 0:
        return Fraction(0)
    if math.comb(size, j) <= r:
        return _cdf(min(j - 1, t), size, p)
    # the first r subsets are all j-subsets of [top] followed by
    # {top} plus the first r - binom(top, j) (j-1)-subsets of [top]
    top = j
    while math.comb(top + 1, j) <= r:
        top += 1
    rest = size - top - 1
    tail = r - math.comb(top, j)
    total = Fraction(0)
    for d in range(min(rest, t) + 1):
        weight = _pmf(rest, d, p)
        without_top = (1 - p) * _cdf(min(j - 1, t - d), top, p)
        with_top = p * _prefix_none(tail, j - 1, top, min(j - 1, t - d - 1), p)
        total += weight * (without_top + with_top)
    return total


def prefix_nobit_probability(n: int, m: int, k: int, p: float) -> Fraction:
    """
    Chance that none of the first N colex k-subsets of M qubits is fully conclusive.

    This is the empty-key probability of a generalized key of length N.
    It equals nobit_probability(M, k, p) only when N == binom(M, k);
    for shorter keys the unused subsets raise it.
    """
    q = _check(m, k, p)
    validate_positive(n, "n")
    if n > math.comb(m, k):
        raise ValidationError(f"binom({m}, {k}) < N={n}", parameter="n", value=n)
    return _prefix_none(n, k, m, m, q)
