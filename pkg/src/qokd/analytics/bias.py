"""
Conclusiveness-biasing attack statistics and a detector for it.

Bob can raise Alice's conclusive probability to p_plus on a segment of the
raw key and lower it to p_minus elsewhere. The overall conclusive rate stays
at 1/4, but k-windows pile up in the plus segment, so Alice's known bits are
concentrated where Bob expects them. The detector looks at both the
conclusive count and the survivor-window count.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import stats

from qokd.core.exceptions import ValidationError
from qokd.core.limits import validate_positive
from qokd.core.rng import derive_rng
from qokd.domain.entities import RawKeyTranscript
from qokd.extraction.extract import as_mask
from qokd.quantum.model import P_MINUS, P_PLUS
from qokd.analytics.streaks import count_windows

__all__ = [
    "BiasStats",
    "DetectionResult",
    "SegmentCounts",
    "CALIBRATION_SEED",
    "CALIBRATION_RUNS",
    "DETECTION_THRESHOLD",
    "bias_attack_stats",
    "calibrated_streak_std",
    "bias_detection_statistic",
    "segment_streak_counts",
]

logger = logging.getLogger(__name__)

CALIBRATION_SEED = 0x5A4604
CALIBRATION_RUNS = 400
DETECTION_THRESHOLD = 3.0
MIN_DETECTION_LENGTH = 100


@dataclass(frozen=True)
class BiasStats:
    n: int
    k: int
    p_plus: float
    p_minus: float
    e_plus: float
    e_minus: float
    ratio: float
    localization: float

    def to_dict(self) -> dict[str, float | int]:
        return {
            "N": self.n,
            "k": self.k,
            "p_plus": self.p_plus,
            "p_minus": self.p_minus,
            "e_plus": self.e_plus,
            "e_minus": self.e_minus,
            "ratio": self.ratio,
            "localization": self.localization,
        }


class DetectionResult(NamedTuple):
    z_conclusive: float
    z_streaks: float
    flagged: bool
    conclusive_count: int
    streak_count: int
    streak_mean: float
    streak_std: float
    p_conclusive: float
    p_streaks: float


class SegmentCounts(NamedTuple):
    plus: int
    minus: int


def bias_attack_stats(n: int, k: int) -> BiasStats:
    """
    Expected survivor windows inside the two segments of the split attack.

    E_plus = p_minus N p_plus^k (the plus segment has p_minus N positions),
    E_minus = p_plus N p_minus^k, and their ratio is (p_plus / p_minus)^(k-1).
    The localization is the chance that a given survivor lies in the plus
    segment.
    """
    validate_positive(n, "N")
    validate_positive(k, "k")
    e_plus = P_MINUS * n * P_PLUS ** k
    e_minus = P_PLUS * n * P_MINUS ** k
    return BiasStats(
        n=n,
        k=k,
        p_plus=P_PLUS,
        p_minus=P_MINUS,
        e_plus=e_plus,
        e_minus=e_minus,
        ratio=(P_PLUS / P_MINUS) ** (k - 1),
        localization=e_plus / (e_plus + e_minus),
    )


@lru_cache(maxsize=64)
def calibrated_streak_std(n: int, k: int, runs: int = CALIBRATION_RUNS, p: float = 0.25) -> float:
    """
    Standard deviation of the circular survivor count of an honest string.

    Windows overlap, so there is no simple closed form; the value is
    estimated by Monte Carlo from a pinned seed and cached per (n, k).
    """
    counts = np.empty(runs, dtype=np.float64)
    for i in range(runs):
        rng = derive_rng(CALIBRATION_SEED, n, k, i)
        counts[i] = count_windows(rng.random(n) < p, k)
    std = float(counts.std(ddof=1))
    logger.debug("calibrated streak std n=%d k=%d runs=%d std=%.4f", n, k, runs, std)
    # floored at the Poisson std so a tiny mean cannot give zero
    return max(std, math.sqrt(n * p ** k))


def bias_detection_statistic(
    t: RawKeyTranscript,
    k: int,
    threshold: float = DETECTION_THRESHOLD,
) -> DetectionResult:
    """
    Standardized deviations of Alice's conclusive and survivor counts.

    z_conclusive compares the conclusive count with Binomial(n, 1/4).
    z_streaks compares the circular k-window count with its honest mean
    n / 4^k, using the calibrated honest standard deviation. The transcript
    is flagged when |z_conclusive| or z_streaks exceeds the threshold.
    Normal-tail p-values are reported alongside (two-sided for the
    conclusive count, upper tail for survivors).

    Raises:
        ValidationError: If the transcript is shorter than 100 positions
    """
    n = t.n
    if n < MIN_DETECTION_LENGTH:
        raise ValidationError(
            f"Detection needs at least {MIN_DETECTION_LENGTH} positions",
            parameter="n",
            value=n,
        )
    validate_positive(k, "k")
    mask = t.conclusive_mask
    conclusive = int(np.count_nonzero(mask))
    z_conclusive = (conclusive - n / 4.0) / math.sqrt(n * 0.25 * 0.75)

    streaks = count_windows(mask, k)
    mean = n / 4.0 ** k
    std = calibrated_streak_std(n, k)
    z_streaks = (streaks - mean) / std

    flagged = abs(z_conclusive) > threshold or z_streaks > threshold
    return DetectionResult(
        z_conclusive=z_conclusive,
        z_streaks=z_streaks,
        flagged=flagged,
        conclusive_count=conclusive,
        streak_count=streaks,
        streak_mean=mean,
        streak_std=std,
        p_conclusive=float(2.0 * stats.norm.sf(abs(z_conclusive))),
        p_streaks=float(stats.norm.sf(z_streaks)),
    )


def segment_streak_counts(t: RawKeyTranscript, plus_positions, k: int) -> SegmentCounts:
    """Linear survivor windows lying entirely in the plus or the minus positions."""
    plus = as_mask(plus_positions, t.n)
    conclusive = t.conclusive_mask
    return SegmentCounts(
        plus=count_windows(conclusive & plus, k, circular=False),
        minus=count_windows(conclusive & ~plus, k, circular=False),
    )
