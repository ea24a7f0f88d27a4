"""
Closed-form oracles and Monte Carlo statistics: streak expectations,
parameter choice, generalized-scheme binomials, guess probabilities and the
bias attack.
"""

from qokd.analytics.streaks import (
    StreakStats,
    KChoice,
    SurvivorCount,
    expected_streaks,
    streak_stats,
    markov_streak_bound,
    k_for_target,
    abort_prob_original,
    count_windows,
    StreamingWindowCounter,
    simulate_survivors,
)
from qokd.analytics.generalized import (
    GeneralizedStats,
    generalized_stats,
    nobit_probability,
    prefix_nobit_probability,
    expected_known_bruteforce,
)
from qokd.analytics.guessing import GroupAccuracy, guess_prob_group, group_guess_accuracy
from qokd.analytics.bias import (
    BiasStats,
    DetectionResult,
    SegmentCounts,
    bias_attack_stats,
    calibrated_streak_std,
    bias_detection_statistic,
    segment_streak_counts,
)
from qokd.analytics.export import write_csv, csv_text

__all__ = [
    "StreakStats",
    "KChoice",
    "SurvivorCount",
    "expected_streaks",
    "streak_stats",
    "markov_streak_bound",
    "k_for_target",
    "abort_prob_original",
    "count_windows",
    "StreamingWindowCounter",
    "simulate_survivors",
    "GeneralizedStats",
    "generalized_stats",
    "nobit_probability",
    "prefix_nobit_probability",
    "expected_known_bruteforce",
    "GroupAccuracy",
    "guess_prob_group",
    "group_guess_accuracy",
    "BiasStats",
    "DetectionResult",
    "SegmentCounts",
    "bias_attack_stats",
    "calibrated_streak_std",
    "bias_detection_statistic",
    "segment_streak_counts",
    "write_csv",
    "csv_text",
]
