"""
Classical single-qubit model: overlaps, Born-rule measurement,
conclusiveness and unambiguous discrimination.
"""

from qokd.quantum.model import (
    P_PLUS,
    P_MINUS,
    P_USD,
    NO_OUTCOME,
    OVERLAP_MATRIX,
    overlap_sq,
    outcome_probabilities,
    measure,
    measure_many,
    discriminate_many,
    conclusiveness,
    verdict_table,
    usd_success_from_overlap,
    usd_success_prob,
    conclusive_probability,
)

__all__ = [
    "P_PLUS",
    "P_MINUS",
    "P_USD",
    "NO_OUTCOME",
    "OVERLAP_MATRIX",
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
