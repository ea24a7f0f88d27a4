"""
Oblivious key extraction: schemes, known-bit counting, colex combinatorics,
dilution and the binary key format.
"""

from qokd.extraction.combinatorics import (
    colex_rank,
    colex_unrank,
    iter_colex_masks,
    min_M,
    count_full_space,
)
from qokd.extraction.schemes import (
    OriginalScheme,
    ModifiedScheme,
    GeneralizedScheme,
    SCHEME_TAGS,
    make_scheme,
    circular_window_sums,
    circular_window_xor,
)
from qokd.extraction.extract import (
    as_mask,
    extract,
    count_known,
    knowable_adjacent_parities,
    knowable_pair_parities_generalized,
)
from qokd.extraction.dilution import (
    DilutionPlan,
    dilute,
    combine_known,
    optimal_shift,
    shift_overlap_counts,
    greedy_dilution_shifts,
)
from qokd.extraction.codec import encode_key_view, decode_key_view

__all__ = [
    "colex_rank",
    "colex_unrank",
    "iter_colex_masks",
    "min_M",
    "count_full_space",
    "OriginalScheme",
    "ModifiedScheme",
    "GeneralizedScheme",
    "SCHEME_TAGS",
    "make_scheme",
    "circular_window_sums",
    "circular_window_xor",
    "as_mask",
    "extract",
    "count_known",
    "knowable_adjacent_parities",
    "knowable_pair_parities_generalized",
    "DilutionPlan",
    "dilute",
    "combine_known",
    "optimal_shift",
    "shift_overlap_counts",
    "greedy_dilution_shifts",
    "encode_key_view",
    "decode_key_view",
]
