"""
Tests for dilution of several oblivious keys.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qokd.core.exceptions import ValidationError
from qokd.core.rng import derive_rng
from qokd.exchange import HonestBob, HonestImmediateAlice, run_exchange
from qokd.extraction import (
    ModifiedScheme,
    combine_known,
    dilute,
    extract,
    greedy_dilution_shifts,
    optimal_shift,
    shift_overlap_counts,
)
from qokd.extraction.dilution import surviving_after


def _brute_counts(a, b, n):
    return np.array([sum(1 for j in a if (j + s) % n in b) for s in range(n)])


class TestShiftOverlap:
    """Tests for overlap counts and the optimal shift."""

    def test_single_points(self):
        assert optimal_shift({0}, {3}, 5) == (3, 1)

    def test_two_point_overlap(self):
        s, count = optimal_shift({0, 1}, {1, 2}, 10)
        assert (s, count) == (1, 2)

    def test_empty_set(self):
        assert shift_overlap_counts(set(), {1}, 4).tolist() == [0, 0, 0, 0]

    @given(
        st.integers(min_value=1, max_value=40).flatmap(
            lambda n: st.tuples(
                st.just(n),
                st.sets(st.integers(0, n - 1), max_size=n),
                st.sets(st.integers(0, n - 1), max_size=n),
            )
        )
    )
    def test_counts_match_definition(self, case):
        n, a, b = case
        assert shift_overlap_counts(a, b, n).tolist() == _brute_counts(a, b, n).tolist()

    def test_fft_path_matches_pairwise(self):
        n = 10_000
        rng = derive_rng(31)
        a = set(rng.choice(n, size=2100, replace=False).tolist())
        b = set(rng.choice(n, size=2100, replace=False).tolist())
        counts = shift_overlap_counts(a, b, n)
        av = np.fromiter(a, dtype=np.int64)
        bv = np.fromiter(b, dtype=np.int64)
        expected = np.zeros(n, dtype=np.int64)
        for x in av:
            np.add.at(expected, (bv - x) % n, 1)
        assert np.array_equal(counts, expected)
        assert counts.sum() == len(a) * len(b)

    def test_surviving_after(self):
        assert surviving_after({0, 1, 2}, {3, 4}, 3, 10) == {0, 1}


class TestCombine:
    """Tests for combining Alice's known maps."""

    def test_values_xor(self):
        out = combine_known([{0: 1, 2: 0}, {1: 1, 3: 1}], [0, 1], 4)
        assert out == {0: 0, 2: 1}

    def test_shift_count_checked(self):
        with pytest.raises(ValidationError):
            combine_known([{}], [0, 1], 4)

    def test_single_key_identity(self):
        assert combine_known([{3: 1, 1: 0}], [0], 5) == {1: 0, 3: 1}


class TestGreedy:
    """Tests for greedy shift selection."""

    def test_plan(self):
        plan = greedy_dilution_shifts([{0, 1, 2}, {5, 6, 7}, {1, 2}], 10)
        assert plan.shifts == [0, 5, 0]
        assert plan.survivors == [3, 3, 2]

    def test_needs_a_key(self):
        with pytest.raises(ValidationError):
            greedy_dilution_shifts([], 10)


class TestDilute:
    """Tests for diluting real key views."""

    @pytest.fixture
    def views(self):
        scheme = ModifiedScheme(k=2, n=3000)
        return [
            extract(run_exchange(3000, HonestImmediateAlice(), HonestBob(), derive_rng(40, i)), scheme)
            for i in range(3)
        ]

    def test_diluted_key_consistent(self, views):
        plan = greedy_dilution_shifts([v.alice_known.keys() for v in views], 3000)
        diluted = dilute(views, plan.shifts)
        assert diluted.scheme == "diluted"
        assert diluted.is_consistent()
        assert diluted.known_count == plan.survivors[-1]
        assert diluted.alice_known == combine_known([v.alice_known for v in views], plan.shifts, 3000)
        assert all(a >= b for a, b in zip(plan.survivors, plan.survivors[1:]))

    def test_optimal_shift_dominates_fixed_shift(self, views):
        a, b = views[0].alice_known.keys(), views[1].alice_known.keys()
        _, best = optimal_shift(a, b, 3000)
        assert best >= len(surviving_after(a, b, 17, 3000))

    def test_mismatched_lengths(self, views):
        other = extract(
            run_exchange(100, HonestImmediateAlice(), HonestBob(), derive_rng(41)),
            ModifiedScheme(k=2, n=100),
        )
        with pytest.raises(ValidationError):
            dilute([views[0], other], [0, 0])
