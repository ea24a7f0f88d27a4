"""
Tests for oblivious key extraction, colex combinatorics and the key codec.
"""

import math

import numpy as np
import pytest
from bitarray import bitarray, frozenbitarray
from hypothesis import given, settings, strategies as st

from qokd.core.bits import (
    bits_from_array,
    bits_from_base64,
    bits_to_array,
    bits_to_base64,
    bits_to_bytes,
)
from qokd.core.exceptions import SchemeMismatchError, ValidationError
from qokd.core.rng import derive_rng
from qokd.domain.entities import ObliviousKeyView
from qokd.exchange import HonestBob, HonestImmediateAlice, run_exchange
from qokd.extraction import (
    GeneralizedScheme,
    ModifiedScheme,
    OriginalScheme,
    circular_window_sums,
    colex_rank,
    colex_unrank,
    count_known,
    decode_key_view,
    encode_key_view,
    extract,
    iter_colex_masks,
    knowable_adjacent_parities,
    knowable_pair_parities_generalized,
    make_scheme,
    min_M,
)
from qokd.analytics.guessing import guess_prob_group


class TestSchemes:
    """Tests for the three extraction rules."""

    def test_original_xor(self):
        scheme = OriginalScheme(k=2, n=2)
        assert scheme.raw_length == 4
        assert scheme.window_xor(np.array([0, 1, 1, 0])).tolist() == [1, 1]

    def test_modified_xor_wraps(self):
        scheme = ModifiedScheme(k=2, n=4)
        assert scheme.window_xor(np.array([0, 1, 1, 0])).tolist() == [1, 0, 1, 0]
        assert scheme.definition(3).qubit_indices == frozenset({3, 0})

    def test_modified_rejects_wide_window(self):
        with pytest.raises(SchemeMismatchError):
            ModifiedScheme(k=5, n=3)

    def test_generalized_default_length(self):
        assert GeneralizedScheme(None, 4, 10**5).raw_length == 41

    def test_generalized_too_short(self):
        with pytest.raises(SchemeMismatchError):
            GeneralizedScheme(10, 5, 300)

    def test_generalized_definitions_are_colex(self):
        scheme = GeneralizedScheme(5, 2, 4)
        subsets = [tuple(sorted(scheme.definition(j).qubit_indices)) for j in range(4)]
        assert subsets == [(0, 1), (0, 2), (1, 2), (0, 3)]

    def test_generalized_xor(self):
        scheme = GeneralizedScheme(5, 2, 4)
        bits = np.array([1, 0, 1, 1, 0])
        assert scheme.window_xor(bits).tolist() == [1, 0, 1, 0]

    def test_circular_window_sums(self):
        sums = circular_window_sums(np.array([1, 1, 0, 1]), 3)
        assert sums.tolist() == [2, 2, 2, 3]

    def test_make_scheme(self):
        assert isinstance(make_scheme("original", 10, 3), OriginalScheme)
        assert make_scheme("generalized", 100, 3, 12).raw_length == 12
        with pytest.raises(ValidationError):
            make_scheme("quantum", 10, 3)


class TestCombinatorics:
    """Tests for colex ranking and the minimal raw length."""

    def test_rank_examples(self):
        assert colex_rank({0, 1}) == 0
        assert colex_rank({0, 2}) == 1
        assert colex_rank({1, 2}) == 2
        assert colex_unrank(2, 2) == (1, 2)

    def test_mask_enumeration(self):
        assert list(iter_colex_masks(2, 4)) == [0b11, 0b101, 0b110, 0b1001]

    @given(st.sets(st.integers(min_value=0, max_value=60), min_size=1, max_size=8))
    def test_rank_unrank_law(self, subset):
        assert colex_unrank(colex_rank(subset), len(subset)) == tuple(sorted(subset))

    @pytest.mark.parametrize("n,k,expected", [
        (10**5, 4, 41),
        (10**5, 8, 20),
        (10**10, 12, 42),
        (1, 1, 1),
        (10, 1, 10),
    ])
    def test_min_M(self, n, k, expected):
        assert min_M(n, k) == expected
        assert math.comb(expected, k) >= n
        assert expected == k or math.comb(expected - 1, k) < n


class TestExtract:
    """Tests for extracting both key views."""

    def test_modified_view_consistent(self, honest_transcript, small_modified_view):
        view = small_modified_view
        scheme = ModifiedScheme(k=3, n=2000)
        assert len(view) == 2000
        assert view.is_consistent()
        assert view.known_count == scheme.window_count(honest_transcript.conclusive_mask)
        assert view.known_count == count_known(honest_transcript.conclusive_mask, scheme)

    def test_guess_confidence(self, small_modified_view):
        view = small_modified_view
        assert set(view.alice_guesses).isdisjoint(view.alice_known)
        assert len(view.alice_guesses) + view.known_count == 2000
        for guess in list(view.alice_guesses.values())[:50]:
            assert 1 <= guess.unknown_count <= 3
            assert guess.confidence == pytest.approx(guess_prob_group(guess.unknown_count))

    def test_original_view(self):
        scheme = OriginalScheme(k=2, n=500)
        t = run_exchange(scheme.raw_length, HonestImmediateAlice(), HonestBob(), derive_rng(21))
        view = extract(t, scheme)
        assert view.is_consistent()
        assert view.alice_guesses is None

    def test_generalized_view(self):
        scheme = GeneralizedScheme(None, 3, 200)
        t = run_exchange(scheme.raw_length, HonestImmediateAlice(), HonestBob(), derive_rng(22))
        view = extract(t, scheme)
        assert view.is_consistent()
        x = int(np.count_nonzero(t.conclusive_mask))
        assert view.known_count <= math.comb(x, 3)
        assert view.known_count == count_known(t.conclusive_set, scheme)

    @settings(max_examples=80)
    @given(st.data())
    def test_count_known_matches_definitions(self, data):
        """Small raw keys: counting agrees with checking every definition."""
        kind = data.draw(st.sampled_from(["original", "modified", "generalized"]))
        if kind == "original":
            k = data.draw(st.integers(1, 4))
            scheme = OriginalScheme(k, data.draw(st.integers(1, 12 // k)))
        elif kind == "modified":
            n = data.draw(st.integers(1, 12))
            scheme = ModifiedScheme(data.draw(st.integers(1, n)), n)
        else:
            m = data.draw(st.integers(1, 12))
            k = data.draw(st.integers(1, m))
            scheme = GeneralizedScheme(m, k, data.draw(st.integers(1, math.comb(m, k))))
        conclusive = data.draw(st.sets(st.integers(0, scheme.raw_length - 1)))
        brute = sum(1 for j in range(scheme.n) if scheme.definition(j).qubit_indices <= conclusive)
        assert count_known(conclusive, scheme) == brute

    def test_length_mismatch(self, honest_transcript):
        with pytest.raises(SchemeMismatchError):
            extract(honest_transcript, OriginalScheme(k=3, n=2000))

    def test_adjacent_parities(self):
        scheme = ModifiedScheme(k=2, n=6)
        assert knowable_adjacent_parities({0, 2}, scheme) == {0}
        with pytest.raises(ValidationError):
            knowable_adjacent_parities({0}, OriginalScheme(2, 3))

    def test_pair_parities_generalized(self):
        scheme = GeneralizedScheme(5, 2, 4)
        # subsets {0,1},{0,2},{1,2},{0,3}; only {0,1} vs {0,2} differ inside {1,2}
        assert knowable_pair_parities_generalized({1, 2}, scheme) == 1
        # everything conclusive: all 6 pairs
        assert knowable_pair_parities_generalized(range(5), scheme) == 6


class TestBits:
    """Tests for packed bit helpers."""

    def test_array_round_trip(self):
        values = [1, 0, 1, 1, 0, 0, 0, 1, 1]
        assert bits_to_array(bits_from_array(values)).tolist() == values

    @given(st.lists(st.integers(min_value=0, max_value=1), max_size=200))
    def test_base64_law(self, values):
        bits = bits_from_array(values)
        assert bits_from_base64(bits_to_base64(bits), len(values)) == bits

    def test_big_endian_input(self):
        """Bit values survive whatever endianness the caller packed with."""
        big = bitarray("110100101", endian="big")
        assert bits_to_array(big).tolist() == [1, 1, 0, 1, 0, 0, 1, 0, 1]
        assert bits_to_bytes(big) == bits_to_bytes(bits_from_array(big.tolist()))
        assert bits_from_base64(bits_to_base64(big), 9) == bits_from_array(big.tolist())

    def test_little_endian_frozen_input(self):
        bits = frozenbitarray("1011", endian="little")
        assert bits_to_bytes(bits) == b"\x0d"
        assert bits_to_array(bits).tolist() == [1, 0, 1, 1]

    def test_bad_base64(self):
        with pytest.raises(ValidationError):
            bits_from_base64("not base64!", 8)

    def test_wrong_length(self):
        with pytest.raises(ValidationError):
            bits_from_base64(bits_to_base64(bits_from_array([1] * 9)), 20)


class TestKeyCodec:
    """Tests for the binary key view format."""

    def test_round_trip(self, small_modified_view):
        view = small_modified_view
        decoded = decode_key_view(encode_key_view(view))
        assert decoded.bob_key == view.bob_key
        assert dict(decoded.alice_known) == dict(view.alice_known)
        assert decoded.scheme == "modified"
        assert decoded.k == 3
        assert decoded.raw_length == 2000
        assert decoded.alice_guesses is None

    @settings(max_examples=30)
    @given(st.integers(min_value=1, max_value=300), st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip_law(self, n, seed):
        rng = derive_rng(seed)
        bits = bits_from_array(rng.integers(0, 2, size=n))
        known = sorted(set(rng.integers(0, n, size=min(n, 20)).tolist()))
        view = ObliviousKeyView(bob_key=bits, alice_known={j: int(bits[j]) for j in known}, scheme="modified", k=1)
        decoded = decode_key_view(encode_key_view(view))
        assert decoded.bob_key == view.bob_key
        assert dict(decoded.alice_known) == dict(view.alice_known)

    def test_bad_magic(self, small_modified_view):
        data = bytearray(encode_key_view(small_modified_view))
        data[0:4] = b"XXXX"
        with pytest.raises(ValidationError):
            decode_key_view(bytes(data))

    def test_truncated(self, small_modified_view):
        data = encode_key_view(small_modified_view)
        with pytest.raises(ValidationError):
            decode_key_view(data[:-1])
        with pytest.raises(ValidationError):
            decode_key_view(data[:5])


