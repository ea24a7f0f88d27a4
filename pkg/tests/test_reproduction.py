"""
Full-size statistical reproductions.

These run for seconds to minutes each and are deselected by default;
run them with `pytest -m slow`.
"""

import math

import numpy as np
import pytest

from qokd.application import (
    AttackExperiment,
    DilutionExperiment,
    RunSessionsExperiment,
    Table1Experiment,
    Table2Experiment,
)
from qokd.analytics import group_guess_accuracy, guess_prob_group
from qokd.core.rng import derive_rng
from qokd.domain.entities import ExperimentConfig
from qokd.exchange import HonestBob, HonestImmediateAlice, guess_accuracy_stats, run_exchange
from qokd.extraction import GeneralizedScheme, ModifiedScheme, OriginalScheme, count_known, extract
from qokd.extraction.combinatorics import iter_colex_masks
from qokd.quantum.model import P_USD

pytestmark = pytest.mark.slow


def _all_masks(length: int) -> np.ndarray:
    codes = np.arange(1 << length, dtype=np.int64)
    return ((codes[:, None] >> np.arange(length)) & 1).astype(bool)


def _brute_counts(scheme, length: int) -> np.ndarray:
    """Known key bits for every conclusiveness code, by checking each definition."""
    codes = np.arange(1 << length, dtype=np.int64)
    counts = np.zeros(codes.shape[0], dtype=np.int64)
    for j in range(scheme.n):
        d = sum(1 << i for i in scheme.definition(j).qubit_indices)
        counts += (codes & d) == d
    return counts


class TestHonestExchange:
    """A million honest rounds."""

    def test_conclusive_and_guess_rates(self):
        t = run_exchange(10**6, HonestImmediateAlice(), HonestBob(), derive_rng(2024))
        stats = guess_accuracy_stats(t)
        assert abs(stats.conclusive_fraction - 0.25) < 4 * math.sqrt(0.25 * 0.75 / 10**6)
        assert abs(stats.inconclusive_guess_accuracy - 2 / 3) < 0.005

    @pytest.mark.parametrize("x,n", [(1, 300_000), (2, 300_000), (3, 300_000)])
    def test_group_guess_law(self, x, n):
        """Window size x makes every unknown key bit a group of x guesses."""
        t = run_exchange(n, HonestImmediateAlice(), HonestBob(), derive_rng(2025, x))
        view = extract(t, ModifiedScheme(k=x, n=n), with_guesses=True)
        acc = group_guess_accuracy([view])[x]
        assert acc.groups >= 10**5
        assert abs(acc.rate - guess_prob_group(x)) < 0.01


class TestSurvivorTable:
    """Modified-scheme survivor counts, 100 runs per column."""

    @pytest.mark.parametrize("n,k,printed,at_least_one", [
        (10**4, 6, 2.37, 81),
        (10**5, 7, 6.5, 98),
        (10**6, 9, 4.09, 95),
        (10**7, 11, 2.45, 86),
    ])
    def test_column(self, n, k, printed, at_least_one):
        config = ExperimentConfig(experiment="table1", n=n, k=k, runs=100, seed=0)
        honest, usd = Table1Experiment(config).execute().records
        assert honest["p"] == 0.25
        assert usd["p"] == pytest.approx(P_USD)
        for row in (honest, usd):
            assert row["expected"] == pytest.approx(n * row["p"] ** k)
            assert abs(row["z"]) < 4
        assert abs(honest["average"] - printed) <= 0.25 * printed
        assert abs(honest["at_least_one"] - at_least_one) <= 12

    def test_usd_column_against_printed(self):
        config = ExperimentConfig(experiment="table1", n=10**5, k=7, p=P_USD, runs=100, seed=0)
        (row,) = Table1Experiment(config).execute().records
        assert row["printed_average"] == 18.9
        assert abs(row["average"] - 18.9) <= 0.25 * 18.9


class TestGeneralizedTable:
    """All ten exact cells."""

    PRINTED = {
        (10**5, 4): (41, 397, None),
        (10**5, 5): (29, 131, 11.5),
        (10**5, 6): (23, 46, 46.8),
        (10**5, 7): (21, 28, 74.4),
        (10**5, 8): (20, 19, 89.8),
        (10**10, 8): (71, 162531, None),
        (10**10, 9): (58, 41833, 2.9),
        (10**10, 10): (50, 11714, 16.4),
        (10**10, 11): (45, 4094, 40.9),
        (10**10, 12): (42, 1876, 64.9),
    }

    def test_every_cell(self):
        report = Table2Experiment(ExperimentConfig(experiment="table2")).execute()
        cells = {(r["N"], r["k"]): r for r in report.records}
        assert set(cells) == set(self.PRINTED)
        for key, (m, average, nobit) in self.PRINTED.items():
            row = cells[key]
            assert row["M"] == m
            # averages are printed as integers
            assert abs(row["cond_avg"] - average) <= max(0.01 * average, 0.5)
            if nobit is not None:
                assert abs(row["nobit_percent"] - nobit) <= 0.15
                assert row["note"] is None

    def test_tenfold_nobit_cells_are_noted(self):
        report = Table2Experiment(ExperimentConfig(experiment="table2")).execute()
        cells = {(r["N"], r["k"]): r for r in report.records}
        assert cells[(10**5, 4)]["nobit_percent"] == pytest.approx(0.38, abs=0.01)
        assert cells[(10**10, 8)]["nobit_percent"] == pytest.approx(0.12, abs=0.01)
        assert cells[(10**5, 4)]["note"] and cells[(10**10, 8)]["note"]
        assert report.aggregates["discrepancies"] == 2


class TestDilution:
    """Two keys of 400 known bits out of 10^5."""

    def test_random_and_optimal_shift(self):
        config = ExperimentConfig(experiment="dilution", n=10**5, known=400, r=2, trials=2000, seed=0)
        agg = DilutionExperiment(config).execute().aggregates
        assert agg["expected_random"] == pytest.approx(1.6)
        assert abs(agg["random_mean"] - 1.6) < 0.1
        assert abs(agg["optimal_mean"] - 9.7) < 0.5

    def test_third_key_dilutes_further(self):
        config = ExperimentConfig(experiment="dilution", n=10**5, known=400, r=3, trials=200, seed=0)
        agg = DilutionExperiment(config).execute().aggregates
        assert agg["greedy_mean"] < agg["optimal_mean"]


class TestSessions:
    """A thousand sessions per scheme."""

    @pytest.mark.parametrize("scheme,n,k", [
        ("original", 300, 3),
        ("modified", 300, 3),
        ("generalized", 300, 3),
    ])
    def test_every_completed_session_is_correct(self, scheme, n, k):
        config = ExperimentConfig(experiment="run", scheme=scheme, n=n, k=k, runs=1000, seed=0)
        agg = RunSessionsExperiment(config).execute().aggregates
        assert agg["completed"] >= 995
        assert agg["correct"] == agg["completed"]
        q = agg["expected_empty_probability"]
        sigma = math.sqrt(q * (1 - q) / agg["rounds"])
        assert abs(agg["empty_round_fraction"] - q) < 4 * sigma

    def test_original_restart_rate(self):
        """k = log4(N / 3) makes one raw key empty with probability about e^-3."""
        config = ExperimentConfig(experiment="run", scheme="original", n=768, k=4, runs=1000, seed=0)
        agg = RunSessionsExperiment(config).execute().aggregates
        q = math.exp(-3)
        assert agg["expected_empty_probability"] == pytest.approx(q, abs=0.001)
        sigma = math.sqrt(q * (1 - q) / agg["rounds"])
        assert abs(agg["empty_round_fraction"] - q) < 4 * sigma
        assert agg["correct"] == agg["completed"]


class TestExhaustiveCounting:
    """Every conclusiveness mask of raw keys up to 12 qubits."""

    def test_original(self):
        for k in range(1, 13):
            for n in range(1, 12 // k + 1):
                scheme = OriginalScheme(k, n)
                expected = _brute_counts(scheme, k * n)
                for code, mask in enumerate(_all_masks(k * n)):
                    assert count_known(mask, scheme) == expected[code]

    def test_modified(self):
        for n in range(1, 13):
            for k in range(1, n + 1):
                scheme = ModifiedScheme(k, n)
                expected = _brute_counts(scheme, n)
                for code, mask in enumerate(_all_masks(n)):
                    assert count_known(mask, scheme) == expected[code]

    def test_generalized_full_space(self):
        for m in range(1, 13):
            masks = _all_masks(m)
            conclusive = masks.sum(axis=1)
            for k in range(1, m + 1):
                scheme = GeneralizedScheme(m, k, math.comb(m, k))
                for x, mask in zip(conclusive.tolist(), masks):
                    assert count_known(mask, scheme) == math.comb(x, k)

    def test_generalized_prefixes(self):
        for m in range(1, 10):
            masks = _all_masks(m)
            codes = np.arange(1 << m, dtype=np.int64)
            for k in range(1, m + 1):
                full = math.comb(m, k)
                for n in sorted({1, max(1, full // 2), full}):
                    scheme = GeneralizedScheme(m, k, n)
                    expected = np.zeros(codes.shape[0], dtype=np.int64)
                    for d in iter_colex_masks(k, n):
                        expected += (codes & d) == d
                    for code, mask in enumerate(masks):
                        assert count_known(mask, scheme) == expected[code]


class TestAttacks:
    """Both cheating strategies at N = 10^5."""

    def test_usd_gain(self):
        config = ExperimentConfig(experiment="attack", model="alice-usd", n=10**5, runs=200, seed=0)
        records = AttackExperiment(config).execute().records
        assert [r["k"] for r in records] == [5, 7]
        for row in records:
            assert abs(row["z"]) < 4
            assert row["expected_ratio"] == pytest.approx((P_USD / 0.25) ** row["k"])
            assert row["ratio"] == pytest.approx(row["expected_ratio"], rel=0.25)

    def test_bias_segments_and_detector(self):
        config = ExperimentConfig(experiment="attack", model="bob-bias", n=10**5, k=7, runs=200, seed=0)
        report = AttackExperiment(config).execute()
        plus, minus = report.records[0], report.records[1]
        assert abs(plus["z"]) < 4
        assert abs(minus["z"]) < 4
        assert report.aggregates["flag_rate_attack"] >= 0.95
        assert report.aggregates["flag_rate_honest"] <= 0.01
