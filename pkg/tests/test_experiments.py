"""
Tests for experiment use cases, config loading and report writers.
"""

import json

import pytest

from qokd.application import (
    AttackExperiment,
    DilutionExperiment,
    RunSessionsExperiment,
    Table1Experiment,
    Table2Experiment,
    make_experiment,
    ordered_map,
)
from qokd.analytics import prefix_nobit_probability
from qokd.core.exceptions import ConfigurationError, ValidationError
from qokd.core.limits import LimitExceededError
from qokd.domain.entities import ExperimentConfig, ExperimentReport
from qokd.infrastructure.config import load_config_mapping, load_experiment_config
from qokd.infrastructure.reports import REPORT_COLUMNS, render_report, write_report
from qokd.quantum.model import P_USD


def _square(x):
    return x * x


class TestExperimentConfig:
    """Tests for ExperimentConfig."""

    def test_defaults(self):
        config = ExperimentConfig()
        assert config.runs == 100
        assert config.format == "json"

    def test_unknown_experiment(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="table3")

    def test_runs_positive(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(runs=0)

    def test_overrides_skip_none(self):
        config = ExperimentConfig(n=100).with_overrides(n=None, k=4)
        assert (config.n, config.k) == (100, 4)

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_mapping({"colour": "blue"})


class TestConfigFiles:
    """Tests for TOML config loading."""

    def test_load(self, config_file):
        config = load_experiment_config("table2", config_file)
        assert (config.n, config.k) == (100000, 5)

    def test_flags_override_file(self, config_file):
        config = load_experiment_config("table2", config_file, k=6, seed=None)
        assert config.k == 6
        assert config.seed == 0

    def test_nested_table(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("[experiment]\nn = 500\nk = 3\n", encoding="utf-8")
        assert load_config_mapping(path) == {"n": 500, "k": 3}
        assert load_experiment_config("run", path).n == 500

    def test_other_experiment(self, config_file):
        with pytest.raises(ConfigurationError):
            load_experiment_config("run", config_file)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config_mapping(tmp_path / "nope.toml")

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("n = = 3\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_config_mapping(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "typo.toml"
        path.write_text("runz = 3\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            load_experiment_config("run", path)


class TestParallel:
    """Tests for ordered_map."""

    def test_serial(self):
        assert ordered_map(_square, [3, 1, 2]) == [9, 1, 4]

    def test_pool_keeps_order(self):
        assert ordered_map(_square, list(range(20)), workers=2) == [i * i for i in range(20)]


class TestRunSessions:
    """Tests for the run experiment."""

    @pytest.fixture
    def config(self):
        return ExperimentConfig(experiment="run", n=1000, k=4, runs=3, seed=1)

    def test_all_correct(self, config):
        report = RunSessionsExperiment(config).execute()
        assert report.exit_code == 0
        assert len(report.records) == 3
        assert report.aggregates["completed"] == 3
        assert report.aggregates["accuracy"] == 1.0
        assert [r["run"] for r in report.records] == [0, 1, 2]
        assert all(r["retrieved_bit"] == r["expected_bit"] for r in report.records)

    def test_replay_gives_same_report(self, config):
        a = make_experiment(config).execute()
        b = make_experiment(config).execute()
        assert render_report(a) == render_report(b)

    def test_workers_do_not_change_records(self, config):
        serial = RunSessionsExperiment(config).execute()
        pooled = RunSessionsExperiment(config.with_overrides(workers=2)).execute()
        assert serial.records == pooled.records

    def test_original_scheme_budget(self):
        config = ExperimentConfig(experiment="run", scheme="original", n=1000, k=10, runs=1, max_raw_qubits=5000)
        with pytest.raises(LimitExceededError):
            RunSessionsExperiment(config).execute()

    def test_aborts_set_exit_code(self):
        config = ExperimentConfig(experiment="run", n=10, k=10, runs=2, restart_cap=0)
        report = RunSessionsExperiment(config).execute()
        assert report.exit_code == 3
        assert report.aggregates["aborted"] == 2
        assert report.aggregates["abort_reasons"] == {"restart-cap": 2}
        assert report.aggregates["accuracy"] is None

    def test_generalized_empty_probability_counts_unused_subsets(self):
        config = ExperimentConfig(experiment="run", scheme="generalized", n=300, k=3, runs=1)
        experiment = RunSessionsExperiment(config)
        expected = experiment.expected_empty_probability(experiment.preflight())
        assert expected == pytest.approx(float(prefix_nobit_probability(300, 14, 3, 0.25)))
        assert expected == pytest.approx(0.3234, abs=0.001)

    def test_biased_bob_rejected(self):
        with pytest.raises(ValidationError):
            RunSessionsExperiment(ExperimentConfig(experiment="run", bob="bias", runs=1)).execute()

    def test_fixed_port_with_workers(self):
        config = ExperimentConfig(experiment="run", transport="tcp", port=40123, workers=2, runs=2)
        with pytest.raises(ValidationError):
            RunSessionsExperiment(config).execute()


class TestTable1:
    """Tests for survivor-count simulations."""

    def test_single_column(self):
        config = ExperimentConfig(experiment="table1", n=1000, k=3, p=0.25, runs=40, seed=2)
        report = Table1Experiment(config).execute()
        (row,) = report.records
        assert row["expected"] == pytest.approx(1000 / 64)
        assert abs(row["z"]) < 4
        assert row["linear_average"] <= row["average"]
        assert row["printed_average"] is None

    def test_needs_both_n_and_k(self):
        with pytest.raises(ValidationError):
            Table1Experiment(ExperimentConfig(experiment="table1", n=1000)).execute()


class TestTable2:
    """Tests for the exact generalized-scheme table."""

    def test_full_grid(self):
        report = Table2Experiment(ExperimentConfig(experiment="table2")).execute()
        assert len(report.records) == 10
        by_cell = {(r["N"], r["k"]): r for r in report.records}
        assert by_cell[(10**5, 4)]["M"] == 41
        assert by_cell[(10**5, 8)]["M"] == 20
        assert by_cell[(10**10, 12)]["M"] == 42
        five = by_cell[(10**5, 5)]
        assert five["M"] == 29
        assert five["cond_avg"] == pytest.approx(131.0, abs=0.6)
        assert five["nobit_percent"] == pytest.approx(11.5, abs=0.1)
        assert report.aggregates["discrepancies"] == len(report.notes)

    def test_only_misprinted_cells_flagged(self):
        """Integer-rounded averages pass; the two tenfold no-bit entries do not."""
        report = Table2Experiment(ExperimentConfig(experiment="table2")).execute()
        flagged = {(r["N"], r["M"], r["k"]) for r in report.records if r["note"]}
        assert flagged == {(10**5, 41, 4), (10**10, 71, 8)}
        seven = next(r for r in report.records if (r["N"], r["k"]) == (10**5, 7))
        assert seven["cond_avg"] == pytest.approx(28, abs=0.5)
        assert seven["note"] is None

    def test_explicit_m(self):
        config = ExperimentConfig(experiment="table2", m=6, k=6, p=1.0)
        (row,) = Table2Experiment(config).execute().records
        assert row["N"] == 1
        assert row["cond_avg"] == 1.0
        assert row["nobit"] == 0.0

    def test_explicit_m_needs_k(self):
        with pytest.raises(ValidationError):
            Table2Experiment(ExperimentConfig(experiment="table2", m=6)).execute()


class TestDilution:
    """Tests for the dilution experiment."""

    def test_two_keys(self):
        config = ExperimentConfig(experiment="dilution", n=1000, known=100, r=2, trials=20)
        report = DilutionExperiment(config).execute()
        assert len(report.records) == 20
        assert all(r["optimal_shift"] >= r["random_shift"] for r in report.records)
        assert report.aggregates["expected_random"] == pytest.approx(10.0)
        assert report.aggregates["optimal_mean"] > report.aggregates["random_mean"]
        assert "greedy_mean" not in report.aggregates

    def test_greedy_for_three_keys(self):
        config = ExperimentConfig(experiment="dilution", n=1000, known=100, r=3, trials=5)
        report = DilutionExperiment(config).execute()
        assert all(r["greedy"] is not None for r in report.records)
        assert all(len(r["greedy_shifts"].split()) == 3 for r in report.records)

    def test_known_bounded(self):
        with pytest.raises(ValidationError):
            DilutionExperiment(ExperimentConfig(experiment="dilution", n=100, known=101)).execute()

    def test_needs_two_keys(self):
        with pytest.raises(ValidationError):
            DilutionExperiment(ExperimentConfig(experiment="dilution", r=1, trials=1)).execute()


class TestAttacks:
    """Tests for the attack experiments."""

    def test_alice_usd(self):
        config = ExperimentConfig(experiment="attack", model="alice-usd", n=2000, k=3, runs=5)
        (row,) = AttackExperiment(config).execute().records
        assert row["expected_ratio"] == pytest.approx((P_USD / 0.25) ** 3)
        assert row["measured"] > row["baseline"]

    def test_bob_bias(self):
        config = ExperimentConfig(experiment="attack", model="bob-bias", n=4000, k=3, runs=3)
        report = AttackExperiment(config).execute()
        segments = {r["segment"]: r for r in report.records}
        assert set(segments) == {"plus", "minus", "attack", "honest"}
        assert segments["plus"]["measured"] > segments["minus"]["measured"]
        assert report.aggregates["flag_rate_attack"] == 1.0

    def test_unknown_model(self):
        with pytest.raises(ValidationError):
            AttackExperiment(ExperimentConfig(experiment="attack", model="eve")).execute()


class TestReports:
    """Tests for report rendering and writing."""

    @pytest.fixture
    def report(self):
        return Table2Experiment(ExperimentConfig(experiment="table2", n=100000, k=5)).execute()

    def test_json_without_timing(self, report):
        data = json.loads(render_report(report))
        assert "generated_at" not in data
        assert data["tool_version"] == "0.1.0"
        assert data["config"]["k"] == 5

    def test_json_file_round_trip(self, report, tmp_path):
        out = tmp_path / "report.json"
        write_report(report, out)
        restored = ExperimentReport.from_dict(json.loads(out.read_text(encoding="utf-8")))
        assert restored.records == report.records
        assert restored.generated_at == report.generated_at

    def test_csv_columns(self, report, tmp_path):
        out = tmp_path / "report.csv"
        write_report(report, out, "csv")
        header, row = out.read_text(encoding="utf-8").splitlines()
        assert tuple(header.split(",")) == REPORT_COLUMNS["table2"]
        assert row.startswith("100000,29,5,")

    def test_unknown_format(self, report):
        with pytest.raises(ValidationError):
            render_report(report, "xml")
