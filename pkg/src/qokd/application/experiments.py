"""
Experiment use cases.

Each use case turns one ExperimentConfig into an ExperimentReport. Records
hold one row per run or table cell, and aggregates are computed from the
records alone, so a report can always be checked against itself.
"""

import logging
import math
import time
import warnings
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from typing import Any, NamedTuple

import numpy as np

from qokd import __version__
from qokd.analytics.bias import bias_attack_stats, bias_detection_statistic, segment_streak_counts
from qokd.analytics.generalized import generalized_stats, prefix_nobit_probability
from qokd.analytics.streaks import simulate_survivors
from qokd.core.exceptions import ValidationError
from qokd.core.limits import validate_raw_qubits
from qokd.core.rng import derive_rng, derive_seed
from qokd.domain.entities import Completed, ExperimentConfig, ExperimentReport, SessionConfig
from qokd.exchange.exchange import run_exchange
from qokd.exchange.strategies import HonestBob, HonestImmediateAlice, UsdIndividualAlice, make_bob, split_attack_positions
from qokd.extraction.combinatorics import min_M
from qokd.extraction.dilution import greedy_dilution_shifts, optimal_shift, surviving_after
from qokd.extraction.schemes import ModifiedScheme
from qokd.application.parallel import ordered_map
from qokd.infrastructure.transports import make_transport
from qokd.quantum.model import P_USD
from qokd.session.runner import run_session, session_scheme
from qokd.session.wire import MessageType

__all__ = [
    "TABLE1_GRID",
    "TABLE1_P",
    "TABLE2_GRID",
    "ExperimentUseCase",
    "RunSessionsExperiment",
    "Table1Experiment",
    "Table2Experiment",
    "DilutionExperiment",
    "AttackExperiment",
    "EXPERIMENTS",
    "make_experiment",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ABORT = 3

TABLE1_GRID: tuple[tuple[int, int], ...] = ((10**4, 6), (10**5, 7), (10**6, 9), (10**7, 11), (10**8, 13))
TABLE1_P: tuple[float, ...] = (0.25, P_USD)
# published (average, runs with at least one survivor) for p = 1/4
PRINTED_TABLE1: dict[tuple[int, int], tuple[float, int]] = {
    (10**4, 6): (2.37, 81),
    (10**5, 7): (6.5, 98),
    (10**6, 9): (4.09, 95),
    (10**7, 11): (2.45, 86),
    (10**8, 13): (2.17, 79),
}
PRINTED_TABLE1_USD: dict[tuple[int, int], float] = {(10**5, 7): 18.9, (10**8, 13): 15.74}
TABLE1_UNMATCHED = {(10**8, 13)}

TABLE2_GRID: tuple[tuple[int, tuple[int, ...]], ...] = (
    (10**5, (4, 5, 6, 7, 8)),
    (10**10, (8, 9, 10, 11, 12)),
)
# published (conditional average, no-bit percent) per (N, k)
PRINTED_TABLE2: dict[tuple[int, int], tuple[float, float]] = {
    (10**5, 4): (397, 3.8),
    (10**5, 5): (131, 11.5),
    (10**5, 6): (46, 46.8),
    (10**5, 7): (28, 74.4),
    (10**5, 8): (19, 89.8),
    (10**10, 8): (162531, 1.2),
    (10**10, 9): (41833, 2.9),
    (10**10, 10): (11714, 16.4),
    (10**10, 11): (4094, 40.9),
    (10**10, 12): (1876, 64.9),
}
TABLE2_AVERAGE_TOLERANCE = 0.01
# averages are printed as integers
TABLE2_AVERAGE_ROUNDING = 0.5
TABLE2_NOBIT_TOLERANCE = 0.15

ATTACK_MODELS = ("alice-usd", "bob-bias")


class RunResult(NamedTuple):
    records: list[dict[str, Any]]
    aggregates: dict[str, Any]
    notes: list[str]
    exit_code: int = EXIT_OK


def _mean_se(values: list[float] | np.ndarray) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def _z(measured: float, expected: float, se: float) -> float | None:
    return (measured - expected) / se if se > 0 else None


class ExperimentUseCase(ABC):
    """
    Use case: run one experiment from its config.

    Subclasses implement run(); execute() adds timing and the config echo.

    Example:
        config = ExperimentConfig(experiment="table2")
        report = Table2Experiment(config).execute()
        for row in report.records:
            print(row["M"], row["k"], row["cond_avg"])
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config

    def execute(self) -> ExperimentReport:
        started = time.perf_counter()
        result = self.run()
        report = ExperimentReport(
            experiment=self.config.experiment,
            config=self.config.to_dict(),
            records=result.records,
            aggregates=result.aggregates,
            notes=result.notes,
            tool_version=__version__,
            generated_at=datetime.now(timezone.utc),
            wall_clock_seconds=time.perf_counter() - started,
            exit_code=result.exit_code,
        )
        logger.info(
            "%s finished: %d records in %.2fs",
            self.config.experiment,
            len(report.records),
            report.wall_clock_seconds,
        )
        return report

    @abstractmethod
    def run(self) -> RunResult:
        pass


# =============================================================================
# Sessions
# =============================================================================

def _session_job(job: tuple[int, SessionConfig, int]) -> dict[str, Any]:
    run_index, session, port = job
    outcome = run_session(session, make_transport(session.transport, port))
    status = outcome.status
    completed = isinstance(status, Completed)
    return {
        "run": run_index,
        "seed": session.seed,
        "status": "completed" if completed else "aborted",
        "reason": None if completed else status.reason,
        "restarts": status.restarts,
        "rounds": outcome.transcript.count(MessageType.MEASURE_RESULT),
        "db_index": outcome.db_index,
        "retrieved_bit": status.retrieved_bit if completed else None,
        "expected_bit": outcome.expected_bit,
        "correct": outcome.correct,
        "messages": len(outcome.transcript),
        "digest": outcome.transcript.digest(),
    }


class RunSessionsExperiment(ExperimentUseCase):
    """
    Use case: run `runs` full sessions and check every retrieved bit.

    Run i uses seed derive_seed(master_seed, i). The restart fraction is
    compared with the chance that one raw key leaves Alice nothing.
    """

    def session_config(self, run_index: int) -> SessionConfig:
        c = self.config
        return SessionConfig(
            scheme=c.scheme,
            n=c.n or 10_000,
            k=c.k or 6,
            m=c.m,
            r=c.r or 1,
            alice=c.alice,
            bob=c.bob,
            seed=derive_seed(c.seed, run_index),
            restart_cap=c.restart_cap,
            transport=c.transport,
        )

    def preflight(self) -> SessionConfig:
        """
        Check the configuration before any run.

        Raises:
            LimitExceededError: If one session's raw keys exceed max_raw_qubits
            SchemeMismatchError: If binom(M, k) < N for the generalized scheme
            ValidationError: On other bad combinations
        """
        base = self.session_config(0)
        if base.scheme == "original":
            validate_raw_qubits(base.k * base.n * base.r, self.config.max_raw_qubits)
        scheme = session_scheme(base)
        validate_raw_qubits(scheme.raw_length * base.r, self.config.max_raw_qubits)
        if self.config.transport == "tcp" and self.config.port and self.config.workers > 1:
            raise ValidationError(
                "A fixed TCP port cannot be shared by parallel workers; use --port 0",
                parameter="port",
                value=self.config.port,
            )
        return base

    def expected_empty_probability(self, base: SessionConfig) -> float:
        """Chance that a single honest raw key gives Alice no known bit."""
        p = P_USD if base.alice == "usd" else 0.25
        scheme = session_scheme(base)
        if base.scheme == "generalized":
            return float(prefix_nobit_probability(base.n, scheme.raw_length, base.k, p))
        if base.scheme == "original":
            return (1.0 - p ** base.k) ** base.n
        # circular runs clump; each run of conclusives starts after an inconclusive
        return math.exp(-base.n * (1.0 - p) * p ** base.k)

    def run(self) -> RunResult:
        base = self.preflight()
        jobs = [(i, self.session_config(i), self.config.port) for i in range(self.config.runs)]
        records = ordered_map(_session_job, jobs, self.config.workers)

        completed = [r for r in records if r["status"] == "completed"]
        aborted = len(records) - len(completed)
        restarts = sum(r["restarts"] for r in records)
        rounds = sum(r["rounds"] for r in records)
        correct = sum(1 for r in completed if r["correct"])
        reasons: dict[str, int] = {}
        for r in records:
            if r["reason"]:
                reasons[r["reason"]] = reasons.get(r["reason"], 0) + 1

        aggregates = {
            "runs": len(records),
            "completed": len(completed),
            "aborted": aborted,
            "abort_reasons": dict(sorted(reasons.items())),
            "sessions_with_restart": sum(1 for r in records if r["restarts"] > 0),
            "restarts": restarts,
            "rounds": rounds,
            "empty_round_fraction": restarts / rounds if rounds else None,
            "expected_empty_probability": self.expected_empty_probability(base),
            "correct": correct,
            "accuracy": correct / len(completed) if completed else None,
        }
        notes = []
        if correct != len(completed):
            notes.append(f"{len(completed) - correct} completed sessions retrieved the wrong bit")
        return RunResult(records, aggregates, notes, EXIT_ABORT if aborted else EXIT_OK)


# =============================================================================
# Table 1: survivors of the modified scheme
# =============================================================================

def _survivor_job(job: tuple[int, int, int, float, int, int]) -> tuple[int, int]:
    seed, n, k, p, p_index, run_index = job
    counts = simulate_survivors(n, k, p, derive_rng(seed, n, k, p_index, run_index))
    return counts.circular, counts.linear


class Table1Experiment(ExperimentUseCase):
    """
    Use case: Monte Carlo survivor counts of the modified scheme.

    For each (N, k) and p, draws `runs` Bernoulli(p) conclusiveness strings
    and counts circular k-windows (Alice's known bits). The average is over
    all runs, including those without survivors.
    """

    def grid(self) -> list[tuple[int, int]]:
        c = self.config
        if c.n is None and c.k is None:
            return list(TABLE1_GRID)
        if c.n is None or c.k is None:
            raise ValidationError("table1 needs both N and k to pick a single column", parameter="n")
        return [(c.n, c.k)]

    def probabilities(self) -> tuple[float, ...]:
        return (self.config.p,) if self.config.p is not None else TABLE1_P

    def run(self) -> RunResult:
        c = self.config
        records = []
        notes = []
        for n, k in self.grid():
            if n > c.max_raw_qubits:
                warnings.warn(
                    f"N={n} exceeds the raw-key budget of {c.max_raw_qubits}; streaming it in blocks",
                    UserWarning,
                    stacklevel=2,
                )
            for p_index, p in enumerate(self.probabilities()):
                jobs = [(c.seed, n, k, p, p_index, i) for i in range(c.runs)]
                counts = ordered_map(_survivor_job, jobs, c.workers)
                circular = [cc for cc, _ in counts]
                linear = [ll for _, ll in counts]
                average, se = _mean_se(circular)
                expected = n * p ** k
                printed = PRINTED_TABLE1.get((n, k)) if p == 0.25 else None
                printed_usd = PRINTED_TABLE1_USD.get((n, k)) if p == P_USD else None
                records.append({
                    "N": n,
                    "k": k,
                    "p": p,
                    "runs": c.runs,
                    "average": average,
                    "std_error": se,
                    "at_least_one": sum(1 for x in circular if x > 0),
                    "expected": expected,
                    "z": _z(average, expected, se),
                    "linear_average": _mean_se(linear)[0],
                    "printed_average": printed[0] if printed else printed_usd,
                    "printed_at_least_one": printed[1] if printed else None,
                })
                logger.info("table1 N=%d k=%d p=%.4f average=%.3f", n, k, p, average)
            if (n, k) in TABLE1_UNMATCHED:
                notes.append(
                    f"N={n}, k={k}: the published averages deviate from N*p^k beyond "
                    "Monte Carlo error; this column is reported, not matched"
                )
        zs = [abs(r["z"]) for r in records if r["z"] is not None]
        aggregates = {"cells": len(records), "max_abs_z": max(zs) if zs else None}
        return RunResult(records, aggregates, notes)


# =============================================================================
# Table 2: generalized scheme (exact)
# =============================================================================

class Table2Experiment(ExperimentUseCase):
    """
    Use case: minimal raw length, no-bit probability and conditional average
    of the generalized scheme. Exact, seed-free.
    """

    def cells(self) -> list[tuple[int, int, int]]:
        """(N, M, k) triples."""
        c = self.config
        if c.m is not None:
            if c.k is None:
                raise ValidationError("An explicit M needs k", parameter="k")
            return [(c.n or math.comb(c.m, c.k), c.m, c.k)]
        if c.n is not None:
            ks = (c.k,) if c.k is not None else (4, 5, 6, 7, 8)
            return [(c.n, min_M(c.n, k), k) for k in ks]
        return [(n, min_M(n, k), k) for n, ks in TABLE2_GRID for k in ks]

    def run(self) -> RunResult:
        p = self.config.p if self.config.p is not None else 0.25
        records = []
        notes = []
        for n, m, k in self.cells():
            s = generalized_stats(m, k, p)
            printed = PRINTED_TABLE2.get((n, k)) if p == 0.25 and self.config.m is None else None
            note = None
            if printed is not None:
                slack = max(TABLE2_AVERAGE_TOLERANCE * printed[0], TABLE2_AVERAGE_ROUNDING)
                avg_off = abs(s.conditional_average - printed[0]) > slack
                nobit_off = abs(s.nobit_percent - printed[1]) > TABLE2_NOBIT_TOLERANCE
                if avg_off or nobit_off:
                    note = (
                        f"computed nobit {s.nobit_percent:.2f}% / average {s.conditional_average:.1f} "
                        f"vs published {printed[1]}% / {printed[0]}"
                    )
                    notes.append(f"N={n}, M={m}, k={k}: {note}")
            records.append({
                "N": n,
                "M": m,
                "k": k,
                "p": p,
                "nobit": s.nobit_prob,
                "nobit_percent": s.nobit_percent,
                "cond_avg": s.conditional_average,
                "printed_nobit_percent": printed[1] if printed else None,
                "printed_cond_avg": printed[0] if printed else None,
                "note": note,
            })
        aggregates = {"cells": len(records), "discrepancies": sum(1 for r in records if r["note"])}
        return RunResult(records, aggregates, notes)


# =============================================================================
# Dilution
# =============================================================================

def _dilution_job(job: tuple[int, int, int, int, int]) -> dict[str, Any]:
    seed, trial, n, known, r = job
    rng = derive_rng(seed, trial)
    sets = [rng.choice(n, size=known, replace=False) for _ in range(r)]
    s_random = int(rng.integers(n))
    record: dict[str, Any] = {
        "trial": trial,
        "r": r,
        "random_shift": len(surviving_after(sets[0], sets[1], s_random, n)),
        "optimal_shift": optimal_shift(sets[0], sets[1], n)[1],
        "greedy": None,
        "greedy_shifts": None,
    }
    if r >= 3:
        plan = greedy_dilution_shifts(sets, n)
        record["greedy"] = plan.survivors[-1]
        record["greedy_shifts"] = " ".join(str(s) for s in plan.shifts)
    return record


class DilutionExperiment(ExperimentUseCase):
    """
    Use case: how many known bits survive combining r keys.

    Every trial draws r known sets of the configured size. For the first
    two keys it reports survivors under a uniformly random shift and under
    the optimal one; for r >= 3 also the greedy choice over all keys.
    """

    def run(self) -> RunResult:
        c = self.config
        n = c.n or 10**5
        r = c.r or 2
        if r < 2:
            raise ValidationError("Dilution needs at least two keys", parameter="r", value=r)
        if not 1 <= c.known <= n:
            raise ValidationError(f"known must lie in 1..{n}", parameter="known", value=c.known)
        jobs = [(c.seed, t, n, c.known, r) for t in range(c.trials)]
        records = ordered_map(_dilution_job, jobs, c.workers)

        random_mean, random_se = _mean_se([rec["random_shift"] for rec in records])
        optimal_mean, optimal_se = _mean_se([rec["optimal_shift"] for rec in records])
        aggregates: dict[str, Any] = {
            "N": n,
            "known": c.known,
            "r": r,
            "trials": len(records),
            "expected_random": c.known * c.known / n,
            "random_mean": random_mean,
            "random_se": random_se,
            "optimal_mean": optimal_mean,
            "optimal_se": optimal_se,
        }
        if r >= 3:
            greedy_mean, greedy_se = _mean_se([rec["greedy"] for rec in records])
            aggregates["greedy_mean"] = greedy_mean
            aggregates["greedy_se"] = greedy_se
        return RunResult(records, aggregates, [])


# =============================================================================
# Attacks
# =============================================================================

def _usd_job(job: tuple[int, int, int, int]) -> tuple[int, int]:
    seed, n, k, run_index = job
    scheme = ModifiedScheme(k, n)
    honest = run_exchange(n, HonestImmediateAlice(), HonestBob(), derive_rng(seed, k, 0, run_index))
    usd = run_exchange(n, UsdIndividualAlice(), HonestBob(), derive_rng(seed, k, 1, run_index))
    return scheme.window_count(honest.conclusive_mask), scheme.window_count(usd.conclusive_mask)


def _bias_job(job: tuple[int, int, int, int]) -> tuple[int, int, bool, bool]:
    seed, n, k, run_index = job
    honest_alice = HonestImmediateAlice()
    attack = run_exchange(n, honest_alice, make_bob("bias", n), derive_rng(seed, k, 2, run_index))
    honest = run_exchange(n, honest_alice, HonestBob(), derive_rng(seed, k, 3, run_index))
    segments = segment_streak_counts(attack, split_attack_positions(n), k)
    return (
        segments.plus,
        segments.minus,
        bias_detection_statistic(attack, k).flagged,
        bias_detection_statistic(honest, k).flagged,
    )


class AttackExperiment(ExperimentUseCase):
    """
    Use case: the two attacks on the modified scheme.

    alice-usd compares Alice's known bits under individual unambiguous
    discrimination with the honest count. bob-bias runs the split attack,
    counts survivor windows in both segments and measures how often the
    detector flags attacked and honest transcripts.
    """

    def run(self) -> RunResult:
        model = self.config.model
        if model not in ATTACK_MODELS:
            raise ValidationError(f"Unknown attack model: {model}", parameter="model", value=model)
        return self._alice_usd() if model == "alice-usd" else self._bob_bias()

    def _alice_usd(self) -> RunResult:
        c = self.config
        n = c.n or 10**5
        ks = (c.k,) if c.k is not None else (5, 7)
        records = []
        for k in ks:
            jobs = [(c.seed, n, k, i) for i in range(c.runs)]
            counts = ordered_map(_usd_job, jobs, c.workers)
            honest_mean, _ = _mean_se([h for h, _ in counts])
            usd_mean, usd_se = _mean_se([u for _, u in counts])
            expected = n * P_USD ** k
            records.append({
                "model": "alice-usd",
                "segment": "usd",
                "N": n,
                "k": k,
                "runs": c.runs,
                "measured": usd_mean,
                "expected": expected,
                "baseline": honest_mean,
                "std_error": usd_se,
                "z": _z(usd_mean, expected, usd_se),
                "ratio": usd_mean / honest_mean if honest_mean > 0 else None,
                "expected_ratio": (P_USD / 0.25) ** k,
                "flag_rate": None,
            })
        aggregates = {f"ratio_k{r['k']}": r["ratio"] for r in records}
        return RunResult(records, aggregates, [])

    def _bob_bias(self) -> RunResult:
        c = self.config
        n = c.n or 10**5
        k = c.k or 7
        stats = bias_attack_stats(n, k)
        jobs = [(c.seed, n, k, i) for i in range(c.runs)]
        results = ordered_map(_bias_job, jobs, c.workers)

        plus_mean, plus_se = _mean_se([r[0] for r in results])
        minus_mean, minus_se = _mean_se([r[1] for r in results])
        attack_rate = sum(1 for r in results if r[2]) / len(results)
        honest_rate = sum(1 for r in results if r[3]) / len(results)
        common = {"model": "bob-bias", "N": n, "k": k, "runs": c.runs}
        records = [
            {
                **common,
                "segment": "plus",
                "measured": plus_mean,
                "expected": stats.e_plus,
                "std_error": plus_se,
                "z": _z(plus_mean, stats.e_plus, plus_se),
                "ratio": plus_mean / minus_mean if minus_mean > 0 else None,
                "expected_ratio": stats.ratio,
            },
            {
                **common,
                "segment": "minus",
                "measured": minus_mean,
                "expected": stats.e_minus,
                "std_error": minus_se,
                "z": _z(minus_mean, stats.e_minus, minus_se),
            },
            {**common, "segment": "attack", "flag_rate": attack_rate},
            {**common, "segment": "honest", "flag_rate": honest_rate},
        ]
        aggregates = {
            "e_plus": stats.e_plus,
            "e_minus": stats.e_minus,
            "localization": stats.localization,
            "flag_rate_attack": attack_rate,
            "flag_rate_honest": honest_rate,
        }
        return RunResult(records, aggregates, [])


EXPERIMENTS: dict[str, type[ExperimentUseCase]] = {
    "run": RunSessionsExperiment,
    "table1": Table1Experiment,
    "table2": Table2Experiment,
    "dilution": DilutionExperiment,
    "attack": AttackExperiment,
}


def make_experiment(config: ExperimentConfig) -> ExperimentUseCase:
    return EXPERIMENTS[config.experiment](config)
