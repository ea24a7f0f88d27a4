"""
Application layer for QOKD.

Contains the experiment use cases that orchestrate sessions, simulations
and closed-form analytics. This layer coordinates the flow but contains no
protocol logic.
"""

from qokd.application.experiments import (
    ExperimentUseCase,
    RunSessionsExperiment,
    Table1Experiment,
    Table2Experiment,
    DilutionExperiment,
    AttackExperiment,
    EXPERIMENTS,
    make_experiment,
)
from qokd.application.parallel import ordered_map
from qokd.application.ports import Transport

__all__ = [
    "ExperimentUseCase",
    "RunSessionsExperiment",
    "Table1Experiment",
    "Table2Experiment",
    "DilutionExperiment",
    "AttackExperiment",
    "EXPERIMENTS",
    "make_experiment",
    "ordered_map",
    "Transport",
]
