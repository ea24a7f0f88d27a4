"""
Pytest fixtures for QOKD tests.
"""

import pytest

from qokd.core.rng import derive_rng
from qokd.domain.entities import SessionConfig
from qokd.exchange import HonestBob, HonestImmediateAlice, UsdIndividualAlice, run_exchange
from qokd.extraction import ModifiedScheme, extract


@pytest.fixture
def rng():
    """A pinned random stream."""
    return derive_rng(1234)


@pytest.fixture
def honest_transcript():
    """2000 honest rounds."""
    return run_exchange(2000, HonestImmediateAlice(), HonestBob(), derive_rng(7))


@pytest.fixture
def usd_transcript():
    """2000 rounds against an unambiguous-discrimination Alice."""
    return run_exchange(2000, UsdIndividualAlice(), HonestBob(), derive_rng(8))


@pytest.fixture
def small_modified_view(honest_transcript):
    """Modified-scheme key over the honest transcript, with guesses."""
    return extract(honest_transcript, ModifiedScheme(k=3, n=2000), with_guesses=True)


@pytest.fixture
def session_config() -> SessionConfig:
    """A session small enough to run in a few milliseconds."""
    return SessionConfig(scheme="modified", n=1000, k=4, seed=11)


@pytest.fixture
def config_file(tmp_path):
    """A TOML experiment config for table2."""
    path = tmp_path / "table2.toml"
    path.write_text('experiment = "table2"\nn = 100000\nk = 5\n', encoding="utf-8")
    return path
