"""
QOKD - Quantum Oblivious Key Distribution toolkit.

Simulates SARG04-based oblivious key establishment, extracts oblivious keys
with the original, modified and generalized schemes, runs the
oblivious-transfer phase over a wire transport and reproduces the
protocol's statistics.

Usage:
    from qokd import exchange, oblivious_key, transfer

    # Raw key from 10^4 honest SARG04 rounds
    t = exchange(10_000, seed=1)

    # Both views of a modified-scheme key
    view = oblivious_key(10_000, k=6, seed=1)
    print(view.known_count, view.is_consistent())

    # One full session: Alice retrieves database bit 17
    outcome = transfer(n=10_000, k=6, db_index=17, seed=1)
    print(outcome.status, outcome.correct)
"""

__version__ = "0.1.0"

from qokd.core.models import (
    QubitState,
    Basis,
    Announcement,
    Conclusive,
    Inconclusive,
    VerdictCode,
)
from qokd.core.exceptions import (
    QOKDError,
    ValidationError,
    SchemeMismatchError,
    TranscriptError,
    ProtocolError,
    ConfigurationError,
)
from qokd.core.rng import derive_rng
from qokd.domain.entities import (
    RawKeyTranscript,
    ObliviousKeyView,
    Database,
    Role,
    SessionConfig,
    ExperimentConfig,
    ExperimentReport,
)
from qokd.exchange import run_exchange, make_alice, make_bob
from qokd.extraction import extract, make_scheme, dilute, min_M
from qokd.session import run_session, SessionOutcome

__all__ = [
    # Version
    "__version__",
    # Core models
    "QubitState",
    "Basis",
    "Announcement",
    "Conclusive",
    "Inconclusive",
    "VerdictCode",
    # Exceptions
    "QOKDError",
    "ValidationError",
    "SchemeMismatchError",
    "TranscriptError",
    "ProtocolError",
    "ConfigurationError",
    # Entities
    "RawKeyTranscript",
    "ObliviousKeyView",
    "Database",
    "Role",
    "SessionConfig",
    "ExperimentConfig",
    "ExperimentReport",
    # Building blocks
    "derive_rng",
    "run_exchange",
    "make_alice",
    "make_bob",
    "extract",
    "make_scheme",
    "dilute",
    "min_M",
    "run_session",
    "SessionOutcome",
    # Convenience functions
    "exchange",
    "oblivious_key",
    "transfer",
]


def exchange(n: int, alice: str = "honest", bob: str = "honest", seed: int = 0) -> RawKeyTranscript:
    """
    Run n SARG04 rounds between named strategies.

    Args:
        n: Number of rounds
        alice: "honest" or "usd"
        bob: "honest", "bias", "bias-plus" or "bias-minus"
        seed: Master seed

    Returns:
        The raw-key transcript
    """
    return run_exchange(n, make_alice(alice), make_bob(bob, n), derive_rng(seed))


def oblivious_key(
    n: int,
    k: int,
    scheme: str = "modified",
    m: int | None = None,
    seed: int = 0,
) -> ObliviousKeyView:
    """Generate an honest raw key of the right length and extract an N-bit oblivious key."""
    s = make_scheme(scheme, n, k, m)
    return extract(exchange(s.raw_length, seed=seed), s)


def transfer(
    n: int = 10_000,
    k: int = 6,
    scheme: str = "modified",
    db_index: int | None = None,
    seed: int = 0,
    **options,
) -> SessionOutcome:
    """Run one oblivious-transfer session in process; options go to SessionConfig."""
    return run_session(SessionConfig(scheme=scheme, n=n, k=k, db_index=db_index, seed=seed, **options))
