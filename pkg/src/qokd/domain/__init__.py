"""
Domain layer for QOKD.

Contains the protocol's entities and the strategy / scheme interfaces.
This layer has no dependencies on transports or the command line.
"""

from qokd.domain.entities import (
    RawKeyRecord,
    RawKeyTranscript,
    KeyBitDefinition,
    KeyGuess,
    ObliviousKeyView,
    Database,
    Role,
    Completed,
    Restarted,
    Aborted,
    SessionStatus,
    SessionConfig,
    ExperimentConfig,
    ExperimentReport,
    Preparation,
    MeasurementRequest,
    UNDEFINED_BIT,
)
from qokd.domain.services import (
    BobStrategy,
    AliceStrategy,
    ExtractionScheme,
)

__all__ = [
    # Entities
    "RawKeyRecord",
    "RawKeyTranscript",
    "KeyBitDefinition",
    "KeyGuess",
    "ObliviousKeyView",
    "Database",
    "Role",
    "Completed",
    "Restarted",
    "Aborted",
    "SessionStatus",
    "SessionConfig",
    "ExperimentConfig",
    "ExperimentReport",
    "Preparation",
    "MeasurementRequest",
    "UNDEFINED_BIT",
    # Service interfaces
    "BobStrategy",
    "AliceStrategy",
    "ExtractionScheme",
]
