"""
Core value types, errors, limits and random streams for QOKD.
"""

from qokd.core.models import (
    QubitState,
    Basis,
    Announcement,
    Conclusive,
    Inconclusive,
    Conclusiveness,
    VerdictCode,
    SARG04_STATES,
    DIAGONAL_STATES,
    circular_distance,
    verdict_from_code,
)
from qokd.core.exceptions import (
    QOKDError,
    ValidationError,
    SchemeMismatchError,
    TranscriptError,
    ProtocolError,
    ConfigurationError,
)
from qokd.core.limits import (
    MAX_FRAME_BYTES,
    MAX_RAW_QUBITS,
    MAX_COLEX_ENUMERATION,
    DEFAULT_RESTART_CAP,
    MAX_SESSION_STEPS,
    LimitExceededError,
    validate_frame_length,
    validate_raw_qubits,
    validate_probability,
    validate_positive,
    sanitize_csv_cell,
    check_symlink,
)
from qokd.core.rng import RandomStream, derive_rng, derive_seed

__all__ = [
    "QubitState",
    "Basis",
    "Announcement",
    "Conclusive",
    "Inconclusive",
    "Conclusiveness",
    "VerdictCode",
    "SARG04_STATES",
    "DIAGONAL_STATES",
    "circular_distance",
    "verdict_from_code",
    "QOKDError",
    "ValidationError",
    "SchemeMismatchError",
    "TranscriptError",
    "ProtocolError",
    "ConfigurationError",
    # Limits
    "MAX_FRAME_BYTES",
    "MAX_RAW_QUBITS",
    "MAX_COLEX_ENUMERATION",
    "DEFAULT_RESTART_CAP",
    "MAX_SESSION_STEPS",
    "LimitExceededError",
    "validate_frame_length",
    "validate_raw_qubits",
    "validate_probability",
    "validate_positive",
    "sanitize_csv_cell",
    "check_symlink",
    # Random streams
    "RandomStream",
    "derive_rng",
    "derive_seed",
]
