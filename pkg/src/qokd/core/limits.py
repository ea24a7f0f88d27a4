"""
Resource limits and validators for QOKD.

Centralizes the size caps that keep simulations at desk scale, plus the
small validators that enforce them, so every entry point fails the same
way before allocating anything large.
"""

import warnings
from pathlib import Path

from qokd.core.exceptions import ValidationError

__all__ = [
    # Configuration constants
    "MAX_FRAME_BYTES",
    "MAX_RAW_QUBITS",
    "MAX_COLEX_ENUMERATION",
    "DEFAULT_RESTART_CAP",
    "MAX_SESSION_STEPS",
    "CSV_FORMULA_PREFIXES",
    # Exceptions
    "LimitExceededError",
    # Validators
    "validate_frame_length",
    "validate_raw_qubits",
    "validate_probability",
    "validate_positive",
    "sanitize_csv_cell",
    "check_symlink",
]


# =============================================================================
# Limits
# =============================================================================

# Largest wire frame payload accepted by decode_frame (64 MiB)
MAX_FRAME_BYTES = 64 * 1024 * 1024

# Memory budget for one raw key held as per-position arrays
MAX_RAW_QUBITS = 50_000_000

# Above this many colex subsets an enumeration emits a warning
MAX_COLEX_ENUMERATION = 5_000_000

# Phase-I repetitions before a session aborts
DEFAULT_RESTART_CAP = 16

# Message deliveries before the session runner gives up
MAX_SESSION_STEPS = 10_000

# Characters that trigger formula execution in spreadsheets
CSV_FORMULA_PREFIXES = ("=", "+", "-", "@", "\t", "\r")


# =============================================================================
# Exceptions
# =============================================================================

class LimitExceededError(ValidationError):
    """
    Raised when a request would exceed a configured resource limit.

    The message names the limit so the caller can raise it explicitly.
    """

    def __init__(self, what: str, requested: int, limit: int):
        message = (
            f"{what} ({requested:,}) exceeds the configured limit ({limit:,}). "
            f"Reduce the parameters or raise the limit explicitly."
        )
        super().__init__(
            message,
            parameter=what,
            details={"requested": requested, "limit": limit},
        )
        self.requested = requested
        self.limit = limit


# =============================================================================
# Validators
# =============================================================================

def validate_frame_length(length: int, max_bytes: int = MAX_FRAME_BYTES) -> int:
    """
    Validate a declared frame payload length.

    Returns:
        The length if it is acceptable

    Raises:
        LimitExceededError: If the payload would exceed max_bytes
    """
    if length > max_bytes:
        raise LimitExceededError("frame payload bytes", length, max_bytes)
    return length


def validate_raw_qubits(count: int, max_qubits: int = MAX_RAW_QUBITS) -> int:
    """
    Validate the number of raw-key positions a run would materialize.

    Raises:
        LimitExceededError: If count exceeds max_qubits
    """
    if count > max_qubits:
        raise LimitExceededError("raw key qubits", count, max_qubits)
    return count


def validate_probability(value: float, name: str, *, allow_zero: bool = True, allow_one: bool = True) -> float:
    """Check that value lies in [0, 1], optionally excluding the endpoints."""
    low_ok = value > 0 or (allow_zero and value == 0)
    high_ok = value < 1 or (allow_one and value == 1)
    if not (low_ok and high_ok):
        raise ValidationError(f"{name} must be a probability, got {value}", parameter=name, value=value)
    return value


def validate_positive(value: int, name: str, minimum: int = 1) -> int:
    """Check that an integer parameter is at least minimum."""
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}", parameter=name, value=value)
    return value


def sanitize_csv_cell(value: str) -> str:
    """
    Sanitize a cell value for CSV output to prevent formula injection.

    Args:
        value: The cell value to sanitize

    Returns:
        Sanitized value safe for CSV output
    """
    if value and value[0] in CSV_FORMULA_PREFIXES:
        return "'" + value
    return value


def check_symlink(path: Path | str, warn: bool = True) -> tuple[bool, Path]:
    """
    Check if a path is a symlink and optionally warn.

    Returns:
        Tuple of (is_symlink, resolved_path)
    """
    path = Path(path)
    is_symlink = path.is_symlink()

    if is_symlink and warn:
        warnings.warn(
            f"Following symlink: {path} -> {path.resolve()}",
            UserWarning,
            stacklevel=2,
        )

    return is_symlink, path.resolve()
