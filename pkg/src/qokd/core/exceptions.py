"""
Custom exceptions for QOKD.
"""

__all__ = [
    "QOKDError",
    "ValidationError",
    "SchemeMismatchError",
    "TranscriptError",
    "ProtocolError",
    "ConfigurationError",
]


class QOKDError(Exception):
    """Base exception for all QOKD errors."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} - {self.details}"
        return self.message


class ValidationError(QOKDError):
    """Raised when a parameter or precondition is invalid."""

    def __init__(
        self,
        message: str,
        parameter: str | None = None,
        value: object | None = None,
        details: dict | None = None,
    ):
        details = dict(details or {})
        if parameter is not None:
            details["parameter"] = parameter
        if value is not None:
            details["value"] = value
        super().__init__(message, details)
        self.parameter = parameter
        self.value = value


class SchemeMismatchError(ValidationError):
    """Raised when a raw key does not fit an extraction scheme."""

    def __init__(self, message: str, scheme: str, expected: int | None = None, actual: int | None = None):
        details = {"scheme": scheme}
        if expected is not None:
            details["expected"] = expected
        if actual is not None:
            details["actual"] = actual
        super().__init__(message, parameter="raw_length", details=details)
        self.scheme = scheme
        self.expected = expected
        self.actual = actual


class TranscriptError(QOKDError):
    """Raised when a transcript cannot support the requested statistic."""


class ProtocolError(QOKDError):
    """
    Raised on wire or session-order violations.

    The reason is one of the short machine-readable codes carried in ABORT
    messages (protocol-order, version-mismatch, malformed-frame, restart-cap,
    frame-too-large).
    """

    def __init__(self, message: str, reason: str, details: dict | None = None):
        details = dict(details or {})
        details["reason"] = reason
        super().__init__(message, details)
        self.reason = reason


class ConfigurationError(QOKDError):
    """Raised when configuration is invalid."""

    def __init__(self, message: str, config_key: str | None = None):
        details = {}
        if config_key is not None:
            details["config_key"] = config_key
        super().__init__(message, details)
        self.config_key = config_key
