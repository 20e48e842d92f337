"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ChatpulseError(Exception):
    """Base class for all chatpulse errors."""


class ParseError(ChatpulseError):
    """A transcript line could not be interpreted under the active profile."""

    def __init__(self, message: str, line_no: int | None = None) -> None:
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class OrderingError(ParseError):
    """An event timestamp moved backward beyond the allowed slack."""


class SchemaError(ChatpulseError):
    """A log, mapping, or ensemble file does not match its schema."""


class MappingConflictError(SchemaError):
    """A prior anonymization mapping is internally inconsistent."""


class NotAConversationError(ChatpulseError):
    """Engagement metrics requested for a window without two interacting users."""


class InsufficientDataError(ChatpulseError):
    """Too few conversation networks for the requested statistic."""


class DegenerateEnsembleError(InsufficientDataError):
    """Every conversation network has the same engagement; z-scores are undefined."""


class ParameterError(ChatpulseError, ValueError):
    """Inconsistent generator or window parameters."""
