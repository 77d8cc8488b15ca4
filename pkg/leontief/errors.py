"""Error classes.

Every error the toolkit raises on purpose derives from LeontiefError, so the
command line can report it as a single `<ErrorClass>: <message>` line.
"""


class LeontiefError(Exception):
    """Base class for toolkit errors."""


class DomainError(LeontiefError):
    """A quantity is outside its mathematical domain."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class SpecError(LeontiefError):
    """Inconsistent generation or policy parameters."""


class OrderingError(LeontiefError):
    """An operation that needs output-ordered establishments got unordered ones."""


class IdentificationError(LeontiefError):
    """A fit has too little variation in its regressors to identify its parameters."""


class ConfigError(LeontiefError):
    """A run configuration could not be read, parsed or validated."""


class OutputError(LeontiefError):
    """A result file could not be written or read."""
