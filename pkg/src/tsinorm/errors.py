"""Shared exception types."""


class ParseError(ValueError):
    """Raised when a text input cannot be parsed.

    Carries the offending position when known (1-based line/column).
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class ConfigError(ValueError):
    """A structurally valid input violates a declared invariant."""


class DomainError(ValueError):
    """An operation was called outside its stated precondition."""
