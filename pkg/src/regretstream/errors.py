"""Exception types shared across the package."""


class RegretstreamError(Exception):
    """Base class for all package errors."""


class ParseError(RegretstreamError):
    """Input line is not syntactically valid (carries a line number when known)."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SchemaError(RegretstreamError):
    """Input is structurally valid but violates the wire schema.

    ``field`` names the offending field.
    """

    def __init__(self, field, message=None, line_number=None):
        self.field = field
        self.line_number = line_number
        msg = message or f"missing or invalid required field: {field!r}"
        if line_number is not None:
            msg = f"line {line_number}: {msg}"
        super().__init__(msg)


class ValidationError(RegretstreamError):
    """An argument or dataset violates a documented precondition."""


class ConfigError(RegretstreamError):
    """A configuration object is internally inconsistent."""


class DuplicateTweetError(RegretstreamError):
    """Two tweet events share an id."""


class ContractError(RegretstreamError):
    """A pluggable component broke its interface contract."""


class UndefinedDifferenceError(RegretstreamError):
    """A normalized difference has a zero denominator and is undefined."""


class InsufficientDataError(RegretstreamError):
    """Not enough data to honor the request; carries the achievable maximum."""

    def __init__(self, message, achievable=None):
        self.achievable = achievable
        super().__init__(message)
