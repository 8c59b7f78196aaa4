"""Exception taxonomy shared by all irkit modules."""


class IrkitError(Exception):
    """Base class for all errors raised by irkit."""


class SchemaError(IrkitError):
    """Schema construction or schema/data mismatch."""


class ParseError(IrkitError):
    """Unparseable cell during ingestion; carries 1-based row and column name."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DomainError(IrkitError):
    """Value outside its declared categorical domain."""


class ShapeError(IrkitError):
    """Arity or dimension mismatch between related objects."""


class ParameterError(IrkitError):
    """Invalid parameter value (q < 2, max_leaves < 2, ...)."""


class ConfigError(IrkitError):
    """Inconsistent run configuration (e.g. sample count too small for OLS)."""


class InfeasibleError(IrkitError):
    """Requested operation has no valid outcome (e.g. no off-bin to pick)."""


class EmptyDocumentError(IrkitError):
    """Text input contains no tokens."""


class BackendError(IrkitError):
    """External prediction backend failed; carries a stderr excerpt."""

    def __init__(self, message, stderr_excerpt=""):
        super().__init__(message)
        self.stderr_excerpt = stderr_excerpt


class ProtocolError(IrkitError):
    """External backend replied with a malformed or mis-shaped message."""


class DatasetError(IrkitError):
    """Named dataset is unavailable or fails its integrity check."""
