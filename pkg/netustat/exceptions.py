"""Exception taxonomy for netustat.

Defines a flat hierarchy of exceptions used across the library and the CLI.
Every exception carries a stable machine-readable ``code`` which the CLI
places in its error envelope.

All exceptions accept a human-readable message. ``str(exception)`` returns the
message unchanged.
"""

from __future__ import annotations


class NetUstatError(Exception):
    """Base exception for netustat errors."""

    code: str = "unknown_error"

    def __init__(self, message: str) -> None:
        super().__init__(message)


class InvalidArgumentError(NetUstatError):
    """Raised when inputs fail validation or violate invariants."""

    code = "invalid_argument"


class ResourceLimitError(NetUstatError):
    """Raised when a computation would exceed its configured budget."""

    code = "resource_limit"


class UnsupportedOperationError(NetUstatError):
    """Raised when an operation needs a capability the input does not provide."""

    code = "unsupported_operation"


class SingularFitError(NetUstatError):
    """Raised when the null regression design is rank deficient."""

    code = "singular_fit"


class DegenerateVarianceError(NetUstatError):
    """Raised when the variance estimate of the test statistic is zero."""

    code = "degenerate_variance"


class ExtrapolationError(NetUstatError):
    """Raised when a tabulated mixing model is queried outside its grid."""

    code = "extrapolation"


class MissingIngredientError(NetUstatError):
    """Raised when a bound evaluator lacks a required ingredient."""

    code = "missing_ingredient"

    def __init__(self, field: str, *, needed_by: str) -> None:
        super().__init__(f"{needed_by} requires ingredient '{field}'")
        self.field = field
        self.needed_by = needed_by


class ReplicationError(NetUstatError):
    """Raised when a Monte Carlo replication fails; carries the rep index."""

    code = "replication_failed"

    def __init__(self, rep: int, message: str) -> None:
        super().__init__(f"replication {rep} failed: {message}")
        self.rep = rep
