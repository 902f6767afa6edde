"""Offline tests for the exception taxonomy.

Each test constructs an exception and asserts type relationships, the stable
``code`` and message round-tripping (``str(exc)`` equals the message).
"""

from __future__ import annotations

import pytest
from netustat.exceptions import (
    DegenerateVarianceError,
    ExtrapolationError,
    InvalidArgumentError,
    MissingIngredientError,
    NetUstatError,
    ReplicationError,
    ResourceLimitError,
    SingularFitError,
    UnsupportedOperationError,
)


@pytest.mark.parametrize(
    ("cls", "code"),
    [
        (InvalidArgumentError, "invalid_argument"),
        (ResourceLimitError, "resource_limit"),
        (UnsupportedOperationError, "unsupported_operation"),
        (SingularFitError, "singular_fit"),
        (DegenerateVarianceError, "degenerate_variance"),
        (ExtrapolationError, "extrapolation"),
    ],
)
def test_message_errors_keep_message_and_code(cls, code) -> None:
    """Plain errors subclass the base directly and preserve their message."""

    message = "something specific went wrong"
    exc = cls(message)
    assert isinstance(exc, NetUstatError)
    assert cls.__bases__ == (NetUstatError,)
    assert str(exc) == message
    assert exc.code == code


def test_missing_ingredient_names_field_and_consumer() -> None:
    # MissingIngredientError should name both the field and the evaluator
    exc = MissingIngredientError("tau[2,2]", needed_by="nondegenerate_bound")
    assert isinstance(exc, NetUstatError)
    assert exc.code == "missing_ingredient"
    assert exc.field == "tau[2,2]"
    assert exc.needed_by == "nondegenerate_bound"
    assert str(exc) == "nondegenerate_bound requires ingredient 'tau[2,2]'"


def test_replication_error_carries_rep_index() -> None:
    # ReplicationError should expose the failing replication
    exc = ReplicationError(17, "SingularFitError: design is rank deficient")
    assert exc.rep == 17
    assert exc.code == "replication_failed"
    assert str(exc).startswith("replication 17 failed: ")


def test_base_error_has_unknown_code() -> None:
    exc = NetUstatError("boom")
    assert exc.code == "unknown_error"
    assert str(exc) == "boom"
