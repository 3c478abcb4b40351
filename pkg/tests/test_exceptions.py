"""
Unit tests for exceptions.
"""

import pytest

from driftwalk.exceptions import (
    BRACKETING_FAILED,
    DriftwalkError,
    DomainError,
    NumericalError,
    OUT_OF_RANGE,
    ZERO_DRIFT,
)


class TestDriftwalkError:
    """Test suite for the DriftwalkError class."""

    def test_init_with_all_fields(self):
        """Test initializing the exception with all fields."""
        error = DriftwalkError(code=3002, message="Error message", suggestion="Suggestion")

        assert error.code == 3002
        assert error.message == "Error message"
        assert error.suggestion == "Suggestion"
        assert str(error) == "[3002] Error message Suggestion: Suggestion"

    def test_init_without_suggestion(self):
        """Test initializing the exception without a suggestion."""
        error = DriftwalkError(code=4001, message="Error message")

        assert error.suggestion is None
        assert str(error) == "[4001] Error message"


class TestDomainError:
    """Test suite for the DomainError class."""

    def test_default_code(self):
        """Test that the default code is the out-of-range code."""
        error = DomainError("alpha must lie in [0, 1]")

        assert error.code == OUT_OF_RANGE
        assert str(error) == "[3002] alpha must lie in [0, 1]"

    def test_is_value_error(self):
        """Test that callers can catch domain errors as ValueError."""
        with pytest.raises(ValueError):
            raise DomainError("bad input", code=ZERO_DRIFT)


class TestNumericalError:
    """Test suite for the NumericalError class."""

    def test_default_code(self):
        """Test that the default code is the bracketing code."""
        error = NumericalError("no sign change")

        assert error.code == BRACKETING_FAILED
        assert isinstance(error, ArithmeticError)
        assert isinstance(error, DriftwalkError)
