"""
Exceptions for the driftwalk library.
"""

# Domain errors (invalid input) use 3xxx codes, numerical failures 4xxx.
NON_FINITE = 3001
OUT_OF_RANGE = 3002
INVARIANT_VIOLATED = 3003
ZERO_DRIFT = 3004
DEGENERATE_GRID = 3005

BRACKETING_FAILED = 4001
QUADRATURE_FAILED = 4002
SAMPLING_FAILED = 4003


class DriftwalkError(Exception):
    """Base exception for driftwalk errors."""

    def __init__(self, code, message, suggestion=None):
        self.code = code
        self.message = message
        self.suggestion = suggestion
        super().__init__(f"[{code}] {message}" + (f" Suggestion: {suggestion}" if suggestion else ""))


class DomainError(DriftwalkError, ValueError):
    """Exception for inputs outside an operation's domain."""

    def __init__(self, message, code=OUT_OF_RANGE, suggestion=None):
        super().__init__(code, message, suggestion)


class NumericalError(DriftwalkError, ArithmeticError):
    """Exception for root-finding, quadrature or sampling failures."""

    def __init__(self, message, code=BRACKETING_FAILED, suggestion=None):
        super().__init__(code, message, suggestion)
