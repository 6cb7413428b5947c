"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``ParameterError`` is a usage problem (2),
everything else derived from ``LabError`` is an internal fault (3).
"""


class LabError(Exception):
    """Base class for every error raised by so8lab."""


class ParameterError(LabError, ValueError):
    """Invalid input parameters (even m, l < 1, non-unit quaternion, ...)."""


class ToleranceFault(LabError, ArithmeticError):
    """A floating point decision could not be made with the required margin."""


class ConsistencyFault(LabError, RuntimeError):
    """An internal cross-check failed; indicates a bug rather than bad input."""


class BudgetExceeded(LabError, RuntimeError):
    """An enumeration or search ran past its configured bound."""
