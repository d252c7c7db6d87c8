"""Exception types raised by entscope."""


class EntscopeError(Exception):
    """Base class for all library errors."""


class DimensionError(EntscopeError, ValueError):
    """Party dimensions or array shapes do not match."""


class ArgumentError(EntscopeError, ValueError):
    """An integer argument (m, k, n, L) is out of its valid range."""


class NotProductError(EntscopeError, ValueError):
    """A state is not a product across the requested partition."""


class NonPSDError(EntscopeError, ValueError):
    """A matrix has eigenvalues below the PSD tolerance."""


class IsometryError(EntscopeError, ValueError):
    """A matrix V fails V^dagger V = I."""


class BudgetExceeded(EntscopeError, RuntimeError):
    """A cost guard on the joint dimension tripped."""


class ParseError(EntscopeError, ValueError):
    """A state expression could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    position : int
        Zero-based character offset in the expression.
    """

    def __init__(self, message, position=0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class StateFileError(EntscopeError, OSError):
    """A state or density-matrix file is missing or malformed."""
