class CasimirError(Exception):
    """Base class for solver errors."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the domain of the operation."""


class ModelError(CasimirError, ValueError):
    """A material or sheet model is invalid or unsupported."""


class NumericalError(CasimirError, ArithmeticError):
    """Quadrature or summation produced a non-finite or unconverged value."""
