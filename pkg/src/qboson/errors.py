"""Exception hierarchy shared by every module."""


class QBosonError(Exception):
    """Base class for all package errors."""


class DomainError(QBosonError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class ConvergenceError(QBosonError, ArithmeticError):
    """A series or quadrature did not reach its tolerance within the term cap."""


class GridError(QBosonError, ValueError):
    """A quadrature grid violates its invariants or does not match its use."""


class CalibrationError(QBosonError):
    """No candidate radial measure reproduces the q-factorial moments."""


class CutoffError(QBosonError, ValueError):
    """A normal-ordering cutoff reaches into truncation-contaminated levels."""


class DensityMatrixError(QBosonError, ValueError):
    """Input rejected as a density matrix.

    ``code`` is one of ``"shape"``, ``"not_hermitian"``, ``"bad_trace"``,
    ``"not_positive"``.
    """

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
