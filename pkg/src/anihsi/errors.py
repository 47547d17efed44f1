"""Exception hierarchy shared by all modules."""


class AnihsiError(Exception):
    """Base class for library errors."""


class InputError(AnihsiError, ValueError):
    """Rejected input: violates a documented precondition."""


class NumericalError(AnihsiError, ArithmeticError):
    """A numerical procedure could not meet its accuracy contract."""


class SolverError(NumericalError):
    """Root finder failed to converge; carries the last bracket."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class QuadratureConfigError(NumericalError):
    """Quadrature configuration cannot certify the requested accuracy."""


class ConvergenceDiagnostic(NumericalError):
    """A limit sequence behaved non-monotonically beyond tolerance."""


class UnsupportedBranchError(AnihsiError, NotImplementedError):
    """Requested parameter regime is outside the implemented branch."""
