"""Exception hierarchy.

Every error raised by the kit derives from ``ScaleKitError``.  The CLI maps
``DomainError`` subclasses to exit status 3 and ``NumericalError`` subclasses
to exit status 4.
"""

import warnings


class ScaleKitError(Exception):
    pass


class DomainError(ScaleKitError, ValueError):
    """Argument outside the region where a formula is defined."""


class NumericalError(ScaleKitError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy value."""


# domain-type errors
class PoleError(DomainError):
    pass


class DeltaError(DomainError):
    pass


class DriftSignError(DomainError):
    pass


class GridError(DomainError):
    pass


class ConfigError(DomainError):
    pass


class IncompatibleDynamics(DomainError):
    pass


class DegenerateError(DomainError):
    pass


class ComplexRootError(DomainError):
    def __init__(self, msg, roots=None):
        super().__init__(msg)
        self.roots = roots


class RepeatedRootError(DomainError):
    def __init__(self, msg, roots=None):
        super().__init__(msg)
        self.roots = roots


class DerivativeUnavailable(DomainError):
    pass


# numerical errors
class ConvergenceError(NumericalError):
    pass


class InversionError(NumericalError):
    pass


class ScanError(NumericalError):
    pass


class DivergentIntegral(NumericalError):
    pass


class SingularLimit(NumericalError):
    pass


class DivergenceWarning(RuntimeWarning):
    pass


def warn_divergence(msg):
    warnings.warn(msg, DivergenceWarning, stacklevel=3)
