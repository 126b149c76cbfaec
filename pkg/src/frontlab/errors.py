"""Exception types raised by the solvers and pipelines."""


class FrontLabError(Exception):
    """Base class for solver failures (CLI exit code 1)."""


class NoPositiveEigenvalue(FrontLabError):
    """Largest discrete eigenvalue is not above the tolerance (no spectral gap)."""


class NonConvergence(FrontLabError):
    pass


class ZeroFunction(FrontLabError, ValueError):
    pass


class BracketFailure(FrontLabError):
    """Both ends of a speed bracket classify the same way."""


class StiffnessFailure(FrontLabError):
    pass


class LinearSolveFailure(FrontLabError):
    pass


class WindowTooShort(FrontLabError, ValueError):
    pass


class InsufficientSupport(FrontLabError, ValueError):
    pass


class RootNotBracketed(FrontLabError):
    pass


class PreconditionViolated(FrontLabError, ValueError):
    pass


class SampleOutsideDomain(FrontLabError, ValueError):
    pass


class GridEmpty(FrontLabError, ValueError):
    pass


class DomainBreach(UserWarning):
    """A tracked level set came within a few nodes of the computational boundary."""
