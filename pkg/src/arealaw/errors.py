"""Exception hierarchy shared by all modules."""


class ArealawError(Exception):
    """Base class for every error raised by this package."""


class InvalidRegion(ArealawError, ValueError):
    pass


class RegionTooLarge(ArealawError, ValueError):
    pass


class InvalidSubsystem(ArealawError, ValueError):
    pass


class DimMismatch(ArealawError, ValueError):
    pass


class NotAState(ArealawError, ValueError):
    """Raised when a matrix fails the density-operator invariants."""


class NotQubits(ArealawError, ValueError):
    pass


class DoesNotFit(ArealawError, ValueError):
    pass


class InsufficientPoints(ArealawError, ValueError):
    pass


class NonDecayingProfile(ArealawError, ValueError):
    """Fitted slope is non-negative, so no finite correlation length exists."""


class DimTooLarge(ArealawError, ValueError):
    pass


class TooLarge(ArealawError, ValueError):
    pass


class NotDivisible(ArealawError, ValueError):
    pass


class ZeroProbabilityOutcome(ArealawError, ValueError):
    pass


class RankTooLarge(ArealawError, ValueError):
    pass


class RingUnsupported(ArealawError, ValueError):
    pass


class SolverDidNotConverge(ArealawError, RuntimeError):
    """The SDP backend failed; ``lower`` and ``upper`` carry the best bounds found."""

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class NoConvergence(ArealawError, RuntimeError):
    """Krylov eigensolver ran out of iterations; ``trace`` holds residual history."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class ConfigError(ArealawError, ValueError):
    pass


class ComputeError(ArealawError, RuntimeError):
    """A pipeline stage failed after the configuration was accepted."""
