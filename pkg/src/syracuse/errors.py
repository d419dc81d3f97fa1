"""Exception hierarchy shared by every module of the package."""


class SyracuseError(Exception):
    """Base class for all errors raised by :mod:`syracuse`."""


class InsufficientPrecision(SyracuseError):
    """A computation lost too much accuracy at the current working precision."""


class EscalationExhausted(SyracuseError):
    """The precision policy reached ``max_bits`` without a stable result."""

    def __init__(self, message, bits=None, last=None):
        super().__init__(message)
        self.bits = bits
        self.last = last


class AmbiguousFloor(SyracuseError):
    """The error interval of a value straddles a multiple of 2."""


class DerivativeVanishes(SyracuseError):
    """An enclosure of f' contains zero where a nonzero derivative is required."""


class BracketFailure(SyracuseError):
    """f' does not change sign (certifiably) across a root bracket."""


class CycleNotFound(SyracuseError):
    """Newton refinement of a periodic orbit did not converge from its seed."""


class NotACycle(SyracuseError):
    """Points handed to a cycle routine are not mapped cyclically by f."""


class PreconditionViolated(SyracuseError):
    """Input does not satisfy the hypotheses of a checked inequality."""


class CapExceeded(SyracuseError):
    """An iteration cap was reached; ``partial`` holds the orbit computed so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


class EmptySequence(SyracuseError):
    """A statistic was requested for an empty point set."""


class QuadratureDivergence(SyracuseError):
    """Successive quadrature refinements failed to agree."""


class ConfigMismatch(SyracuseError):
    """A resumable cache was written with a different configuration."""
