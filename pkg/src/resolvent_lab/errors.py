"""
Exception hierarchy for resolvent_lab.

Every error raised by the library derives from ``ResolventLabError`` and also
from the builtin exception a caller would naturally catch (``ValueError`` for
bad inputs, ``RuntimeError`` for numerical failures), so existing
``except ValueError`` handlers keep working.
"""


class ResolventLabError(Exception):
    """Root of all library errors."""


class DomainError(ResolventLabError, ValueError):
    """A point lies outside the open disk on which a function is defined."""


class OutOfRange(ResolventLabError, ValueError):
    """A parameter violates the precondition of a formula or theorem."""


class RadiusExceeded(OutOfRange):
    """A point lies outside the disk of analytic continuation D_rho(r)."""


class NegativeM(OutOfRange):
    """Class parameters give M < 0 where sqrt(M) is required."""


class PoleAtR(ResolventLabError, ZeroDivisionError):
    """The rational function A(r) was evaluated at one of its poles."""


class VariantUnsupported(ResolventLabError, TypeError):
    """The operation needs a Herglotz representation the generator does not carry."""


class ConfigError(ResolventLabError, ValueError):
    """A configuration or generator document is invalid."""

    def __init__(self, message: str, *, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NumericalFailure(ResolventLabError, RuntimeError):
    """Base class for solver and integrator failures."""


class NoConvergence(NumericalFailure):
    """Newton iteration and continuation were exhausted without meeting the tolerance."""


class IterateEscaped(NumericalFailure):
    """A Newton iterate left the admissible disk and step halving could not recover it."""


class TrajectoryEscaped(NumericalFailure):
    """A flow trajectory reached the boundary of the unit disk."""

    def __init__(self, message: str, *, s: float | None = None):
        self.s = s
        super().__init__(message)
