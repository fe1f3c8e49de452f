"""Exception types shared across the package.

Everything derives from SkosensError so callers can catch library failures
with a single except clause; the CLI maps subclasses onto exit codes.
"""


class SkosensError(Exception):
    """Base class for all library errors."""


class NegativeEntry(SkosensError):
    """A routing/reflection matrix has an entry below zero."""


class NonzeroDiagonal(SkosensError):
    """A routing/reflection matrix has a nonzero diagonal entry."""


class SpectralRadiusTooLarge(SkosensError):
    """Power-iteration estimate of a spectral radius is >= 1 - 1e-9."""


class ShapeMismatch(SkosensError):
    """Two grid paths disagree in grid or value shape."""


class DimensionMismatch(SkosensError):
    """An operation restricted to one dimension received a J != 1 input."""


class NoConvergence(SkosensError):
    """A fixed-point iteration hit its iteration cap before converging."""


class SingularSystem(SkosensError):
    """A boundary linear system was singular (impossible for a valid spec)."""


class MonotonicityViolation(SkosensError):
    """The cumulative-push matrix decreased beyond tolerance at some step."""


class InvalidInitialCondition(SkosensError):
    """Initial state violates z0 >= 0 or the boundary/derivative pairing."""


class StateDependentDriftUnsupported(SkosensError):
    """Coupled-pair runs require constant drift."""


class InsufficientSamples(SkosensError):
    """An estimator needs at least two replications for a standard error."""


class DomainError(SkosensError):
    """A closed-form transform was evaluated outside its parameter domain."""
