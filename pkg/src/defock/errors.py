"""Exception taxonomy shared across the toolkit.

The CLI maps these onto its exit-code contract, so library code should
raise the most specific class that applies.
"""


class DefockError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(DefockError, ValueError):
    """Bad argument: out of domain, contradictory options, malformed input."""


class TruncationError(DefockError):
    """A truncated Fock expansion cannot hold the requested state.

    Raised when the estimated probability mass beyond the truncation
    exceeds the convergence threshold, or when an operation would push
    amplitude past the last retained level.
    """


class DivergenceError(DefockError):
    """A coefficient series lies outside its radius of convergence."""


class DegenerateStateError(DefockError, ValueError):
    """The requested state or statistic is identically degenerate
    (zero vector, vanishing mean photon number, ...)."""


class ToleranceError(DefockError):
    """A verification run exceeded its error tolerance."""


class QuadratureError(DefockError):
    """Numerical quadrature failed to converge to the requested accuracy."""


class PerturbativeRegimeWarning(UserWarning):
    """The deformation strength is outside the regime in which the
    first-order closed forms are quantitatively reliable."""
