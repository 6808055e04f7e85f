"""Exception hierarchy shared by all modules."""


class NHCError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(NHCError, ValueError):
    """Array shapes do not agree with the phase-space dimension."""


class InvalidShapeError(NHCError, ValueError):
    """B is not symmetric or Im B is not positive definite."""


class IllConditionedShapeError(InvalidShapeError):
    """Im B (or a frame's q-block) is numerically singular."""


class NotPositiveLagrangianError(NHCError, ValueError):
    """A frame does not span a positive Lagrangian subspace."""


class InvalidMetricError(NHCError, ValueError):
    """A metric is not symmetric, positive and symplectic within tolerance."""


class TransportSingularityError(NHCError, ArithmeticError):
    """The denominator of a fractional-linear action is singular."""


class PositivityLossError(NHCError, ArithmeticError):
    """A transported shape left the Siegel upper half space."""


class StepFailureError(NHCError, RuntimeError):
    """The adaptive integrator could not complete a step."""


class ProviderError(NHCError, RuntimeError):
    """A time-dependent coefficient provider failed."""


class ResolutionError(NHCError, ValueError):
    """A spatial grid is too coarse or too narrow for the sampled state."""


class AliasingError(NHCError, ValueError):
    """A momentum grid exceeds the Nyquist band of the position grid."""


class ConfigError(NHCError, ValueError):
    """A scenario configuration is malformed."""
