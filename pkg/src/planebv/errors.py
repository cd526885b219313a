"""Exception types shared across the toolkit."""


class PlaneBVError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(PlaneBVError, ValueError):
    """A caller-supplied argument violates an operation's contract."""


class InvalidDensity(PlaneBVError, ValueError):
    """Density undefined or nonpositive beyond the allowed singular set."""


class DegenerateCurve(PlaneBVError, ValueError):
    """Operation requires a curve of positive length."""


class UndefinedAtVertex(PlaneBVError, ValueError):
    """Metric speed queried at a polyline vertex parameter."""


class ClippedBall(PlaneBVError, ValueError):
    """A covering ball escapes the computation window."""


class PreconditionViolated(PlaneBVError, RuntimeError):
    """A stated numerical precondition does not hold for the inputs."""


class SingularityError(PlaneBVError, RuntimeError):
    """Non-finite Jacobian encountered away from declared singular points."""


class SeparationFailure(PlaneBVError, RuntimeError):
    """No single level-set component separates the two markers."""

    def __init__(self, message, components=None):
        super().__init__(message)
        self.components = components or []


class ConvergenceFailure(PlaneBVError, RuntimeError):
    """A stage sequence fails its convergence contract."""


class DegenerateField(PlaneBVError, RuntimeError):
    """All scanned levels are empty for this field."""
