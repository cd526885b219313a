"""Numerical BV calculus on weighted planar metric measure spaces.

Core objects: weighted planes with measured structural constants
(doubling, Ahlfors frames), polyline curves and Hausdorff-measure
estimators, grid fields with discrete total variation / perimeter /
coarea machinery, metric-valued variation via Lipschitz post-
composition, a Jordan-curve length-budget pipeline, Whitney-type ball
covers, and a homeomorphism laboratory checking the two-sided
comparability of the variations of a map and of its inverse.
"""

from .bv_scalar import GridField, IndicatorSet
from .curves import PolylineCurve
from .errors import (
    ClippedBall,
    ConvergenceFailure,
    DegenerateCurve,
    DegenerateField,
    InvalidArgument,
    InvalidDensity,
    PlaneBVError,
    PreconditionViolated,
    SeparationFailure,
    SingularityError,
    UndefinedAtVertex,
)
from .geometry import Rect
from .reports import VariationReport
from .weighted_plane import AhlforsReport, MeasureEstimate, SampleConfig, WeightedPlane

__version__ = "0.1.0"

__all__ = [
    "AhlforsReport",
    "ClippedBall",
    "ConvergenceFailure",
    "DegenerateCurve",
    "DegenerateField",
    "GridField",
    "IndicatorSet",
    "InvalidArgument",
    "InvalidDensity",
    "MeasureEstimate",
    "PlaneBVError",
    "PolylineCurve",
    "PreconditionViolated",
    "Rect",
    "SampleConfig",
    "SeparationFailure",
    "SingularityError",
    "UndefinedAtVertex",
    "VariationReport",
    "WeightedPlane",
    "__version__",
]
