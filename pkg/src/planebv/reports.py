"""Report records for variation and perimeter computations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidArgument

SIGMA_MAX_CONVENTION = "sigma_max"

BOUNDED = "bounded"
LOGARITHMIC = "logarithmic"
POWER = "power"


@dataclass(frozen=True)
class VariationReport:
    """Outcome of a variation/perimeter computation.

    value is +inf when the quantity is classified divergent; the
    epsilon schedule and per-epsilon values document annular exhaustion
    for singular families.
    """

    value: float
    resolution: tuple | int | None = None
    convention: str = SIGMA_MAX_CONVENTION
    error_estimate: float | None = None
    epsilon_schedule: tuple = ()
    per_epsilon_values: tuple = ()
    growth_class: str | None = None
    growth_exponent: float | None = None
    growth_slope: float | None = None
    fit_quality: float | None = None
    excluded_nodes: int = 0
    degenerate: bool = False
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.value < 0 and not math.isinf(self.value):
            raise InvalidArgument("variation value must be nonnegative")
        if self.epsilon_schedule:
            eps = self.epsilon_schedule
            if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
                raise InvalidArgument("epsilon schedule must be strictly decreasing")
            vals = self.per_epsilon_values
            if vals and any(v2 < v1 * (1 - 1e-9) for v1, v2 in zip(vals, vals[1:])):
                raise InvalidArgument("per-epsilon values must be nondecreasing as eps decreases")
        if self.growth_class not in (None, BOUNDED, LOGARITHMIC, POWER):
            raise InvalidArgument(f"unknown growth class {self.growth_class!r}")

    def to_dict(self):
        return {
            "value": self.value,
            "resolution": self.resolution,
            "convention": self.convention,
            "error_estimate": self.error_estimate,
            "epsilon_schedule": list(self.epsilon_schedule),
            "per_epsilon_values": list(self.per_epsilon_values),
            "growth_class": self.growth_class,
            "growth_exponent": self.growth_exponent,
            "growth_slope": self.growth_slope,
            "fit_quality": self.fit_quality,
            "excluded_nodes": self.excluded_nodes,
            "degenerate": self.degenerate,
            "notes": list(self.notes),
        }
