"""Static check of whether friction on the pole can carry the vehicle's weight.

Gravity acts along the pole axis, out of the wrap plane, so the only thing
holding a perched vehicle up is friction from whatever normal force the wrap
presses onto the pole.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

G = 9.80665


@dataclass(frozen=True)
class GripState:
    normal_forces: Sequence[float]
    wrap_angle: float
    friction_mu: float
    vehicle_mass: float
    g: float = G

    def __post_init__(self):
        if any(not f >= 0 for f in self.normal_forces):
            raise ValueError("normal forces must be >= 0")
        if not self.wrap_angle >= 0:
            raise ValueError("wrap angle must be >= 0")


@dataclass(frozen=True)
class HoldReport:
    capacity: float
    required: float
    holds: bool
    margin: float


def required_normal_force(vehicle_mass: float, friction_mu: float, g: float = G) -> float:
    """Total normal force for which friction exactly balances the weight."""
    if friction_mu <= 0:
        raise ValueError("frictionless hold impossible (friction_mu must be > 0)")
    return vehicle_mass * g / friction_mu


def capstan_tension_ratio(wrap_angle: float, friction_mu: float) -> float:
    if wrap_angle < 0 or friction_mu < 0:
        raise ValueError("wrap angle and friction coefficient must be >= 0")
    return math.exp(friction_mu * wrap_angle)


def slide_check(grip: GripState) -> HoldReport:
    capacity = grip.friction_mu * math.fsum(grip.normal_forces)
    required = grip.vehicle_mass * grip.g
    if required == 0:
        margin = math.inf
    else:
        margin = capacity / required
    return HoldReport(capacity, required, capacity >= required, margin)
