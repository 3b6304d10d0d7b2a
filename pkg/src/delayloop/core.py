"""Plant and controller parameter types, and the map between physical and
dimensionless parameter spaces.

Every downstream module works in time normalized by the plant delay ``L``
(so the delay is exactly 1) and with the dimensionless quantities

    t_p = T_p / L,    h = K * K_p,    h_i = K * K_i * L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PlantModel:
    """First-order-plus-dead-time plant ``K exp(-sL) / (1 + s T_p)``."""

    K: float
    T_p: float
    L: float

    def __post_init__(self):
        if not (math.isfinite(self.K) and math.isfinite(self.T_p) and math.isfinite(self.L)):
            raise ValueError("plant parameters must be finite")
        if self.K == 0:
            raise ValueError("plant gain K must be nonzero")
        if self.T_p < 0:
            raise ValueError("time constant T_p must be >= 0")
        if self.L <= 0:
            raise ValueError("delay L must be > 0; delay-free plants are not supported")


@dataclass(frozen=True)
class NormalizedPlant:
    t_p: float

    def __post_init__(self):
        if not self.t_p >= 0:
            raise ValueError("t_p must be >= 0")


@dataclass(frozen=True)
class ControllerGains:
    """Dimensionless PI gains. ``h == 0`` is the pure integrator of the
    variable-structure controller's second mode."""

    h: float
    h_i: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and math.isfinite(self.h_i)):
            raise ValueError("gains must be finite")


@dataclass(frozen=True)
class PerformanceIndices:
    PO_y: float
    PO_v: float
    ISE: float
    PO_b: float | None = None

    def __post_init__(self):
        for name in ("PO_y", "PO_v", "ISE", "PO_b"):
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


def normalize_plant(plant: PlantModel) -> NormalizedPlant:
    if plant.L <= 0:
        raise ValueError("delay L must be > 0")
    return NormalizedPlant(t_p=plant.T_p / plant.L)


def gains_to_physical(g: ControllerGains, plant: PlantModel) -> tuple[float, float]:
    """Return ``(K_p, K_i)`` for dimensionless gains on ``plant``."""
    if plant.K == 0:
        raise ValueError("plant gain K must be nonzero")
    return g.h / plant.K, g.h_i / (plant.K * plant.L)


def gains_from_physical(K_p: float, K_i: float, plant: PlantModel) -> ControllerGains:
    return ControllerGains(h=plant.K * K_p, h_i=plant.K * K_i * plant.L)
