"""Closed-form setpoint step response of the matched Smith predictor.

For ``t > 1`` the output is a damped cosine with decay ``a`` and frequency
``b``; overshoots are returned as nonnegative magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ControllerGains
from .errors import OverdampedError

#: Below this damped frequency the closed forms are refused.
MIN_B = 1e-6


@dataclass(frozen=True)
class SpDamping:
    a: float
    b: float
    discriminant: float

    @property
    def underdamped(self) -> bool:
        return self.discriminant > 0


def sp_damping(g: ControllerGains, t_p: float) -> SpDamping:
    if not t_p > 0:
        raise ValueError("t_p must be > 0")
    if not 1.0 + g.h > 0:
        raise ValueError("1 + h must be > 0")
    disc = 4.0 * g.h_i * t_p - (1.0 + g.h) ** 2
    a = 0.5 * (1.0 + g.h) / t_p
    b = 0.5 * math.sqrt(disc) / t_p if disc > 0 else 0.0
    return SpDamping(a=a, b=b, discriminant=disc)


def _underdamped(g: ControllerGains, t_p: float) -> SpDamping:
    d = sp_damping(g, t_p)
    if not d.underdamped or d.b < MIN_B:
        raise OverdampedError(
            f"h={g.h}, h_i={g.h_i}, t_p={t_p} is not underdamped (b={d.b:g})")
    return d


def sp_response(g: ControllerGains, t_p: float, t):
    """``(y, v)`` at ``t``; ``v = y + t_p y'`` following the same time origin as ``y``."""
    d = _underdamped(g, t_p)
    a, b = d.a, d.b
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    s = np.maximum(t - 1.0, 0.0)
    e = np.exp(-a * s)
    c = np.cos(b * s)
    sn = np.sin(b * s)
    y = e * (c + (a / b) * sn)
    v = e * (c - ((t_p * (a * a + b * b) - a) / b) * sn)
    y = np.where(t <= 1.0, 1.0, y)
    v = np.where(t <= 1.0, 1.0, v)
    if y.ndim == 0:
        return float(y), float(v)
    return y, v


def sp_overshoots(g: ControllerGains, t_p: float) -> tuple[float, float]:
    d = _underdamped(g, t_p)
    a, b = d.a, d.b
    po_y = math.exp(-math.pi * a / b)
    # First positive root of tan(phi) = b t_p / (a t_p - 1), taken in (0, pi).
    phi = math.atan2(b * t_p, a * t_p - 1.0)
    po_v = math.exp(-phi * a / b) * math.sqrt(1.0 - 2.0 * a * t_p + t_p**2 * (a * a + b * b))
    return po_y, po_v


def _ise_a(t: float, a: float, b: float) -> float:
    s = t - 1.0
    k = a * a + b * b
    return (math.exp(-2.0 * a * s) / (4.0 * a * b * b * k)
            * (-(k * k) + a * a * (a * a - 3.0 * b * b) * math.cos(2.0 * b * s)
               + a * b * (b * b - 3.0 * a * a) * math.sin(2.0 * b * s)))


def sp_ise(g: ControllerGains, t_p: float, t_s: float = 7.0) -> float:
    if not t_s > 1:
        raise ValueError("t_s must exceed the delay")
    d = _underdamped(g, t_p)
    return 1.0 + _ise_a(t_s, d.a, d.b) - _ise_a(1.0, d.a, d.b)
