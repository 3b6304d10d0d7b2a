"""Stability region and phase margin of the loop ``(h_i + s h) e^{-s} / (s (1 + s t_p))``.

The ultimate gain, the supremum of stable integral gains for a given
proportional gain, and phase margin level curves all come from small
transcendental equations in the normalized frequency ``z``.  Roots are
bracketed by a fixed-step scan and polished by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import ControllerGains

SCAN_STEP = 0.01
SCAN_START = 1e-6
ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class StabilityBounds:
    z_a: float
    h_u: float
    z1: float
    z2: float
    h_i_max: float
    h_i_min: float = 0.0


@dataclass(frozen=True)
class MarginResult:
    z_b: float
    PM: float

    @property
    def PM_deg(self) -> float:
        return math.degrees(self.PM)


def bisect(f: Callable[[float], float], a: float, b: float,
           xtol: float = ROOT_XTOL, maxiter: int = 200) -> float:
    """Plain bisection on a sign-changing bracket."""
    fa = f(a)
    fb = f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError(f"no sign change on [{a}, {b}]")
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if b - a <= xtol or m == a or m == b:
            break
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def scan_roots(f: Callable[[float], float], count: int, start: float = SCAN_START,
               step: float = SCAN_STEP, stop: float = 1e3,
               knots: tuple[float, ...] = ()) -> list[float]:
    """First ``count`` sign changes of ``f`` on ``[start, stop]``.

    ``knots`` are extra scan points (e.g. known extrema) so that two roots
    closer than ``step`` are still separated.
    """
    grid = []
    z = start
    extra = sorted(k for k in knots if start < k < stop)
    while z < stop:
        while extra and extra[0] <= z:
            k = extra.pop(0)
            if not grid or k > grid[-1]:
                grid.append(k)
        if not grid or z > grid[-1]:
            grid.append(z)
        z += step
    roots = []
    fa = f(grid[0])
    for a, b in zip(grid, grid[1:]):
        fb = f(b)
        if fa == 0:
            roots.append(a)
        elif (fa > 0) != (fb > 0) and fb != 0:
            roots.append(bisect(f, a, b))
        if len(roots) >= count:
            return roots
        fa = fb
    raise ValueError(f"found only {len(roots)} of {count} roots below z = {stop}")


def ultimate_gain(t_p: float) -> tuple[float, float]:
    """``(z_a, h_u)``: first crossover root and the ultimate proportional gain."""
    if t_p < 0:
        raise ValueError("t_p must be >= 0")
    if t_p == 0:
        return math.pi, 1.0
    # tan z = -t_p z / (1 + t_p), written without poles.
    f = lambda z: (1.0 + t_p) * math.sin(z) + t_p * z * math.cos(z)
    z_a = bisect(f, math.pi / 2, math.pi)
    h_u = -math.cos(z_a) + t_p * z_a * math.sin(z_a)
    return z_a, h_u


def proportional_limit(t_p: float) -> tuple[float, float]:
    """``(z_p, h_p)``: supremum of ``h`` for which some ``h_i > 0`` stabilizes.

    Here ``z_p`` solves ``tan z = -t_p z`` on ``(pi/2, pi]``, the crossover of
    the proportional-only loop; ``h_i_max(h)`` reaches zero at ``h_p``.  It
    never exceeds ``ultimate_gain(t_p)[1]``, the extremum of the root equation.
    """
    if t_p < 0:
        raise ValueError("t_p must be >= 0")
    if t_p == 0:
        return math.pi, 1.0
    z = bisect(lambda z: math.sin(z) + t_p * z * math.cos(z), math.pi / 2, math.pi)
    return z, -math.cos(z) + t_p * z * math.sin(z)


def _delta_r_boundary(z: float, t_p: float) -> float:
    return z * math.sin(z) + t_p * z * z * math.cos(z)


def hi_stability_bounds(h: float, t_p: float) -> StabilityBounds:
    """Stable integral gains for proportional gain ``h`` are ``(h_i_min, h_i_max)``.

    ``z1 < z_a < z2`` are the first two roots of ``h + cos z - t_p z sin z``;
    the upper bound comes from ``z1``, the lower one from ``z2`` (it is never
    positive in the admitted range, so ``h_i_min`` is 0).  ``h`` must be below
    :func:`proportional_limit`, past which ``h_i_max`` would be negative.
    """
    if h < 0:
        raise ValueError("h must be >= 0")
    z_a, h_u = ultimate_gain(t_p)
    _, h_p = proportional_limit(t_p)
    if h >= h_p:
        raise ValueError(f"h = {h} >= {h_p}: no stabilizing h_i exists")
    if t_p == 0:
        # h + cos z = 0
        z1 = math.acos(-h)
        z2 = 2 * math.pi - z1
    else:
        g = lambda z: h + math.cos(z) - t_p * z * math.sin(z)
        z1, z2 = scan_roots(g, 2, knots=(z_a,))
    upper = _delta_r_boundary(z1, t_p)
    lower = _delta_r_boundary(z2, t_p)
    if lower > 0:
        raise ArithmeticError(
            f"second-root bound {lower} > 0 at h={h}, t_p={t_p}")
    return StabilityBounds(z_a=z_a, h_u=h_u, z1=z1, z2=z2, h_i_max=upper,
                           h_i_min=max(0.0, lower))


def crossover_frequency(h: float, h_i: float, t_p: float) -> float:
    """Positive root of ``h^2 + h_i^2 / z^2 = 1 + t_p^2 z^2``."""
    c = 1.0 - h * h
    if t_p == 0:
        if c <= 0:
            raise ValueError("no gain crossover: |h| >= 1 with t_p = 0")
        return h_i / math.sqrt(c)
    disc = math.hypot(c, 2.0 * t_p * h_i)
    # w = z^2 solves t_p^2 w^2 + c w - h_i^2 = 0; pick the cancellation-free form.
    if c >= 0:
        w = 2.0 * h_i * h_i / (c + disc)
    else:
        w = (disc - c) / (2.0 * t_p * t_p)
    return math.sqrt(w)


def phase_margin(g: ControllerGains, t_p: float) -> MarginResult:
    """Phase margin in radians, in ``(-pi, pi]``, from the open-loop phase at crossover."""
    h, h_i = g.h, g.h_i
    if h_i <= 0:
        raise ValueError("h_i must be > 0")
    if h < 0 or t_p < 0:
        raise ValueError("h and t_p must be >= 0")
    z = crossover_frequency(h, h_i, t_p)
    pm = math.pi / 2 + math.atan2(z * (h - h_i * t_p), h_i + z * z * h * t_p) - z
    pm = math.remainder(pm, 2 * math.pi)
    if pm == -math.pi:
        pm = math.pi
    return MarginResult(z_b=z, PM=pm)


def sp_is_stable(h: float) -> bool:
    """Matched Smith predictor: stable iff ``1 + h > 0``."""
    return 1.0 + h > 0
