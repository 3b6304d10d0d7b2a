"""Sampled performance indices: 701-point overshoots and trapezoid ISE."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

#: Sample spacing the published indices use, in delays.
CONFORMING_DT = 0.01


@dataclass(frozen=True, eq=False)
class SampledTrace:
    dt: float
    y: np.ndarray
    v: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.isfinite(y)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "y", y)
        if self.v is not None:
            v = np.asarray(self.v, dtype=float)
            if v.shape != y.shape or not np.all(np.isfinite(v)):
                raise ValueError("v must be finite and match y")
            object.__setattr__(self, "v", v)

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.y.size) * self.dt

    @property
    def t_s(self) -> float:
        return (self.y.size - 1) * self.dt


def sample(y_fn: Callable, t_s: float = 7.0, n_points: int = 701,
           v_fn: Callable | None = None) -> SampledTrace:
    """Evaluate ``y_fn`` (and ``v_fn``) at ``n_points`` equally spaced times on ``[0, t_s]``."""
    t = np.linspace(0.0, t_s, n_points)
    y = np.broadcast_to(np.asarray(y_fn(t), dtype=float), t.shape)
    v = None if v_fn is None else np.broadcast_to(np.asarray(v_fn(t), dtype=float), t.shape)
    return SampledTrace(dt=t_s / (n_points - 1), y=y, v=v)


def overshoots(trace: SampledTrace) -> tuple[float, float | None]:
    """``(PO_y, PO_v)``: magnitude of the most negative sample, 0 if none is negative."""
    po_y = max(0.0, -float(trace.y.min()))
    po_v = None if trace.v is None else max(0.0, -float(trace.v.min()))
    return po_y, po_v


def ise_trapezoid(trace: SampledTrace) -> float:
    if abs(trace.dt - CONFORMING_DT) > 1e-12:
        warnings.warn(f"ISE sampled at dt={trace.dt:g}, not {CONFORMING_DT}",
                      stacklevel=2)
    y2 = trace.y**2
    return float(trace.dt * (y2.sum() - 0.5 * (y2[0] + y2[-1])))
