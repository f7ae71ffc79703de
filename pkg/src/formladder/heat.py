"""Heat-kernel demonstrations on the line and the circle.

Normalization (fixed package-wide): the kernel solves d(rho)/dt = -(1/2) lap rho
with lap the nonnegative Laplacian, so on the line

    rho(t, x, 0) = (2 pi t)^{-1/2} exp(-x^2 / (2 t))       (variance t).

The scaled log-kernel h_t = t log rho then satisfies, for every t > 0,

    h_t + (1/2) |grad h_t|^2 = t (d h_t/dt + (1/2) lap h_t),

and h_t(x) -> -(1/2) d(x0, x)^2 as t -> 0 (the short-time distance asymptotic).
On the line the convergence defect is exactly -(t/2) log(2 pi t). On a circle
the second space-derivative of log rho is not constant, which is what blocks a
constant-gap ladder there.

Everything is computed from log-space closed forms (softmax-weighted image
sums on the circle), so small times do not underflow and residuals are limited
only by float64 rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class HeatSample:
    kind: str
    t: float
    x: float
    varadhan_residual: float
    identity_residual: float


def _line_log_kernel(t: float, x: float):
    """(log rho, rho_t/rho, rho_x/rho, rho_xx/rho) for the line kernel."""
    log_rho = -x * x / (2.0 * t) - 0.5 * math.log(2.0 * math.pi * t)
    rt = x * x / (2.0 * t * t) - 1.0 / (2.0 * t)
    rx = -x / t
    rxx = (x * x - t) / (t * t)
    return log_rho, rt, rx, rxx


def _circle_log_kernel(t: float, x: float, circumference: float, images: int = 16):
    """Image sum over line kernels, assembled in log space."""
    ys = np.array([x + m * circumference for m in range(-images, images + 1)])
    logs = -(ys**2) / (2.0 * t) - 0.5 * math.log(2.0 * math.pi * t)
    peak = logs.max()
    weights = np.exp(logs - peak)
    total = weights.sum()
    w = weights / total
    log_rho = peak + math.log(total)
    rt = float((w * (ys**2 / (2.0 * t * t) - 1.0 / (2.0 * t))).sum())
    rx = float((w * (-ys / t)).sum())
    rxx = float((w * ((ys**2 - t) / (t * t))).sum())
    return log_rho, rt, rx, rxx


def _log_kernel(kind: str, t: float, x: float, circumference: float):
    if kind == "line":
        return _line_log_kernel(t, x)
    if kind == "circle":
        return _circle_log_kernel(t, x, circumference)
    raise ValueError(f"unknown heat kind {kind!r}")


def _distance(kind: str, x: float, circumference: float) -> float:
    if kind == "line":
        return abs(x)
    y = abs(x) % circumference
    return min(y, circumference - y)


def heat_residuals(kind: str, ts: Sequence[float], xs: Sequence[float],
                   circumference: float = 2.0 * math.pi) -> list[HeatSample]:
    """Per-(t, x) residuals of the distance asymptotic and the log-kernel identity."""
    out = []
    for t in ts:
        for x in xs:
            log_rho, rt, rx, rxx = _log_kernel(kind, t, x, circumference)
            h = t * log_rho
            dh_dt = log_rho + t * rt
            dh_dx = t * rx
            lap_h = -t * (rxx - rx * rx)
            identity = h + 0.5 * dh_dx**2 - t * (dh_dt + 0.5 * lap_h)
            varadhan = h + 0.5 * _distance(kind, x, circumference) ** 2
            out.append(HeatSample(kind, float(t), float(x), varadhan, identity))
    return out


def line_varadhan_defect(t: float) -> float:
    """Closed form of the line residual: -(t/2) log(2 pi t), independent of x."""
    return -(t / 2.0) * math.log(2.0 * math.pi * t)


def circle_log_curvature_spread(t: float, circumference: float = 2.0 * math.pi,
                                samples: int = 64) -> float:
    """max - min of (log rho)'' over the circle; nonzero spread means the
    second log-derivative is not constant (no constant-gap ladder)."""
    vals = []
    for i in range(samples):
        x = circumference * i / samples
        _, _, rx, rxx = _circle_log_kernel(t, x, circumference)
        vals.append(rxx - rx * rx)
    return float(max(vals) - min(vals))
