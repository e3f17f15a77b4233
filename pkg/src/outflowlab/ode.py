"""Classical fixed-step fourth-order Runge-Kutta, sampled on an output grid."""
from __future__ import annotations

import math

import numpy as np


def rk4_step(f, x, y, h):
    k1 = f(x, y)
    k2 = f(x + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(x + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(x + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_grid(f, xs, y0, substeps=1, check=None):
    """Integrate ``y' = f(x, y)`` through the nodes ``xs`` (monotone, either direction).

    ``substeps`` equal RK4 steps are taken between consecutive nodes.  ``check``
    is called on every accepted state and may raise to abort the march.
    Returns an array of shape ``(len(xs),) + shape(y0)``.
    """
    xs = np.asarray(xs, dtype=float)
    y = np.array(y0, dtype=float)
    out = np.empty((len(xs),) + y.shape)
    out[0] = y
    m = max(1, int(substeps))
    for i in range(1, len(xs)):
        x0, x1 = xs[i - 1], xs[i]
        h = (x1 - x0) / m
        for j in range(m):
            y = rk4_step(f, x0 + j * h, y, h)
        if check is not None:
            check(x1, y)
        out[i] = y
    return out


def rk4_scalar_grid(f, xs, y0, substeps=1):
    """Scalar specialisation of :func:`rk4_grid` using plain floats (faster)."""
    out = np.empty(len(xs))
    y = float(y0)
    out[0] = y
    m = max(1, int(substeps))
    for i in range(1, len(xs)):
        x0 = float(xs[i - 1])
        h = (float(xs[i]) - x0) / m
        for j in range(m):
            x = x0 + j * h
            k1 = f(x, y)
            k2 = f(x + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(x + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(x + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(y):
            raise FloatingPointError(f"non-finite value at x={xs[i]}")
        out[i] = y
    return out


def riccati_closed_form(a, y0, x):
    """Solution of ``y' = -a y^2``, ``y(0) = y0``."""
    return y0 / (1.0 + a * y0 * np.asarray(x))
