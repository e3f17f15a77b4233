"""Least-squares rate fits used to check decay laws."""
from __future__ import annotations

import numpy as np


def loglog_slope(x, y):
    """Slope of ``log|y|`` against ``log x`` (x > 0)."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = (x > 0) & (y > 0)
    if keep.sum() < 3:
        raise ValueError("need at least three positive samples for a log-log fit")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def exponential_rate(x, y):
    """Slope of ``log|y|`` against ``x``; negative for decay."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = y > 0
    if keep.sum() < 3:
        raise ValueError("need at least three positive samples for an exponential fit")
    slope, _ = np.polyfit(x[keep], np.log(y[keep]), 1)
    return float(slope)


def relative_variation(a):
    a = np.asarray(a, dtype=float)
    m = np.mean(a)
    return float((a.max() - a.min()) / abs(m)) if m != 0 else float("inf")
