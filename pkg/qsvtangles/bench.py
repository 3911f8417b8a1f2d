#!/usr/bin/env python3
# tab-width:4

"""
Wall-time of angle estimation as a function of kappa0.
"""

from __future__ import annotations

import time
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from scipy.stats import linregress

from .angle_estimator import EstimateRequest
from .angle_estimator import estimate_angles
from .meta_fit import MetaParams
from .validation import ValidationError

__all__ = [
    "BenchRow",
    "time_estimates",
    "linear_r_squared",
]


class BenchRow(NamedTuple):
    kappa0: float
    n_a: int
    seconds: float


def time_estimates(
    meta: MetaParams,
    kappas: Sequence[float],
    *,
    repeats: int = 1,
) -> list[BenchRow]:
    """Best-of-`repeats` wall time of estimate_angles for each kappa0, in input order."""
    if repeats < 1:
        raise ValidationError(f"time_estimates() repeats must be >= 1, got {repeats!r}")
    rows = []
    for kappa0 in kappas:
        request = EstimateRequest(kappa0=float(kappa0), meta=meta)
        best = float("inf")
        n_a = 0
        for _ in range(repeats):
            start = time.perf_counter()
            angles = estimate_angles(request)
            best = min(best, time.perf_counter() - start)
            n_a = angles.n_a
        rows.append(BenchRow(kappa0=float(kappa0), n_a=n_a, seconds=best))
    return rows


def linear_r_squared(
    x: Sequence[float],
    y: Sequence[float],
) -> float:
    """Coefficient of determination of the least-squares line y = a + b x."""
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.size < 3 or xs.shape != ys.shape:
        raise ValidationError("linear_r_squared() needs at least 3 matching (x, y) pairs")
    fit = linregress(xs, ys)
    return float(fit.rvalue**2)
