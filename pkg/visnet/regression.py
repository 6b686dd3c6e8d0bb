"""
Ordinary least squares and correlation
Shared by every log-log and semi-log fit in the analysis.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from .exceptions import RegressionError

SLOPE_TEST = "two-sided Student t test of slope = 0 with n-2 degrees of freedom"


class LinearFit(BaseModel):
    """Simple linear regression y = intercept + slope * x"""

    model_config = ConfigDict(frozen=True)

    intercept: float
    slope: float
    pearson_r: float | None
    r_squared: float | None
    adjusted_r_squared: float | None
    slope_stderr: float
    slope_p_value: float
    n: int
    test: str = SLOPE_TEST

    def predict(self, x: np.ndarray | float) -> np.ndarray | float:
        return self.intercept + self.slope * np.asarray(x, dtype=np.float64)


def _pair(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray, minimum: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(x, dtype=np.float64).ravel()
    ys = np.asarray(y, dtype=np.float64).ravel()
    if xs.size != ys.size:
        raise RegressionError(f"length mismatch: {xs.size} x values, {ys.size} y values")
    if xs.size < minimum:
        raise RegressionError(f"need at least {minimum} points, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise RegressionError("non-finite value in regression input")
    return xs, ys


def pearson(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float | None:
    """Product-moment correlation; None when either input is constant."""
    xs, ys = _pair(x, y, 2)
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def ols(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> LinearFit:
    """
    Closed-form simple OLS with the slope's two-sided t-test.

    Raises:
        RegressionError: fewer than 3 points, length mismatch, constant x
    """
    xs, ys = _pair(x, y, 3)
    n = xs.size
    mx, my = xs.mean(), ys.mean()
    dx = xs - mx
    dy = ys - my
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise RegressionError("x is constant; slope undefined")
    syy = float(dy @ dy)
    sxy = float(dx @ dy)

    slope = sxy / sxx
    intercept = float(my - slope * mx)
    residuals = ys - (intercept + slope * xs)
    dof = n - 2
    stderr = math.sqrt(float(residuals @ residuals) / dof / sxx)

    if syy == 0.0:
        r = r2 = adjusted = None
        p_value = 1.0
    else:
        r = min(1.0, max(-1.0, sxy / math.sqrt(sxx * syy)))
        r2 = r * r
        adjusted = 1.0 - (1.0 - r2) * (n - 1) / dof
        if stderr == 0.0:
            p_value = 0.0
        else:
            p_value = float(2.0 * stats.t.sf(abs(slope / stderr), dof))
            p_value = min(1.0, max(0.0, p_value))

    return LinearFit(
        intercept=intercept,
        slope=float(slope),
        pearson_r=r,
        r_squared=r2,
        adjusted_r_squared=adjusted,
        slope_stderr=stderr,
        slope_p_value=p_value,
        n=n,
    )
