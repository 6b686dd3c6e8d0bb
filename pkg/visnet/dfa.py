"""
Detrended fluctuation analysis
Hurst exponent from the scaling of the detrended profile's RMS fluctuation.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import partial

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings
from .exceptions import DfaError, RegressionError
from .logger import get_logger
from .regression import LinearFit, ols
from .series import TimeSeries
from .utils.parallel import ordered_map

logger = get_logger(__name__)


class DfaDirection(str, Enum):
    FORWARD_ONLY = "forward_only"
    BOTH_ENDS = "both_ends"


class Persistence(str, Enum):
    ANTI_PERSISTENT = "anti-persistent"
    UNCORRELATED = "uncorrelated"
    PERSISTENT = "persistent"


class DfaConfig(BaseModel):
    """
    Scale grid and segmentation policy.

    `max_scale=None` resolves to N // 4 for the series being analysed.
    """

    model_config = ConfigDict(frozen=True)

    min_scale: int = Field(default_factory=lambda: settings.dfa_min_scale, ge=4)
    max_scale: int | None = Field(default=None, ge=5)
    scale_count: int = Field(default_factory=lambda: settings.dfa_scale_count, ge=10)
    detrend_order: int = Field(default=1, ge=1, le=1)
    direction: DfaDirection = DfaDirection.FORWARD_ONLY

    @model_validator(mode="after")
    def _check_range(self) -> "DfaConfig":
        if self.max_scale is not None and self.min_scale >= self.max_scale:
            raise ValueError(f"min_scale {self.min_scale} must be below max_scale {self.max_scale}")
        return self

    def scales(self, length: int) -> np.ndarray:
        """Unique log-spaced integer scales on [min_scale, max_scale] for a series of `length`."""
        ceiling = length // 4
        top = ceiling if self.max_scale is None else self.max_scale
        if top > ceiling:
            raise DfaError(f"max_scale {top} exceeds length/4 = {ceiling} for a series of {length} points")
        if self.min_scale >= top:
            raise DfaError(
                f"series of {length} points too short for min_scale {self.min_scale} (largest scale {top})"
            )
        grid = np.logspace(math.log10(self.min_scale), math.log10(top), self.scale_count)
        return np.unique(np.rint(grid).astype(np.int64))


class DfaResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    points: list[tuple[int, float]]
    hurst: float
    fit: LinearFit
    direction: DfaDirection = DfaDirection.FORWARD_ONLY

    @field_validator("points")
    @classmethod
    def _sorted_non_negative(cls, points: list[tuple[int, float]]) -> list[tuple[int, float]]:
        scales = [s for s, _ in points]
        if scales != sorted(set(scales)):
            raise ValueError("scales must be unique and ascending")
        if any(f < 0 for _, f in points):
            raise ValueError("fluctuations must be non-negative")
        return points

    @property
    def persistence(self) -> Persistence:
        return classify_persistence(self.hurst)

    @property
    def slope_stderr(self) -> float:
        return self.fit.slope_stderr

    @property
    def scales(self) -> list[int]:
        return [s for s, _ in self.points]

    @property
    def fluctuations(self) -> list[float]:
        return [f for _, f in self.points]

    def summary(self) -> dict:
        return {
            "hurst": self.hurst,
            "slope_se": self.fit.slope_stderr,
            "r": self.fit.pearson_r,
            "scales_used": len(self.points),
            "persistence": self.persistence.value,
            "direction": self.direction.value,
        }


def classify_persistence(hurst: float, tolerance: float = 0.0) -> Persistence:
    if abs(hurst - 0.5) <= tolerance:
        return Persistence.UNCORRELATED
    return Persistence.PERSISTENT if hurst > 0.5 else Persistence.ANTI_PERSISTENT


def profile(series: TimeSeries) -> np.ndarray:
    """Cumulative sum of deviations from the mean."""
    x = series.values
    return np.cumsum(x - x.mean())


def _segment_mean_square(segments: np.ndarray) -> float:
    # closed-form least-squares line per row
    s = segments.shape[1]
    t = np.arange(s, dtype=np.float64)
    t -= t.mean()
    centred = segments - segments.mean(axis=1, keepdims=True)
    slopes = (centred @ t) / (t @ t)
    residuals = centred - slopes[:, None] * t[None, :]
    return float(np.mean(residuals * residuals))


def fluctuation(
    series: TimeSeries,
    s: int,
    direction: DfaDirection = DfaDirection.FORWARD_ONLY,
    walk: np.ndarray | None = None,
) -> float:
    """
    F(s): RMS residual of per-segment linear fits to the profile.

    The profile is cut into N // s segments from the start; trailing
    remainder points are dropped. With `both_ends` the cut is repeated from
    the end and the two mean squares are averaged.

    Raises:
        DfaError: s outside [4, N/4]
    """
    n_points = len(series)
    s = int(s)
    if s < 4 or s > n_points // 4:
        raise DfaError(f"scale {s} outside [4, {n_points // 4}] for a series of {n_points} points")
    y = profile(series) if walk is None else walk
    count = n_points // s
    used = count * s

    mean_square = _segment_mean_square(y[:used].reshape(count, s))
    if DfaDirection(direction) is DfaDirection.BOTH_ENDS:
        tail = _segment_mean_square(y[n_points - used :].reshape(count, s))
        mean_square = 0.5 * (mean_square + tail)
    return math.sqrt(mean_square)


def estimate_hurst(
    series: TimeSeries,
    config: DfaConfig | None = None,
    workers: int | None = 1,
) -> DfaResult:
    """
    Fit log10 F(s) against log10 s; the slope is H.

    Raises:
        DfaError: the scale grid does not fit the series, or F(s) = 0 at some
            scale (constant or perfectly linear input)
    """
    config = config or DfaConfig()
    scales = config.scales(len(series))
    walk = profile(series)
    measure = partial(fluctuation, series, direction=config.direction, walk=walk)
    values = ordered_map(measure, scales.tolist(), workers=workers)

    for s, f in zip(scales.tolist(), values):
        logger.debug("%s: F(%d) = %.6g", series.label, s, f)
        if f == 0.0:
            raise DfaError(
                f"'{series.label}': F({s}) = 0, the series is constant or perfectly linear"
            )

    try:
        fit = ols(np.log10(scales), np.log10(values))
    except RegressionError as e:
        raise DfaError(f"'{series.label}': cannot fit the scaling law: {e.message}") from e

    logger.info("%s: H = %.4f over %d scales", series.label, fit.slope, scales.size)
    return DfaResult(
        points=list(zip(scales.tolist(), values)),
        hurst=fit.slope,
        fit=fit,
        direction=config.direction,
    )
