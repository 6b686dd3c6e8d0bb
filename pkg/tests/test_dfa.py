import numpy as np
import pytest
from pydantic import ValidationError

from visnet.dfa import (
    DfaConfig,
    DfaDirection,
    Persistence,
    classify_persistence,
    estimate_hurst,
    fluctuation,
    profile,
)
from visnet.exceptions import DfaError
from visnet.series import SyntheticSpec, TimeSeries, generate


def series_of(values) -> TimeSeries:
    return TimeSeries(values=np.asarray(values, dtype=float))


def direct_fluctuation(x: np.ndarray, s: int) -> float:
    """Straightforward per-segment polyfit reimplementation."""
    y = np.cumsum(x - x.mean())
    n = len(y) // s
    residuals = []
    for k in range(n):
        seg = y[k * s : (k + 1) * s]
        u = np.arange(s)
        coeffs = np.polyfit(u, seg, 1)
        residuals.append(seg - np.polyval(coeffs, u))
    return float(np.sqrt(np.mean(np.concatenate(residuals) ** 2)))


def test_profile_small_cases():
    np.testing.assert_allclose(profile(series_of([1, 2, 3])), [-1.0, -1.0, 0.0])
    assert (profile(series_of(np.full(10, 7.0))) == 0).all()


def test_profile_ends_near_zero(rng):
    x = rng.standard_normal(5000) * 50 + 3
    assert abs(profile(series_of(x))[-1]) <= 1e-9 * x.size * np.abs(x).max()


def test_fluctuation_matches_direct_computation(rng):
    x = rng.standard_normal(1000)
    for s in (4, 10, 37, 250):
        assert fluctuation(series_of(x), s) == pytest.approx(direct_fluctuation(x, s), rel=1e-9)


def test_constant_series_has_zero_fluctuation():
    assert fluctuation(series_of(np.full(100, 3.0)), 10) == 0.0


def test_fluctuation_scale_equivariance(rng):
    x = rng.standard_normal(2000)
    base = fluctuation(series_of(x), 20)
    assert fluctuation(series_of(-3.0 * x + 11.0), 20) == pytest.approx(3.0 * base, rel=1e-9)


def test_both_ends_averages_the_two_cuts(rng):
    x = rng.standard_normal(1003)
    forward = fluctuation(series_of(x), 10)
    backward = direct_fluctuation(x[3:], 10)
    both = fluctuation(series_of(x), 10, DfaDirection.BOTH_ENDS)
    assert both == pytest.approx(np.sqrt(0.5 * (forward**2 + backward**2)), rel=1e-9)


def test_scale_out_of_range():
    x = series_of(np.arange(100.0))
    with pytest.raises(DfaError):
        fluctuation(x, 3)
    with pytest.raises(DfaError):
        fluctuation(x, 26)


def test_default_scale_grid():
    scales = DfaConfig().scales(8192)
    assert scales[0] == 10 and scales[-1] == 2048
    assert (np.diff(scales) > 0).all()
    assert scales.size <= 50


def test_config_validation():
    with pytest.raises(ValidationError):
        DfaConfig(min_scale=3)
    with pytest.raises(ValidationError):
        DfaConfig(min_scale=20, max_scale=10)
    with pytest.raises(ValidationError):
        DfaConfig(scale_count=5)
    with pytest.raises(DfaError, match="exceeds"):
        DfaConfig(max_scale=500).scales(1000)


def test_constant_series_is_degenerate():
    with pytest.raises(DfaError, match="F\\(10\\) = 0"):
        estimate_hurst(series_of(np.zeros(1000)))


def test_hurst_invariant_under_affine_maps(rng):
    x = rng.standard_normal(4096)
    h = estimate_hurst(series_of(x)).hurst
    assert estimate_hurst(series_of(2.5 * x - 40.0)).hurst == pytest.approx(h, abs=1e-9)


def test_result_structure():
    result = estimate_hurst(generate(SyntheticSpec(kind="white_noise", length=4096, seed=2)), workers=4)
    scales = [s for s, _ in result.points]
    assert scales == sorted(scales)
    assert all(f > 0 for _, f in result.points)
    assert result.hurst == result.fit.slope
    summary = result.summary()
    assert set(summary) >= {"hurst", "slope_se", "r", "scales_used"}
    assert summary["scales_used"] == len(result.points)


@pytest.mark.parametrize("hurst", [0.3, 0.5, 0.8])
def test_hurst_recovered_from_fgn(hurst):
    estimates = [
        estimate_hurst(generate(SyntheticSpec(kind="fgn", length=8192, hurst=hurst, seed=seed))).hurst
        for seed in range(10)
    ]
    assert np.mean(estimates) == pytest.approx(hurst, abs=0.05)


def test_fit_quality_on_long_fgn():
    result = estimate_hurst(generate(SyntheticSpec(kind="fgn", length=4096, hurst=0.7, seed=5)))
    assert abs(result.fit.pearson_r) > 0.95


def test_persistence_classes():
    assert classify_persistence(0.3) is Persistence.ANTI_PERSISTENT
    assert classify_persistence(0.5) is Persistence.UNCORRELATED
    assert classify_persistence(0.75) is Persistence.PERSISTENT
    assert classify_persistence(0.52, tolerance=0.05) is Persistence.UNCORRELATED
