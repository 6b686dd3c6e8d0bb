import math

import numpy as np
import pytest
from scipy import integrate, special

from visnet import tailfit
from visnet.config import settings
from visnet.exceptions import TailFitError
from visnet.series import SyntheticSpec, TimeSeries, generate
from visnet.tailfit import (
    DegreeTailFit,
    TailFamily,
    alpha_hurst_relation,
    bootstrap_pvalue,
    fit_powerlaw,
    fit_truncated_powerlaw,
    kmin_candidates,
    ks_distance,
    log_binned_pdf,
    log_likelihood,
    model_curve,
    nested_loglik_ratio,
    normalizer,
    sample_tail,
    with_bootstrap,
)
from visnet.visibility import build_vg


def model_fit(family: TailFamily, alpha: float, lam: float | None, k_min: int) -> DegreeTailFit:
    return DegreeTailFit(
        family=family,
        alpha=alpha,
        lambda_=lam,
        k_min=k_min,
        ks_distance=0.0,
        tail_size=10,
        tail_fraction=1.0,
        log_likelihood=0.0,
    )


def pareto_degrees(rng, alpha: float, k_min: int, size: int) -> np.ndarray:
    return sample_tail(model_fit(TailFamily.POWER_LAW, alpha, None, k_min), size, rng)


# -- normalisation -------------------------------------------------------------

@pytest.mark.parametrize("alpha", [1.5, 2.5, 3.5])
@pytest.mark.parametrize("lower", [0.5, 4.5, 19.5])
def test_normalizer_pure_power_law(alpha, lower):
    expected = lower ** (1 - alpha) / (alpha - 1)
    assert normalizer(alpha, 0.0, lower) == pytest.approx(expected, rel=1e-8)


def test_normalizer_against_incomplete_gamma():
    alpha, lam, lower = 0.5, 0.05, 4.5
    expected = lam ** (alpha - 1) * special.gamma(1 - alpha) * special.gammaincc(1 - alpha, lam * lower)
    assert normalizer(alpha, lam, lower) == pytest.approx(expected, rel=1e-8)


def test_normalizer_against_direct_quadrature():
    alpha, lam, lower = 2.5, 0.01, 4.5
    expected, _ = integrate.quad(lambda k: k**-alpha * math.exp(-lam * k), lower, np.inf, epsrel=1e-12)
    assert normalizer(alpha, lam, lower) == pytest.approx(expected, rel=1e-7)


def test_normalizer_rejects_non_positive_bound():
    with pytest.raises(TailFitError):
        normalizer(2.0, 0.1, 0.0)


@pytest.mark.parametrize(
    "family,alpha,lam",
    [(TailFamily.POWER_LAW, 2.2, None), (TailFamily.TRUNCATED, 1.4, 0.02), (TailFamily.TRUNCATED, 0.7, 0.1)],
)
def test_pdf_integrates_to_one(family, alpha, lam):
    fit = model_fit(family, alpha, lam, 3)
    total, _ = integrate.quad(fit.pdf, fit.lower_bound, np.inf, limit=200)
    assert total == pytest.approx(1.0, rel=1e-6)


def test_truncated_cdf_matches_density():
    fit = model_fit(TailFamily.TRUNCATED, 1.6, 0.03, 4)
    ks = np.array([4, 7, 20, 55, 200])
    expected = [integrate.quad(fit.pdf, fit.lower_bound, k + 0.5)[0] for k in ks]
    np.testing.assert_allclose(fit.cdf(ks), expected, rtol=1e-7)
    assert (np.diff(fit.cdf(np.arange(4, 400))) >= 0).all()


def test_truncated_at_zero_lambda_is_the_power_law(rng):
    tail = pareto_degrees(rng, 2.3, 6, 500).astype(float)
    pl = model_fit(TailFamily.POWER_LAW, 2.3, None, 6)
    tpl = model_fit(TailFamily.TRUNCATED, 2.3, 0.0, 6)
    np.testing.assert_array_equal(pl.cdf(tail), tpl.cdf(tail))
    assert log_likelihood(tail, 2.3, 0.0, 5.5) == pytest.approx(float(np.log(pl.pdf(tail)).sum()), rel=1e-10)


def test_log_likelihood_matches_density(rng):
    tail = rng.integers(5, 300, 400).astype(float)
    fit = model_fit(TailFamily.TRUNCATED, 1.2, 0.01, 5)
    assert log_likelihood(tail, 1.2, 0.01, 4.5) == pytest.approx(float(np.log(fit.pdf(tail)).sum()), rel=1e-9)
    assert log_likelihood(tail, 0.9, 0.0, 4.5) == -math.inf


# -- log binning ----------------------------------------------------------------

def test_log_binned_density_is_normalised(rng):
    degrees = pareto_degrees(rng, 2.5, 1, 3000)
    binned = log_binned_pdf(degrees)
    assert np.sum(binned.density * binned.widths) == pytest.approx(1.0)
    assert binned.counts.sum() == binned.total == 3000
    assert binned.edges[0] == degrees.min()
    assert binned.edges[-1] == pytest.approx(degrees.max())
    ratios = binned.edges[1:] / binned.edges[:-1]
    assert ratios.max() <= 10 ** 0.1 + 1e-9


def test_log_binned_single_value():
    binned = log_binned_pdf([5] * 20)
    assert binned.edges.tolist() == pytest.approx([5.0, 5.0 * 10**0.1])
    assert binned.density.tolist() == pytest.approx([1.0 / binned.widths[0]])


def test_log_binned_extremes():
    binned = log_binned_pdf([1] * 10 + [1000] * 10)
    assert binned.counts.tolist() == [10, 10]
    assert binned.lower[0] == 1.0
    assert binned.upper[-1] == pytest.approx(1000.0)


def test_log_binned_rejects_zeros_and_short_input():
    with pytest.raises(TailFitError, match="3 degrees are 0"):
        log_binned_pdf([0, 0, 0] + list(range(1, 20)))
    with pytest.raises(TailFitError, match="at least 10"):
        log_binned_pdf([1, 2, 3])


# -- maximum-likelihood fits ----------------------------------------------------

def test_power_law_recovery_at_fixed_kmin(rng):
    degrees = pareto_degrees(rng, 2.5, 10, 5000)
    fit = fit_powerlaw(degrees, k_min=10)
    assert fit.alpha == pytest.approx(2.5, abs=0.1)
    assert fit.tail_size == 5000
    assert fit.tail_fraction == 1.0
    assert not fit.k_min_auto
    assert 0.0 <= fit.ks_distance <= 1.0


def test_power_law_recovery_with_automatic_kmin(rng):
    body = rng.integers(1, 8, 2000)
    degrees = np.concatenate([body, pareto_degrees(rng, 2.5, 8, 3000)])
    fit = fit_powerlaw(degrees)
    assert fit.k_min_auto
    assert fit.k_min >= 2
    assert fit.alpha == pytest.approx(2.5, abs=0.2)


def test_truncated_recovery(rng):
    degrees = sample_tail(model_fit(TailFamily.TRUNCATED, 1.8, 0.01, 5), 5000, rng)
    assert degrees.min() >= 5
    fit = fit_truncated_powerlaw(degrees, k_min=5)
    assert fit.family is TailFamily.TRUNCATED
    assert fit.alpha == pytest.approx(1.8, abs=0.2)
    assert fit.lambda_ == pytest.approx(0.01, rel=0.5)
    assert not fit.reduces_to_power_law


def test_power_law_recovery_large_sample():
    degrees = pareto_degrees(np.random.default_rng(2024), 2.5, 10, 10_000)
    fit = fit_powerlaw(degrees, k_min=10)
    assert fit.alpha == pytest.approx(2.5, abs=0.05)
    assert fit.alpha_stderr == pytest.approx((fit.alpha - 1.0) / 100.0)
    assert nested_loglik_ratio(degrees, 10) >= 0.0


def test_truncated_recovery_large_sample():
    for seed in range(3):
        rng = np.random.default_rng(seed)
        degrees = sample_tail(model_fit(TailFamily.TRUNCATED, 1.3, 0.01, 5), 10_000, rng)
        fit = fit_truncated_powerlaw(degrees, k_min=5)
        assert fit.alpha == pytest.approx(1.3, abs=0.1)
        assert fit.lambda_ == pytest.approx(0.01, abs=0.003)
        assert fit.alpha_stderr is None
        assert nested_loglik_ratio(degrees, 5) >= 0.0


def test_power_law_estimate_is_consistent():
    hits = 0
    for seed in range(20):
        degrees = pareto_degrees(np.random.default_rng(seed), 2.5, 10, 2000)
        fit = fit_powerlaw(degrees, k_min=10)
        assert fit.tail_size == 2000
        hits += abs(fit.alpha - 2.5) <= 3.0 * 1.5 / math.sqrt(fit.tail_size)
    assert hits >= 18


def test_truncated_likelihood_dominates_power_law(rng):
    for _ in range(3):
        graph = build_vg(TimeSeries(values=rng.standard_normal(2000)))
        assert nested_loglik_ratio(graph.degrees, 4) >= 0.0


def test_tail_too_small():
    with pytest.raises(TailFitError, match="need at least 10"):
        fit_powerlaw(list(range(1, 30)), k_min=21)


def test_all_equal_tail():
    with pytest.raises(TailFitError, match="exponent undefined"):
        fit_powerlaw([7] * 20, k_min=7)
    with pytest.raises(TailFitError, match="no k_min candidate"):
        fit_powerlaw([7] * 20)


def test_non_integer_degrees_rejected():
    with pytest.raises(TailFitError, match="integers"):
        fit_powerlaw([1.5] * 20, k_min=1)


def test_kmin_candidates_are_capped():
    degrees = np.arange(1, 1001)
    values = kmin_candidates(degrees, cap=50, min_tail_fraction=0.2)
    assert values.size <= 50
    assert values[0] == 1 and values[-1] == 801
    assert (np.diff(values) > 0).all()
    assert kmin_candidates(degrees, cap=50, min_tail_fraction=0.0)[-1] == 991


def test_kmin_scan_keeps_a_fifth_of_the_sample(rng):
    degrees = np.concatenate([rng.integers(1, 6, 900), pareto_degrees(rng, 2.5, 6, 100)])
    fit = fit_powerlaw(degrees, min_tail_fraction=0.2)
    assert fit.tail_size >= 200
    assert fit.min_tail_fraction == 0.2
    assert fit.kmin_candidates == settings.kmin_candidates


def test_lambda_serializes_under_its_name():
    fit = model_fit(TailFamily.TRUNCATED, 1.5, 0.2, 3)
    dumped = fit.model_dump(by_alias=True)
    assert dumped["lambda"] == 0.2 and "lambda_" not in dumped
    assert DegreeTailFit.model_validate(dumped) == fit
    with pytest.raises(ValueError):
        model_fit(TailFamily.POWER_LAW, 2.0, 0.1, 3)


# -- goodness of fit -------------------------------------------------------------

def test_ks_distance_definition(rng):
    fit = model_fit(TailFamily.POWER_LAW, 2.2, None, 3)
    tail = pareto_degrees(rng, 2.0, 3, 400)
    values = np.unique(tail)
    empirical = np.searchsorted(np.sort(tail), values, side="right") / tail.size
    expected = np.max(np.abs(empirical - fit.cdf(values)))
    assert ks_distance(tail, fit) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(TailFitError, match="below k_min"):
        ks_distance([1, 5, 6], fit)


def test_sample_tail_respects_kmin(rng):
    for fit in (
        model_fit(TailFamily.POWER_LAW, 2.5, None, 4),
        model_fit(TailFamily.TRUNCATED, 1.5, 0.05, 4),
        model_fit(TailFamily.TRUNCATED, 0.8, 0.05, 4),
    ):
        draws = sample_tail(fit, 1000, rng)
        assert draws.size == 1000
        assert draws.min() >= 4
    assert sample_tail(fit, 0, rng).size == 0


def test_bootstrap_is_deterministic(rng):
    degrees = np.concatenate([rng.integers(1, 4, 100), pareto_degrees(rng, 2.5, 4, 200)])
    fit = fit_powerlaw(degrees, k_min=4)
    first = bootstrap_pvalue(degrees, fit, replicas=100, seed=7, workers=1)
    second = bootstrap_pvalue(degrees, fit, replicas=100, seed=7, workers=2)
    assert first == second
    assert 0.0 <= first <= 1.0
    carried = with_bootstrap(degrees, fit, replicas=100, seed=7, workers=1)
    assert (carried.p_value, carried.replicas, carried.seed) == (first, 100, 7)


def test_bootstrap_needs_enough_replicas(rng):
    degrees = pareto_degrees(rng, 2.5, 2, 200)
    fit = fit_powerlaw(degrees, k_min=2)
    with pytest.raises(TailFitError, match="at least 100"):
        bootstrap_pvalue(degrees, fit, replicas=99)


def test_bootstrap_reuses_the_scan_policy(rng, monkeypatch):
    degrees = np.concatenate([rng.integers(1, 4, 100), pareto_degrees(rng, 2.5, 4, 200)])
    fit = fit_powerlaw(degrees, candidates=5, min_tail_fraction=0.1)
    assert (fit.kmin_candidates, fit.min_tail_fraction) == (5, 0.1)

    seen = []
    real_fit_tail = tailfit.fit_tail

    def recording_fit_tail(*args, **kwargs):
        seen.append((kwargs["candidates"], kwargs["min_tail_fraction"]))
        return real_fit_tail(*args, **kwargs)

    monkeypatch.setattr(tailfit, "fit_tail", recording_fit_tail)
    carried = with_bootstrap(degrees, fit, replicas=100, seed=3, workers=1)
    assert len(seen) == 100
    assert set(seen) == {(5, 0.1)}
    assert carried.kmin_candidates == 5

    seen.clear()
    widened = with_bootstrap(degrees, fit, replicas=100, seed=3, workers=1, candidates=7)
    assert set(seen) == {(7, 0.1)}
    assert widened.kmin_candidates == 7


@pytest.mark.slow
def test_bootstrap_pvalue_is_calibrated_under_the_model():
    # k_min is held fixed in data and replicas so the p-value is exact under the null
    pvalues = []
    for trial in range(20):
        degrees = pareto_degrees(np.random.default_rng(trial), 2.5, 5, 1000)
        fit = fit_powerlaw(degrees, k_min=5)
        pvalues.append(bootstrap_pvalue(degrees, fit, replicas=200, seed=trial, workers=1))
    assert 0.3 <= np.mean(pvalues) <= 0.7


@pytest.mark.slow
def test_bootstrap_rejects_exponential_degrees():
    rejected = 0
    for trial in range(20):
        rng = np.random.default_rng(100 + trial)
        degrees = 1 + np.floor(rng.exponential(10.0, 1000)).astype(np.int64)
        fit = fit_powerlaw(degrees, k_min=1)
        rejected += bootstrap_pvalue(degrees, fit, replicas=200, seed=trial, workers=1) < 0.05
    assert rejected >= 18


@pytest.mark.slow
def test_bootstrap_rejects_wrong_family(rng):
    degrees = sample_tail(model_fit(TailFamily.TRUNCATED, 1.2, 0.05, 2), 3000, rng)
    fit = fit_powerlaw(degrees, k_min=2)
    assert bootstrap_pvalue(degrees, fit, replicas=200, seed=1) < 0.05


# -- figures and reference lines ---------------------------------------------------

def test_model_curve_spans_the_tail():
    fit = model_fit(TailFamily.POWER_LAW, 2.5, None, 6).model_copy(update={"tail_fraction": 0.25})
    k, density = model_curve(fit, 500)
    assert k.size == 200
    assert k[0] == 6 and k[-1] == pytest.approx(500)
    np.testing.assert_allclose(density, 0.25 * fit.pdf(k))


def test_alpha_hurst_relation():
    relation = alpha_hurst_relation(3.1, 0.5)
    assert (relation.lower, relation.central, relation.upper) == (2.0, 3.0, 4.0)
    assert relation.within_band
    assert relation.deviation == pytest.approx(0.1)
    assert not alpha_hurst_relation(1.3, 0.8).within_band
    assert alpha_hurst_relation(1.4, 0.8).within_band
    with pytest.raises(TailFitError):
        alpha_hurst_relation(2.0, 1.0)


def test_alpha_hurst_band_widens_by_standard_errors():
    exact = alpha_hurst_relation(3.6, 0.75)
    assert exact.upper == pytest.approx(3.5)
    assert not exact.within_band
    assert exact.tolerance == 0.0 and exact.alpha_stderr is None

    widened = alpha_hurst_relation(3.6, 0.75, stderr=0.05)
    assert widened.within_band
    assert widened.tolerance == 3.0 and widened.alpha_stderr == 0.05
    assert not alpha_hurst_relation(3.6, 0.75, stderr=0.02).within_band
    assert not alpha_hurst_relation(3.6, 0.75, stderr=0.05, tolerance=1.0).within_band


@pytest.mark.slow
def test_fgn_tail_exponent_follows_hurst_band():
    inside = 0
    for seed in range(10):
        series = generate(SyntheticSpec(kind="fgn", length=5990, hurst=0.75, seed=seed))
        fit = fit_powerlaw(build_vg(series).degrees)
        inside += alpha_hurst_relation(fit.alpha, 0.75, stderr=fit.alpha_stderr).within_band
    assert inside >= 8
