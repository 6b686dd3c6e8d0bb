"""
Degree distribution tails
Log-binned densities, maximum-likelihood power-law and exponentially truncated
power-law fits with KS distances and semi-parametric bootstrap p-values.

Both families treat an integer degree k as the interval [k - 0.5, k + 0.5),
so the continuous density is normalised above x0 = k_min - 0.5. At lambda = 0
the truncated likelihood is exactly the power law's.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Literal, Sequence

import numpy as np
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, optimize

from .config import settings
from .exceptions import TailFitError
from .logger import get_logger
from .utils.parallel import ordered_map

logger = get_logger(__name__)

MIN_TAIL = 10
BAND_TOLERANCE = 3.0
LAMBDA_COLLAPSE = 1e-4
MAX_RESTARTS = 3
MAX_FAILED_REPLICAS = 0.05
MODEL_CURVE_POINTS = 200
# beyond this exponent the truncated integrand is below e^-800
_CUTOFF_EXPONENT = 800.0

KMin = int | Literal["auto"]


class TailFamily(str, Enum):
    POWER_LAW = "power_law"
    TRUNCATED = "truncated_power_law"


class DegreeTailFit(BaseModel):
    """One fitted tail; `lambda_` serializes as "lambda"."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    family: TailFamily
    alpha: float
    lambda_: float | None = Field(
        default=None,
        serialization_alias="lambda",
        validation_alias=AliasChoices("lambda", "lambda_"),
    )
    k_min: int = Field(ge=1)
    k_min_auto: bool = False
    ks_distance: float = Field(ge=0.0, le=1.0)
    p_value: float | None = Field(default=None, ge=0.0, le=1.0)
    tail_size: int = Field(ge=MIN_TAIL)
    tail_fraction: float = Field(gt=0.0, le=1.0)
    log_likelihood: float
    reduces_to_power_law: bool = False
    alpha_stderr: float | None = Field(default=None, ge=0.0)
    kmin_candidates: int | None = None
    min_tail_fraction: float | None = None
    replicas: int | None = None
    seed: int | None = None

    @model_validator(mode="after")
    def _family_parameters(self) -> "DegreeTailFit":
        if self.family is TailFamily.POWER_LAW:
            if self.lambda_ is not None:
                raise ValueError("a pure power law has no lambda")
            if self.alpha <= 1.0:
                raise ValueError("power-law alpha must exceed 1")
        else:
            if self.lambda_ is None or self.lambda_ < 0.0:
                raise ValueError("truncated power law needs lambda >= 0")
            if self.alpha <= 0.0:
                raise ValueError("truncated power-law alpha must be positive")
        return self

    @property
    def lower_bound(self) -> float:
        return self.k_min - 0.5

    def cdf(self, k: np.ndarray) -> np.ndarray:
        """Model P(K <= k) for integer k >= k_min."""
        k = np.asarray(k, dtype=np.float64)
        if self.family is TailFamily.POWER_LAW:
            return _power_law_cdf(self.alpha, self.lower_bound, k)
        assert self.lambda_ is not None
        return _truncated_cdf(self.alpha, self.lambda_, self.lower_bound, k)

    def pdf(self, k: np.ndarray) -> np.ndarray:
        """Continuous model density above the lower bound."""
        x = np.asarray(k, dtype=np.float64)
        x0 = self.lower_bound
        if self.family is TailFamily.POWER_LAW:
            return (self.alpha - 1.0) / x0 * (x / x0) ** (-self.alpha)
        assert self.lambda_ is not None
        log_z = _log_normalizer(self.alpha, self.lambda_, x0)
        return np.exp(-self.alpha * np.log(x) - self.lambda_ * x - log_z)

    def summary(self, series: str = "") -> dict:
        return {
            "series": series,
            "family": self.family.value,
            "alpha": self.alpha,
            "lambda": self.lambda_,
            "k_min": self.k_min,
            "p": self.p_value,
        }


# ---------------------------------------------------------------------------
# Input handling
# ---------------------------------------------------------------------------

def _as_degrees(degrees: Sequence[int] | np.ndarray) -> np.ndarray:
    arr = np.asarray(degrees)
    if arr.ndim != 1:
        raise TailFitError("degrees must be a one-dimensional sequence")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise TailFitError("degrees must be integers")
    elif arr.dtype.kind not in "iu":
        raise TailFitError(f"degrees must be integers, got dtype {arr.dtype}")
    return arr.astype(np.int64)


def _tail(degrees: np.ndarray, k_min: int) -> np.ndarray:
    if k_min < 1:
        raise TailFitError(f"k_min must be a positive integer, got {k_min}")
    tail = np.sort(degrees[degrees >= k_min]).astype(np.float64)
    if tail.size < MIN_TAIL:
        raise TailFitError(f"only {tail.size} degrees >= k_min={k_min}; need at least {MIN_TAIL}")
    return tail


# ---------------------------------------------------------------------------
# Log binning
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LogBinnedPdf:
    """
    Geometric histogram normalised as a density.

    `edges` covers min..max degree; the per-bin arrays list occupied bins only.
    """

    edges: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    centers: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower


def log_binned_pdf(degrees: Sequence[int] | np.ndarray, bins_per_decade: int | None = None) -> LogBinnedPdf:
    """
    Raises:
        TailFitError: degree 0 present (the count is reported), fewer than
            10 observations
    """
    k = _as_degrees(degrees)
    per_decade = bins_per_decade or settings.bins_per_decade
    zeros = int((k <= 0).sum())
    if zeros:
        raise TailFitError(f"{zeros} degrees are 0; filter isolated nodes before log binning")
    if k.size < MIN_TAIL:
        raise TailFitError(f"log binning needs at least {MIN_TAIL} observations, got {k.size}")

    low, high = float(k.min()), float(k.max())
    if low == high:
        edges = np.array([low, low * 10.0 ** (1.0 / per_decade)])
    else:
        n_bins = max(1, math.ceil(math.log10(high / low) * per_decade - 1e-9))
        edges = np.geomspace(low, high, n_bins + 1)
    counts, _ = np.histogram(k, bins=edges)
    widths = np.diff(edges)
    occupied = counts > 0
    lower = edges[:-1][occupied]
    upper = edges[1:][occupied]
    return LogBinnedPdf(
        edges=edges,
        lower=lower,
        upper=upper,
        centers=np.sqrt(lower * upper),
        density=counts[occupied] / (k.size * widths[occupied]),
        counts=counts[occupied],
        total=int(k.size),
    )


# ---------------------------------------------------------------------------
# Model functions
# ---------------------------------------------------------------------------

def _power_law_cdf(alpha: float, x0: float, k: np.ndarray) -> np.ndarray:
    return 1.0 - ((k + 0.5) / x0) ** (1.0 - alpha)


def _integrand(alpha: float, scale: float):
    # k = x0 e^u; the constant factor x0^(1-alpha) e^(-lambda x0) is pulled out
    if scale == 0.0:
        return lambda u: math.exp((1.0 - alpha) * u)

    def g(u: float) -> float:
        return math.exp((1.0 - alpha) * u - scale * math.expm1(u))

    return g


def _scaled_integral(alpha: float, lam: float, x0: float) -> float:
    if lam == 0.0:
        if alpha <= 1.0:
            return math.inf
        upper = math.inf
    else:
        upper = math.log1p(_CUTOFF_EXPONENT / (lam * x0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, _ = integrate.quad(_integrand(alpha, lam * x0), 0.0, upper, epsabs=0.0, epsrel=1e-12, limit=200)
    return value


def normalizer(alpha: float, lam: float, lower: float) -> float:
    """Z = integral over [lower, inf) of k^-alpha e^(-lambda k) dk, by quadrature."""
    if lower <= 0.0:
        raise TailFitError("normalizer lower bound must be positive")
    scaled = _scaled_integral(alpha, lam, lower)
    return lower ** (1.0 - alpha) * math.exp(-lam * lower) * scaled


def _log_normalizer(alpha: float, lam: float, x0: float) -> float:
    if lam == 0.0:
        if alpha <= 1.0:
            return math.inf
        return (1.0 - alpha) * math.log(x0) - math.log(alpha - 1.0)
    return (1.0 - alpha) * math.log(x0) - lam * x0 + math.log(_scaled_integral(alpha, lam, x0))


def _truncated_cdf(alpha: float, lam: float, x0: float, k: np.ndarray) -> np.ndarray:
    if lam == 0.0:
        return _power_law_cdf(alpha, x0, k)
    k = np.asarray(k, dtype=np.float64)
    values, inverse = np.unique(k, return_inverse=True)
    bounds = np.log(np.concatenate([[x0], values + 0.5]) / x0)
    starts = bounds[:-1]
    spans = np.diff(bounds)
    scale = lam * x0

    def interval_masses(t: float) -> np.ndarray:
        u = starts + t * spans
        return np.exp((1.0 - alpha) * u - scale * np.expm1(u)) * spans

    masses, _ = integrate.quad_vec(interval_masses, 0.0, 1.0, epsrel=1e-10)
    cdf = np.clip(np.cumsum(masses) / _scaled_integral(alpha, lam, x0), 0.0, 1.0)
    return cdf[inverse].reshape(k.shape)


def log_likelihood(
    tail: np.ndarray,
    alpha: float,
    lam: float,
    lower: float,
) -> float:
    """
    Continuous log-likelihood of `tail` under k^-alpha e^(-lambda k) above
    `lower`; lambda = 0 is the pure power law.
    """
    if alpha <= 0.0 or lam < 0.0 or (lam == 0.0 and alpha <= 1.0):
        return -math.inf
    n = tail.size
    return -n * _log_normalizer(alpha, lam, lower) - alpha * float(np.log(tail).sum()) - lam * float(tail.sum())


# ---------------------------------------------------------------------------
# Goodness of fit
# ---------------------------------------------------------------------------

def ks_statistic(tail: np.ndarray, cdf) -> float:
    """max over the distinct tail values of |empirical CDF - cdf|."""
    values, counts = np.unique(np.asarray(tail, dtype=np.float64), return_counts=True)
    empirical = np.cumsum(counts) / counts.sum()
    return float(np.clip(np.max(np.abs(empirical - cdf(values))), 0.0, 1.0))


def ks_distance(tail: Sequence[int] | np.ndarray, fit: DegreeTailFit) -> float:
    tail = np.asarray(tail, dtype=np.float64)
    if tail.size == 0:
        raise TailFitError("KS distance of an empty tail")
    if tail.min() < fit.k_min:
        raise TailFitError(f"tail contains values below k_min={fit.k_min}")
    return ks_statistic(tail, fit.cdf)


# ---------------------------------------------------------------------------
# Fits at a fixed k_min
# ---------------------------------------------------------------------------

def _power_law_alpha(tail: np.ndarray, x0: float) -> float:
    if tail[0] == tail[-1]:
        raise TailFitError(f"all {tail.size} tail degrees equal {int(tail[0])}; exponent undefined")
    return 1.0 + tail.size / float(np.log(tail / x0).sum())


def _fit_power_law_at(degrees: np.ndarray, k_min: int) -> DegreeTailFit:
    tail = _tail(degrees, k_min)
    x0 = k_min - 0.5
    alpha = _power_law_alpha(tail, x0)
    return DegreeTailFit(
        family=TailFamily.POWER_LAW,
        alpha=alpha,
        k_min=k_min,
        ks_distance=ks_statistic(tail, partial(_power_law_cdf, alpha, x0)),
        tail_size=tail.size,
        tail_fraction=tail.size / degrees.size,
        log_likelihood=log_likelihood(tail, alpha, 0.0, x0),
        alpha_stderr=(alpha - 1.0) / math.sqrt(tail.size),
    )


def _minimize(objective, start: tuple[float, float]) -> optimize.OptimizeResult:
    options = {"xatol": 1e-6, "fatol": 1e-7, "maxiter": 4000}
    bounds = [(1e-9, None), (0.0, None)]
    result = optimize.minimize(objective, np.array(start), method="Nelder-Mead", bounds=bounds, options=options)
    for _ in range(MAX_RESTARTS):
        if result.success:
            break
        result = optimize.minimize(objective, result.x, method="Nelder-Mead", bounds=bounds, options=options)
    return result


def _fit_truncated_at(degrees: np.ndarray, k_min: int) -> DegreeTailFit:
    tail = _tail(degrees, k_min)
    x0 = k_min - 0.5
    alpha_pl = _power_law_alpha(tail, x0)
    inverse_mean = 1.0 / float(tail.mean())

    def objective(params: np.ndarray) -> float:
        return -log_likelihood(tail, float(params[0]), float(params[1]), x0)

    # the power-law optimum as a start keeps the truncated likelihood >= the nested one
    starts = [(1.5, inverse_mean), (2.5, inverse_mean), (1.1, 1e-4), (alpha_pl, 0.0)]
    runs = [_minimize(objective, s) for s in starts]
    if not any(r.success for r in runs):
        raise TailFitError(
            f"truncated power-law fit at k_min={k_min} did not converge after {MAX_RESTARTS} restarts"
        )
    best = min(runs, key=lambda r: r.fun)
    if not math.isfinite(best.fun):
        raise TailFitError(f"truncated power-law likelihood not finite at k_min={k_min}")

    alpha, lam = float(best.x[0]), max(0.0, float(best.x[1]))
    collapsed = lam < LAMBDA_COLLAPSE
    if collapsed:
        logger.debug("k_min=%d: lambda=%.3g below collapse threshold", k_min, lam)
    return DegreeTailFit(
        family=TailFamily.TRUNCATED,
        alpha=alpha,
        lambda_=lam,
        k_min=k_min,
        ks_distance=ks_statistic(tail, partial(_truncated_cdf, alpha, lam, x0)),
        tail_size=tail.size,
        tail_fraction=tail.size / degrees.size,
        log_likelihood=-float(best.fun),
        reduces_to_power_law=collapsed,
    )


_FIXED = {
    TailFamily.POWER_LAW: _fit_power_law_at,
    TailFamily.TRUNCATED: _fit_truncated_at,
}


# ---------------------------------------------------------------------------
# k_min selection
# ---------------------------------------------------------------------------

def kmin_candidates(
    degrees: np.ndarray,
    cap: int | None = None,
    min_tail_fraction: float | None = None,
) -> np.ndarray:
    """
    Distinct degrees whose tail keeps at least 10 points and at least
    `min_tail_fraction` of all degrees, thinned to at most `cap` values
    evenly spread over the sorted list.
    """
    cap = cap or settings.kmin_candidates
    fraction = settings.min_tail_fraction if min_tail_fraction is None else min_tail_fraction
    floor = max(MIN_TAIL, math.ceil(fraction * degrees.size))
    values = np.unique(degrees[degrees >= 1])
    tail_sizes = degrees.size - np.searchsorted(np.sort(degrees), values, side="left")
    values = values[tail_sizes >= floor]
    if values.size > cap:
        picks = np.unique(np.rint(np.linspace(0, values.size - 1, cap)).astype(np.int64))
        values = values[picks]
    return values


def fit_tail(
    degrees: Sequence[int] | np.ndarray,
    family: TailFamily | str,
    k_min: KMin = "auto",
    candidates: int | None = None,
    min_tail_fraction: float | None = None,
) -> DegreeTailFit:
    """
    Fit one family at a fixed k_min, or scan candidates and keep the
    smallest KS distance (smallest k_min on ties).

    An automatic fit records its scan policy (candidate cap and tail-size
    floor) so the bootstrap can re-select k_min the same way.
    """
    family = TailFamily(family)
    arr = _as_degrees(degrees)
    fit_at = _FIXED[family]
    if k_min != "auto":
        return fit_at(arr, int(k_min))

    cap = candidates or settings.kmin_candidates
    fraction = settings.min_tail_fraction if min_tail_fraction is None else min_tail_fraction
    best: DegreeTailFit | None = None
    for value in kmin_candidates(arr, cap, fraction).tolist():
        try:
            fit = fit_at(arr, value)
        except TailFitError as e:
            logger.debug("k_min=%d skipped: %s", value, e.message)
            continue
        if best is None or fit.ks_distance < best.ks_distance:
            best = fit
    if best is None:
        raise TailFitError(f"no k_min candidate leaves a fittable tail of {MIN_TAIL}+ distinct-valued degrees")
    return best.model_copy(update={"k_min_auto": True, "kmin_candidates": cap, "min_tail_fraction": fraction})


def fit_powerlaw(
    degrees: Sequence[int] | np.ndarray,
    k_min: KMin = "auto",
    candidates: int | None = None,
    min_tail_fraction: float | None = None,
) -> DegreeTailFit:
    """alpha = 1 + n / sum ln(k / (k_min - 0.5)) over the tail; stderr (alpha - 1) / sqrt(n)."""
    return fit_tail(degrees, TailFamily.POWER_LAW, k_min, candidates, min_tail_fraction)


def fit_truncated_powerlaw(
    degrees: Sequence[int] | np.ndarray,
    k_min: KMin = "auto",
    candidates: int | None = None,
    min_tail_fraction: float | None = None,
) -> DegreeTailFit:
    """
    Maximise the truncated likelihood by bounded Nelder-Mead from several
    starts, restarting unconverged runs up to three times.
    """
    fit = fit_tail(degrees, TailFamily.TRUNCATED, k_min, candidates, min_tail_fraction)
    if fit.reduces_to_power_law:
        logger.warning("truncated fit at k_min=%d has lambda=%.3g: reduces to pure power law", fit.k_min, fit.lambda_)
    return fit


def nested_loglik_ratio(degrees: Sequence[int] | np.ndarray, k_min: int) -> float:
    """Truncated minus pure power-law maximised log-likelihood; never negative."""
    arr = _as_degrees(degrees)
    return _fit_truncated_at(arr, k_min).log_likelihood - _fit_power_law_at(arr, k_min).log_likelihood


# ---------------------------------------------------------------------------
# Sampling and bootstrap
# ---------------------------------------------------------------------------

def _round_to_degree(x: np.ndarray) -> np.ndarray:
    return np.floor(np.minimum(x, 1e15) + 0.5).astype(np.int64)


def sample_tail(fit: DegreeTailFit, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Integer draws >= k_min from the fitted model.

    Power law: inverse CDF. Truncated: exact rejection sampling from a
    Pareto proposal (alpha > 1) or a shifted exponential (alpha <= 1).
    """
    if size <= 0:
        return np.empty(0, dtype=np.int64)
    x0 = fit.lower_bound
    alpha = fit.alpha
    if fit.family is TailFamily.POWER_LAW or not fit.lambda_:
        return _round_to_degree(x0 * (1.0 - rng.random(size)) ** (-1.0 / (alpha - 1.0)))

    lam = fit.lambda_
    drawn: list[np.ndarray] = []
    remaining = size
    while remaining:
        batch = max(2 * remaining, 16)
        if alpha > 1.0:
            x = x0 * (1.0 - rng.random(batch)) ** (-1.0 / (alpha - 1.0))
            accept = rng.random(batch) < np.exp(-lam * (x - x0))
        else:
            x = x0 + rng.exponential(1.0 / lam, batch)
            accept = rng.random(batch) < (x / x0) ** (-alpha)
        kept = x[accept][:remaining]
        drawn.append(kept)
        remaining -= kept.size
    return _round_to_degree(np.concatenate(drawn))


def _replica_distance(
    degrees: np.ndarray,
    fit: DegreeTailFit,
    seed: int,
    candidates: int | None,
    min_tail_fraction: float | None,
    index: int,
) -> float | None:
    rng = np.random.default_rng([seed, index])
    n = degrees.size
    body = degrees[degrees < fit.k_min]
    n_tail = int(rng.binomial(n, fit.tail_size / n))
    kept = rng.choice(body, size=n - n_tail) if n_tail < n else np.empty(0, dtype=np.int64)
    synthetic = np.concatenate([kept, sample_tail(fit, n_tail, rng)])
    try:
        refit = fit_tail(
            synthetic,
            fit.family,
            "auto" if fit.k_min_auto else fit.k_min,
            candidates=candidates,
            min_tail_fraction=min_tail_fraction,
        )
    except TailFitError:
        return None
    return refit.ks_distance


def bootstrap_pvalue(
    degrees: Sequence[int] | np.ndarray,
    fit: DegreeTailFit,
    replicas: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
    candidates: int | None = None,
) -> float:
    """
    Semi-parametric bootstrap p-value of `fit`'s KS distance.

    Each replica keeps the sample size, draws its tail count from
    Binomial(n, tail fraction), resamples the body below k_min and draws the
    tail from the fitted model, then refits with the same family and k_min
    policy. `candidates` defaults to the cap recorded on `fit`. Replica
    streams are seeded by (seed, replica index).

    Raises:
        TailFitError: fewer than 100 replicas, or more than 5% of the refits fail
    """
    replicas = settings.replicas if replicas is None else replicas
    seed = settings.seed if seed is None else seed
    candidates = fit.kmin_candidates if candidates is None else candidates
    if replicas < 100:
        raise TailFitError(f"bootstrap needs at least 100 replicas, got {replicas}")
    arr = _as_degrees(degrees)

    work = partial(_replica_distance, arr, fit, seed, candidates, fit.min_tail_fraction)
    distances = ordered_map(work, range(replicas), workers=workers, processes=True)
    failed = sum(d is None for d in distances)
    if failed > MAX_FAILED_REPLICAS * replicas:
        raise TailFitError(f"{failed} of {replicas} bootstrap refits failed ({fit.family.value}, k_min={fit.k_min})")
    if failed:
        logger.warning("%d of %d bootstrap refits failed and were dropped", failed, replicas)
    valid = [d for d in distances if d is not None]
    p_value = sum(d >= fit.ks_distance for d in valid) / len(valid)
    logger.info("%s bootstrap: p = %.4f over %d replicas", fit.family.value, p_value, len(valid))
    return p_value


def with_bootstrap(
    degrees: Sequence[int] | np.ndarray,
    fit: DegreeTailFit,
    replicas: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
    candidates: int | None = None,
) -> DegreeTailFit:
    """Copy of `fit` carrying its bootstrap p-value, replica count and seed."""
    replicas = settings.replicas if replicas is None else replicas
    seed = settings.seed if seed is None else seed
    p_value = bootstrap_pvalue(degrees, fit, replicas=replicas, seed=seed, workers=workers, candidates=candidates)
    update: dict = {"p_value": p_value, "replicas": replicas, "seed": seed}
    if candidates is not None and fit.k_min_auto:
        update["kmin_candidates"] = candidates
    return fit.model_copy(update=update)


# ---------------------------------------------------------------------------
# Figure support
# ---------------------------------------------------------------------------

def model_curve(fit: DegreeTailFit, upper: float, points: int = MODEL_CURVE_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """
    Model density at `points` log-spaced degrees on [k_min, upper], scaled
    by the tail fraction so it overlays the log-binned empirical density.
    """
    top = max(float(upper), float(fit.k_min) * (1.0 + 1e-9))
    k = np.geomspace(fit.k_min, top, points)
    return k, fit.tail_fraction * fit.pdf(k)


class AlphaHurstRelation(BaseModel):
    """
    Tail exponent against the 3 - 2H, 4 - 2H and 5 - 2H reference lines.

    With a standard error the band is widened by `tolerance` standard
    errors on each side; without one the check is exact.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float
    hurst: float
    lower: float
    central: float
    upper: float
    within_band: bool
    deviation: float
    alpha_stderr: float | None = None
    tolerance: float = 0.0


def alpha_hurst_relation(
    alpha: float,
    hurst: float,
    stderr: float | None = None,
    tolerance: float = BAND_TOLERANCE,
) -> AlphaHurstRelation:
    if not 0.0 < hurst < 1.0:
        raise TailFitError(f"Hurst exponent must lie in (0, 1), got {hurst}")
    lower, central, upper = 3.0 - 2.0 * hurst, 4.0 - 2.0 * hurst, 5.0 - 2.0 * hurst
    slack = 1e-12 + (tolerance * stderr if stderr else 0.0)
    return AlphaHurstRelation(
        alpha=alpha,
        hurst=hurst,
        lower=lower,
        central=central,
        upper=upper,
        within_band=lower - slack <= alpha <= upper + slack,
        deviation=alpha - central,
        alpha_stderr=stderr,
        tolerance=tolerance if stderr else 0.0,
    )
