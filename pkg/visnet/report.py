"""
Analysis reports
Runs the full per-series pipeline (DFA, visibility graph, metrics, tail fits,
small-world scan) and writes report.json, metadata.json and figure CSVs.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .config import settings
from .dfa import DfaConfig, DfaResult, estimate_hurst
from .exceptions import MetricsError, TailFitError
from .logger import get_logger
from .metrics import (
    ClusteringFits,
    ClusteringReport,
    GlobalStats,
    MixingReport,
    NullModelComparison,
    SmallWorldScan,
    clustering,
    clustering_degree_relation,
    degree_sequence,
    ensemble_clustering_fit,
    fit_clustering_relation,
    global_stats,
    knn_curve,
    null_model_compare,
    path_length_stats,
    small_world_scan,
)
from .regression import LinearFit
from .series import TimeSeries
from .tailfit import (
    AlphaHurstRelation,
    DegreeTailFit,
    LogBinnedPdf,
    TailFamily,
    alpha_hurst_relation,
    fit_powerlaw,
    fit_truncated_powerlaw,
    log_binned_pdf,
    model_curve,
    nested_loglik_ratio,
    with_bootstrap,
)
from .utils.files import atomic_text_writer, write_table
from .utils.parallel import ordered_map, resolve_workers
from .visibility import Algorithm, build_vg

logger = get_logger(__name__)

SCHEMA_VERSION = 2
TOOL_NAME = "visnet"
FIGURES = ("degree_pdf", "clustering", "reciprocal_clustering", "path_length", "knn", "dfa")


class AnalysisConfig(BaseModel):
    """Every knob that changes the report; echoing it reproduces the run."""

    model_config = ConfigDict(frozen=True)

    algorithm: Algorithm = "dc"
    families: list[TailFamily] = Field(
        default_factory=lambda: [TailFamily.POWER_LAW, TailFamily.TRUNCATED]
    )
    bootstrap: bool = True
    replicas: int = Field(default_factory=lambda: settings.replicas, ge=100)
    realizations: int = Field(default_factory=lambda: settings.realizations, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed, ge=0, lt=2**64)
    smallworld: bool = True
    lengths: list[int] | None = None
    small_window_cutoff: int = Field(default_factory=lambda: settings.small_window_cutoff)
    clustering_degree_ceiling: int = Field(default_factory=lambda: settings.clustering_degree_ceiling)
    bins_per_decade: int = Field(default_factory=lambda: settings.bins_per_decade, ge=1)
    kmin_candidates: int = Field(default_factory=lambda: settings.kmin_candidates, ge=1)
    min_tail_fraction: float = Field(default_factory=lambda: settings.min_tail_fraction, ge=0.0, lt=1.0)
    dfa: DfaConfig = Field(default_factory=DfaConfig)
    reference_hurst: dict[str, float] = Field(default_factory=dict)


class ClusteringBlock(BaseModel):
    average: float
    fits: ClusteringFits | None = None
    excluded_log: int | None = None
    excluded_reciprocal: int | None = None
    undefined_reason: str | None = None


class MixingBlock(BaseModel):
    assortativity: float | None
    mixing: str
    isolated: int
    curve_points: int


class TailBlock(BaseModel):
    fits: list[DegreeTailFit]
    alpha_hurst: list[AlphaHurstRelation] = Field(default_factory=list)
    nested_loglik_ratio: float | None = None


class SeriesReport(BaseModel):
    label: str
    source: str
    length: int
    origin_date: str | None = None
    seeds: dict[str, int]
    hurst: dict[str, Any]
    global_stats: GlobalStats
    clustering: ClusteringBlock
    tails: TailBlock
    path_length: float | None
    connected_fraction: float
    small_world: SmallWorldScan | None = None
    null_model: NullModelComparison
    mixing: MixingBlock


class EnsembleBlock(BaseModel):
    series: int
    clustering_fit: LinearFit | None = None
    undefined_reason: str | None = None


class AnalysisReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, serialization_alias="schema")
    tool: str = TOOL_NAME
    version: str = __version__
    config: AnalysisConfig
    series: list[SeriesReport]
    ensemble: EnsembleBlock

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2) + "\n"


@dataclass
class FigureData:
    """Arrays behind the per-series CSV figure files."""

    dfa: DfaResult
    clustering: ClusteringReport
    pdf: LogBinnedPdf
    curves: list[tuple[TailFamily, np.ndarray, np.ndarray]]
    mixing: MixingReport
    small_world: SmallWorldScan | None
    timings: dict[str, float] = field(default_factory=dict)


@dataclass
class SeriesInput:
    series: TimeSeries
    source: str
    index: int


def stage_seed(seed: int, index: int, stage: str) -> int:
    """Independent 63-bit seed per (run seed, series index, stage)."""
    words = [seed & 0xFFFFFFFF, seed >> 32, index, *stage.encode()]
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def slugify(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_").lower() or "series"


def _hurst_block(result: DfaResult, reference: float | None) -> dict[str, Any]:
    block = result.summary()
    if reference is not None:
        block["reference"] = reference
        block["deviation"] = result.hurst - reference
    return block


def _clustering_block(report: ClusteringReport, ceiling: int) -> ClusteringBlock:
    try:
        relation = clustering_degree_relation(report)
        fits = fit_clustering_relation(relation, max_degree=ceiling)
    except MetricsError as e:
        logger.warning("clustering-degree relation undefined: %s", e.message)
        return ClusteringBlock(average=report.average, undefined_reason=e.message)
    return ClusteringBlock(
        average=report.average,
        fits=fits,
        excluded_log=relation.excluded_log,
        excluded_reciprocal=relation.excluded_reciprocal,
    )


def _fit_tails(
    degrees: np.ndarray,
    config: AnalysisConfig,
    seed: int,
    hurst: float,
    workers: int,
) -> TailBlock:
    fits: list[DegreeTailFit] = []
    scan = {"candidates": config.kmin_candidates, "min_tail_fraction": config.min_tail_fraction}
    for family in config.families:
        if family is TailFamily.POWER_LAW:
            fit = fit_powerlaw(degrees, **scan)
        else:
            fit = fit_truncated_powerlaw(degrees, **scan)
        if config.bootstrap:
            fit = with_bootstrap(
                degrees,
                fit,
                replicas=config.replicas,
                seed=seed,
                workers=workers,
                candidates=config.kmin_candidates,
            )
        fits.append(fit)

    # only the power law carries a standard error; truncated exponents are checked exactly
    relations = (
        [alpha_hurst_relation(f.alpha, hurst, stderr=f.alpha_stderr) for f in fits] if 0.0 < hurst < 1.0 else []
    )
    ratio = None
    truncated = [f for f in fits if f.family is TailFamily.TRUNCATED]
    if truncated and len(fits) > 1:
        try:
            ratio = nested_loglik_ratio(degrees, truncated[0].k_min)
        except TailFitError as e:
            logger.warning("nested likelihood ratio undefined: %s", e.message)
    return TailBlock(fits=fits, alpha_hurst=relations, nested_loglik_ratio=ratio)


def analyze_series(item: SeriesInput, config: AnalysisConfig, workers: int | None = None) -> tuple[SeriesReport, FigureData]:
    """Run every stage on one series; `workers` bounds the inner fan-out."""
    series = item.series
    inner = resolve_workers(workers)
    seeds = {
        "null_model": stage_seed(config.seed, item.index, "null_model"),
        "bootstrap": stage_seed(config.seed, item.index, "bootstrap"),
    }
    timings: dict[str, float] = {}
    clock = time.perf_counter()

    def lap(stage: str) -> None:
        nonlocal clock
        now = time.perf_counter()
        timings[stage] = now - clock
        clock = now

    logger.info("analysing '%s' (%d points)", series.label, len(series))
    dfa = estimate_hurst(series, config.dfa, workers=inner)
    lap("dfa")
    graph = build_vg(series, config.algorithm)
    lap("graph")

    stats = global_stats(graph)
    clust = clustering(graph)
    clustering_block = _clustering_block(clust, config.clustering_degree_ceiling)
    mixing = knn_curve(graph)
    paths = path_length_stats(graph, workers=inner)
    lap("metrics")

    null = null_model_compare(
        graph,
        realizations=config.realizations,
        seed=seeds["null_model"],
        workers=inner,
        path_length=paths.average,
        clustering_average=clust.average,
    )
    lap("null_model")

    degrees = degree_sequence(graph)
    pdf = log_binned_pdf(degrees[degrees > 0], config.bins_per_decade)
    tails = _fit_tails(degrees, config, seeds["bootstrap"], dfa.hurst, inner)
    curves = [(f.family, *model_curve(f, float(degrees.max()))) for f in tails.fits]
    lap("tails")

    scan = None
    if config.smallworld:
        scan = small_world_scan(
            series,
            config.lengths,
            algorithm=config.algorithm,
            workers=inner,
            small_cutoff=config.small_window_cutoff,
        )
        lap("small_world")

    report = SeriesReport(
        label=series.label,
        source=item.source,
        length=len(series),
        origin_date=series.origin_date.isoformat() if series.origin_date else None,
        seeds=seeds,
        hurst=_hurst_block(dfa, config.reference_hurst.get(series.label)),
        global_stats=stats,
        clustering=clustering_block,
        tails=tails,
        path_length=paths.average,
        connected_fraction=paths.connected_fraction,
        small_world=scan,
        null_model=null,
        mixing=MixingBlock(
            assortativity=mixing.assortativity,
            mixing=mixing.mixing.value,
            isolated=mixing.isolated,
            curve_points=int(mixing.curve_degrees.size),
        ),
    )
    figures = FigureData(
        dfa=dfa,
        clustering=clust,
        pdf=pdf,
        curves=curves,
        mixing=mixing,
        small_world=scan,
        timings=timings,
    )
    return report, figures


def _ensemble(reports: list[SeriesReport]) -> EnsembleBlock:
    if len(reports) < 3:
        return EnsembleBlock(series=len(reports), undefined_reason="needs at least 3 series")
    try:
        fit = ensemble_clustering_fit(
            [r.global_stats.average_degree for r in reports],
            [r.clustering.average for r in reports],
        )
    except MetricsError as e:
        return EnsembleBlock(series=len(reports), undefined_reason=e.message)
    return EnsembleBlock(series=len(reports), clustering_fit=fit)


def run_analysis(
    inputs: list[SeriesInput],
    config: AnalysisConfig,
    workers: int | None = None,
) -> tuple[AnalysisReport, list[FigureData]]:
    """
    Analyse every series; with several series they run concurrently and
    each gets a single inner worker.
    """
    total = resolve_workers(workers)
    if len(inputs) > 1 and total > 1:
        outer, inner = total, 1
    else:
        outer, inner = 1, total

    def one(item: SeriesInput) -> tuple[SeriesReport, FigureData]:
        return analyze_series(item, config, workers=inner)

    results = ordered_map(one, inputs, workers=outer)
    reports = [r for r, _ in results]
    report = AnalysisReport(config=config, series=reports, ensemble=_ensemble(reports))
    return report, [f for _, f in results]


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def figure_prefixes(labels: list[str]) -> list[str]:
    """Unique file prefixes derived from series labels."""
    seen: dict[str, int] = {}
    prefixes = []
    for label in labels:
        slug = slugify(label)
        count = seen.get(slug, 0)
        seen[slug] = count + 1
        prefixes.append(slug if count == 0 else f"{slug}_{count + 1}")
    return prefixes


def write_figures(out_dir: Path, prefix: str, data: FigureData) -> list[Path]:
    pdf = data.pdf
    ks = [float(v) for v in pdf.centers]
    density = [float(v) for v in pdf.density]
    source = ["empirical"] * len(ks)
    for family, k, d in data.curves:
        ks.extend(float(v) for v in k)
        density.extend(float(v) for v in d)
        source.extend([family.value] * k.size)

    c = data.clustering
    positive = np.flatnonzero(c.coefficients > 0)
    mix = data.mixing
    points = data.small_world.points if data.small_world else []

    tables = {
        "degree_pdf": (("k", "density", "source"), (ks, density, source)),
        "clustering": (
            ("node", "k", "c"),
            (np.arange(c.degrees.size).tolist(), c.degrees.tolist(), c.coefficients.tolist()),
        ),
        "reciprocal_clustering": (
            ("node", "k", "inv_c"),
            (positive.tolist(), c.degrees[positive].tolist(), (1.0 / c.coefficients[positive]).tolist()),
        ),
        "path_length": (
            ("N", "L", "windows"),
            ([p.length for p in points], [p.path_length for p in points], [p.windows for p in points]),
        ),
        "knn": (
            ("k", "knn_mean", "count"),
            (mix.curve_degrees.tolist(), mix.curve_means.tolist(), mix.curve_counts.tolist()),
        ),
        "dfa": (("s", "F"), (data.dfa.scales, data.dfa.fluctuations)),
    }
    return [
        write_table(out_dir / f"{prefix}_{name}.csv", header, columns)
        for name, (header, columns) in tables.items()
    ]


def write_report(
    out_dir: str | Path,
    report: AnalysisReport,
    figures: list[FigureData],
    elapsed: float,
) -> list[Path]:
    """
    Write report.json (deterministic), metadata.json (timestamps, timings)
    and six CSV figure files per series.
    """
    out = Path(out_dir)
    written: list[Path] = []
    prefixes = figure_prefixes([s.label for s in report.series])
    for prefix, data in zip(prefixes, figures):
        written.extend(write_figures(out, prefix, data))

    with atomic_text_writer(out / "report.json") as sink:
        sink.write(report.to_json())
    written.append(out / "report.json")

    metadata = {
        "tool": TOOL_NAME,
        "version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "elapsed_seconds": round(elapsed, 3),
        "series": [
            {"label": s.label, "prefix": p, "timings": {k: round(v, 3) for k, v in f.timings.items()}}
            for s, p, f in zip(report.series, prefixes, figures)
        ],
    }
    with atomic_text_writer(out / "metadata.json") as sink:
        sink.write(json.dumps(metadata, indent=2) + "\n")
    written.append(out / "metadata.json")
    logger.info("wrote %d files to %s", len(written), out)
    return written
