"""
Graph metrics
Global statistics, clustering, path lengths and small-world scans, G(N, M)
null models, degree assortativity and nearest-neighbour degree curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import sparse
from scipy.sparse import csgraph

from .config import settings
from .exceptions import MetricsError, RegressionError
from .graph import Graph
from .logger import get_logger
from .regression import LinearFit, ols
from .series import TimeSeries, slice_series
from .utils.parallel import ordered_map, resolve_workers
from .visibility import Algorithm, build_vg

logger = get_logger(__name__)

TRIANGLE_CHUNK = 1024
PATH_CHUNK = 256
MIN_WINDOW = 10


# ---------------------------------------------------------------------------
# Global statistics
# ---------------------------------------------------------------------------

class GlobalStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    node_count: int = Field(ge=0)
    edge_count: int = Field(ge=0)
    density: float
    average_degree: float
    max_degree: int

    @model_validator(mode="after")
    def _check(self) -> "GlobalStats":
        if self.node_count and self.max_degree > self.node_count - 1:
            raise ValueError("max_degree exceeds node_count - 1")
        return self


def degree_sequence(graph: Graph) -> np.ndarray:
    """Degrees in node order."""
    return np.array(graph.degrees, dtype=np.int64)


def global_stats(graph: Graph) -> GlobalStats:
    n = graph.node_count
    m = graph.edge_count
    deg = graph.degrees
    return GlobalStats(
        node_count=n,
        edge_count=m,
        density=2.0 * m / (n * (n - 1)) if n > 1 else 0.0,
        average_degree=2.0 * m / n if n else 0.0,
        max_degree=int(deg.max()) if n else 0,
    )


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusteringReport:
    """
    Per-node clustering in node order.

    c_i = 2 T_i / (k_i (k_i - 1)), and 0 for nodes with fewer than two
    neighbours; `average` is the mean over every node.
    """

    coefficients: np.ndarray
    triangles: np.ndarray
    degrees: np.ndarray
    average: float


@dataclass(frozen=True, eq=False)
class ClusteringRelation:
    """Pairs ready for regression, plus how many nodes each relation dropped."""

    log_nodes: np.ndarray
    log_degrees: np.ndarray
    log_clustering: np.ndarray
    reciprocal_nodes: np.ndarray
    reciprocal_degrees: np.ndarray
    inverse_clustering: np.ndarray
    excluded_log: int
    excluded_reciprocal: int


class ClusteringFits(BaseModel):
    model_config = ConfigDict(frozen=True)

    log_log: LinearFit
    reciprocal: LinearFit
    degree_ceiling: int | None
    log_pairs: int
    reciprocal_pairs: int


def triangle_counts(graph: Graph, chunk: int = TRIANGLE_CHUNK) -> np.ndarray:
    """
    Exact number of triangles through each node.

    Row blocks of A·A masked by A count, for each edge (i, j), the common
    neighbours of i and j; each triangle at i is seen from both its edges.
    """
    adjacency = graph.adjacency
    counts = np.zeros(graph.node_count, dtype=np.int64)
    for start in range(0, graph.node_count, chunk):
        rows = adjacency[start : start + chunk]
        closed = (rows @ adjacency).multiply(rows)
        counts[start : start + rows.shape[0]] = np.asarray(closed.sum(axis=1)).ravel() // 2
    return counts


def clustering(graph: Graph) -> ClusteringReport:
    deg = degree_sequence(graph)
    triangles = triangle_counts(graph)
    coefficients = np.zeros(graph.node_count, dtype=np.float64)
    wedge = deg >= 2
    pairs = deg[wedge] * (deg[wedge] - 1)
    coefficients[wedge] = 2.0 * triangles[wedge] / pairs
    for arr in (coefficients, triangles, deg):
        arr.setflags(write=False)
    average = float(coefficients.mean()) if graph.node_count else 0.0
    return ClusteringReport(coefficients=coefficients, triangles=triangles, degrees=deg, average=average)


def clustering_degree_relation(report: ClusteringReport) -> ClusteringRelation:
    """
    (ln k_i, ln c_i) over nodes with k_i >= 2 and c_i > 0, and (k_i, 1/c_i)
    over nodes with c_i > 0.

    Raises:
        MetricsError: fewer than 3 qualifying nodes for either relation
    """
    c = report.coefficients
    k = report.degrees
    positive = c > 0.0
    log_mask = positive & (k >= 2)
    if log_mask.sum() < 3 or positive.sum() < 3:
        raise MetricsError(
            f"clustering-degree relation needs 3 nodes with c > 0, found {int(log_mask.sum())}"
        )
    log_nodes = np.flatnonzero(log_mask)
    reciprocal_nodes = np.flatnonzero(positive)
    return ClusteringRelation(
        log_nodes=log_nodes,
        log_degrees=k[log_nodes],
        log_clustering=np.log(c[log_nodes]),
        reciprocal_nodes=reciprocal_nodes,
        reciprocal_degrees=k[reciprocal_nodes],
        inverse_clustering=1.0 / c[reciprocal_nodes],
        excluded_log=int(c.size - log_nodes.size),
        excluded_reciprocal=int(c.size - reciprocal_nodes.size),
    )


def fit_clustering_relation(
    relation: ClusteringRelation,
    max_degree: int | None = None,
) -> ClusteringFits:
    """
    ln c on ln k (degrees up to `max_degree`) and 1/c on k.

    `max_degree` defaults to VISNET_CLUSTERING_DEGREE_CEILING; pass 0 to use
    every pair.
    """
    ceiling = settings.clustering_degree_ceiling if max_degree is None else max_degree
    keep = relation.log_degrees <= ceiling if ceiling else np.ones(relation.log_degrees.size, dtype=bool)
    if keep.sum() < 3:
        raise MetricsError(f"fewer than 3 clustering pairs with degree <= {ceiling}")
    try:
        log_log = ols(np.log(relation.log_degrees[keep]), relation.log_clustering[keep])
        reciprocal = ols(relation.reciprocal_degrees, relation.inverse_clustering)
    except RegressionError as e:
        raise MetricsError(f"clustering-degree fit failed: {e.message}") from e
    return ClusteringFits(
        log_log=log_log,
        reciprocal=reciprocal,
        degree_ceiling=ceiling or None,
        log_pairs=int(keep.sum()),
        reciprocal_pairs=int(relation.reciprocal_nodes.size),
    )


def ensemble_clustering_fit(average_degrees: Sequence[float], clusterings: Sequence[float]) -> LinearFit:
    """ln C against ln <k> across several graphs (one point per series)."""
    k = np.asarray(average_degrees, dtype=np.float64)
    c = np.asarray(clusterings, dtype=np.float64)
    usable = (k > 0) & (c > 0)
    if usable.sum() < 3:
        raise MetricsError(f"ensemble fit needs 3 series with C > 0, got {int(usable.sum())}")
    try:
        return ols(np.log(k[usable]), np.log(c[usable]))
    except RegressionError as e:
        raise MetricsError(f"ensemble clustering fit failed: {e.message}") from e


# ---------------------------------------------------------------------------
# Shortest paths
# ---------------------------------------------------------------------------

class PathLengthStats(BaseModel):
    """Mean distance over connected pairs; None when no pair is connected."""

    model_config = ConfigDict(frozen=True)

    average: float | None
    connected_fraction: float
    connected_pairs: int


def _depth_sum(adjacency: sparse.csr_matrix, source: int) -> tuple[int, int]:
    order, pred = csgraph.breadth_first_order(
        adjacency, source, directed=True, return_predecessors=True
    )
    parent = np.where(pred < 0, source, pred)
    hops = np.zeros(parent.size, dtype=np.int64)
    hops[order[1:]] = 1
    # pointer jumping: hops[v] stays the distance from v to parent[v]
    while (parent != source).any():
        hops = hops + hops[parent]
        parent = parent[parent]
    return int(hops.sum()), order.size - 1


def _distance_block(adjacency: sparse.csr_matrix, sources: np.ndarray) -> tuple[int, int]:
    total = reached = 0
    for source in sources.tolist():
        depth, count = _depth_sum(adjacency, source)
        total += depth
        reached += count
    return total, reached


def path_length_stats(graph: Graph, workers: int | None = 1, chunk: int = PATH_CHUNK) -> PathLengthStats:
    """
    Breadth-first distances from every node, summed exactly.

    L = sum of d(i, j) over connected unordered pairs / number of such pairs.
    """
    n = graph.node_count
    if n < 2:
        raise MetricsError(f"path lengths need at least 2 nodes, got {n}")
    blocks = [np.arange(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    adjacency = sparse.csr_matrix(graph.adjacency, dtype=np.float64)
    parts = ordered_map(partial(_distance_block, adjacency), blocks, workers=workers)
    total = sum(p[0] for p in parts)
    ordered_pairs = sum(p[1] for p in parts)
    return PathLengthStats(
        average=total / ordered_pairs if ordered_pairs else None,
        connected_fraction=ordered_pairs / (n * (n - 1)),
        connected_pairs=ordered_pairs // 2,
    )


def avg_shortest_path(graph: Graph, workers: int | None = 1) -> float:
    stats = path_length_stats(graph, workers=workers)
    if stats.average is None:
        raise MetricsError("graph has no connected pair of nodes")
    return stats.average


# ---------------------------------------------------------------------------
# Small-world scan
# ---------------------------------------------------------------------------

class SmallWorldPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: int
    path_length: float
    windows: int


class SmallWorldScan(BaseModel):
    """L(N) against window length; fits are None with fewer than 3 points."""

    model_config = ConfigDict(frozen=True)

    points: list[SmallWorldPoint]
    fit_all: LinearFit | None
    fit_small: LinearFit | None
    small_cutoff: int


def default_lengths(series_length: int, count: int | None = None, low: int = MIN_WINDOW) -> list[int]:
    """Unique log-spaced integer window lengths on [low, series_length]."""
    count = count or settings.smallworld_lengths
    if series_length < low:
        raise MetricsError(f"series of {series_length} points is shorter than the smallest window {low}")
    grid = np.logspace(math.log10(low), math.log10(series_length), count)
    return np.unique(np.rint(grid).astype(np.int64)).tolist()


def _window_path_length(series: TimeSeries, algorithm: Algorithm, window: tuple[int, int]) -> float:
    start, length = window
    graph = build_vg(slice_series(series, start, length), algorithm)
    return avg_shortest_path(graph)


def _fit_or_none(lengths: np.ndarray, values: np.ndarray) -> LinearFit | None:
    if lengths.size < 3:
        return None
    try:
        return ols(np.log10(lengths), values)
    except RegressionError:
        return None


def small_world_scan(
    series: TimeSeries,
    lengths: Sequence[int] | None = None,
    algorithm: Algorithm = "dc",
    workers: int | None = None,
    small_cutoff: int | None = None,
) -> SmallWorldScan:
    """
    Average L over the floor(T/N) consecutive non-overlapping windows of
    each length N, then fit L against log10 N over all lengths and over
    N <= small_cutoff.

    Raises:
        MetricsError: empty `lengths` or a length outside [10, T]
    """
    total = len(series)
    if lengths is None:
        lengths = default_lengths(total)
    lengths = sorted({int(n) for n in lengths})
    if not lengths:
        raise MetricsError("no window lengths given")
    bad = [n for n in lengths if n < MIN_WINDOW or n > total]
    if bad:
        raise MetricsError(f"window lengths {bad} outside [{MIN_WINDOW}, {total}]")
    cutoff = settings.small_window_cutoff if small_cutoff is None else small_cutoff

    windows = [(w * n, n) for n in lengths for w in range(total // n)]
    measure = partial(_window_path_length, series, algorithm)
    values = ordered_map(measure, windows, workers=resolve_workers(workers))

    points: list[SmallWorldPoint] = []
    offset = 0
    for n in lengths:
        count = total // n
        chunk = values[offset : offset + count]
        offset += count
        points.append(SmallWorldPoint(length=n, path_length=float(np.mean(chunk)), windows=count))
        logger.debug("%s: L(%d) = %.4f over %d windows", series.label, n, points[-1].path_length, count)

    ns = np.array([p.length for p in points], dtype=np.float64)
    ls = np.array([p.path_length for p in points])
    small = ns <= cutoff
    logger.info("%s: small-world scan over %d lengths", series.label, len(points))
    return SmallWorldScan(
        points=points,
        fit_all=_fit_or_none(ns, ls),
        fit_small=_fit_or_none(ns[small], ls[small]),
        small_cutoff=cutoff,
    )


# ---------------------------------------------------------------------------
# G(N, M) null model
# ---------------------------------------------------------------------------

SeedLike = int | np.random.SeedSequence | None


def random_gnm(n: int, m: int, seed: SeedLike = None) -> Graph:
    """
    Uniform simple graph with exactly m edges.

    Edges are m distinct indices into the row-major upper triangle, drawn
    without replacement.
    """
    if n < 0 or m < 0:
        raise MetricsError("node and edge counts must be non-negative")
    total = n * (n - 1) // 2
    if m > total:
        raise MetricsError(f"G({n}, {m}): at most {total} edges fit on {n} nodes")
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(total, size=m, replace=False)) if m else np.empty(0, dtype=np.int64)

    rows = np.arange(max(n - 1, 0), dtype=np.int64)
    row_start = rows * (2 * n - rows - 1) // 2
    src = np.searchsorted(row_start, picks, side="right") - 1
    dst = src + 1 + (picks - row_start[src])
    return Graph.from_edges(n, src, dst, label=f"gnm_{n}_{m}")


class NullModelComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    path_length_actual: float | None
    path_length_random: float | None
    clustering_actual: float
    clustering_random: float
    connected_fraction_random: float
    realizations: int = Field(ge=1)
    seed: int


def _realization(n: int, m: int, seed: np.random.SeedSequence) -> tuple[float | None, float, float]:
    graph = random_gnm(n, m, seed)
    paths = path_length_stats(graph) if n > 1 else None
    return (
        paths.average if paths else None,
        paths.connected_fraction if paths else 0.0,
        clustering(graph).average,
    )


def null_model_compare(
    graph: Graph,
    realizations: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
    path_length: float | None = None,
    clustering_average: float | None = None,
) -> NullModelComparison:
    """
    Compare L and C against G(N, M) graphs with the same node and edge counts.

    Random L is averaged over connected pairs of each realization;
    realizations without a connected pair are left out of that mean.
    Precomputed actual values may be passed in to avoid recomputation.
    """
    realizations = settings.realizations if realizations is None else realizations
    seed = settings.seed if seed is None else seed
    if realizations < 1:
        raise MetricsError("need at least one null-model realization")

    if path_length is None and graph.node_count > 1:
        path_length = path_length_stats(graph, workers=workers).average
    if clustering_average is None:
        clustering_average = clustering(graph).average

    children = np.random.SeedSequence(seed).spawn(realizations)
    runs = ordered_map(
        partial(_realization, graph.node_count, graph.edge_count),
        children,
        workers=resolve_workers(workers),
    )
    lengths = [r[0] for r in runs if r[0] is not None]
    logger.info(
        "null model: %d realizations of G(%d, %d)", realizations, graph.node_count, graph.edge_count
    )
    return NullModelComparison(
        path_length_actual=path_length,
        path_length_random=float(np.mean(lengths)) if lengths else None,
        clustering_actual=clustering_average,
        clustering_random=float(np.mean([r[2] for r in runs])),
        connected_fraction_random=float(np.mean([r[1] for r in runs])),
        realizations=realizations,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Degree mixing
# ---------------------------------------------------------------------------

class Mixing(str, Enum):
    ASSORTATIVE = "assortative"
    NEUTRAL = "neutral"
    DISASSORTATIVE = "disassortative"
    UNDEFINED = "undefined"


def assortativity(graph: Graph) -> float | None:
    """
    Degree Pearson correlation over both orientations of every edge.

    Evaluated in exact integer arithmetic as
    r = (2M Sxy - S1^2) / (2M S3 - S1^2) with S1 = sum k^2, S3 = sum k^3 and
    Sxy = 2 sum over edges of k_i k_j. None when the denominator vanishes
    (every edge endpoint has the same degree).

    Raises:
        MetricsError: the graph has no edges
    """
    m = graph.edge_count
    if m == 0:
        raise MetricsError("assortativity needs at least one edge")
    deg = graph.degrees.astype(np.int64)
    lo, hi = graph.edges()
    s1 = int(deg @ deg)
    s3 = int(np.sum(deg**3))
    sxy = 2 * int(deg[lo] @ deg[hi])
    ends = 2 * m
    denominator = ends * s3 - s1 * s1
    if denominator == 0:
        return None
    r = (ends * sxy - s1 * s1) / denominator
    return min(1.0, max(-1.0, r))


def classify_mixing(r: float | None) -> Mixing:
    if r is None:
        return Mixing.UNDEFINED
    if r > 0:
        return Mixing.ASSORTATIVE
    if r < 0:
        return Mixing.DISASSORTATIVE
    return Mixing.NEUTRAL


@dataclass(frozen=True, eq=False)
class MixingReport:
    """
    k_nn,i per node (NaN for isolated nodes) and the curve <k_nn | k>
    as parallel arrays of degree, mean and node count.
    """

    assortativity: float | None
    neighbor_degree_sum: np.ndarray
    knn: np.ndarray
    curve_degrees: np.ndarray
    curve_means: np.ndarray
    curve_counts: np.ndarray
    isolated: int

    @property
    def mixing(self) -> Mixing:
        return classify_mixing(self.assortativity)


def knn_curve(graph: Graph) -> MixingReport:
    deg = degree_sequence(graph)
    neighbor_sum = np.asarray(graph.adjacency @ deg, dtype=np.int64).ravel()
    active = deg > 0
    knn = np.full(graph.node_count, np.nan)
    knn[active] = neighbor_sum[active] / deg[active]

    ks, inverse, counts = np.unique(deg[active], return_inverse=True, return_counts=True)
    means = np.bincount(inverse, weights=knn[active], minlength=ks.size) / counts if ks.size else np.empty(0)
    return MixingReport(
        assortativity=assortativity(graph) if graph.edge_count else None,
        neighbor_degree_sum=neighbor_sum,
        knn=knn,
        curve_degrees=ks.astype(np.int64),
        curve_means=means,
        curve_counts=counts.astype(np.int64),
        isolated=int((~active).sum()),
    )
