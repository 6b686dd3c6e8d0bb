"""
Visibility graph construction
Nodes are series positions; (i, j) is an edge when the straight chord between
the two points passes strictly above every point in between.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import IO, Callable, Literal

import numpy as np
import pandas as pd

from .exceptions import GraphError, IngestError, ReportIOError
from .graph import Graph
from .logger import get_logger
from .series import TimeSeries
from .utils.files import atomic_text_writer, is_gzip

logger = get_logger(__name__)

Algorithm = Literal["oracle", "sweep", "dc"]
EDGELIST_CHUNK = 65536


class VisibilityGraph(Graph):
    """
    Visibility graph of a series: node i is time index i.

    Always connected, since every consecutive pair (i, i+1) is an edge.
    """


def _values(series: TimeSeries | np.ndarray) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def _label(series: TimeSeries | np.ndarray) -> str:
    return series.label if isinstance(series, TimeSeries) else ""


def visible(series: TimeSeries, i: int, j: int) -> bool:
    """
    True iff every k with i < k < j satisfies
    y[k] < y[j] + (y[i] - y[j]) * (j - k) / (j - i).
    """
    y = _values(series)
    if not 0 <= i < j < y.size:
        raise GraphError(f"need 0 <= i < j < {y.size}, got i={i}, j={j}")
    if j == i + 1:
        return True
    k = np.arange(i + 1, j)
    chord = y[j] + (y[i] - y[j]) * (j - k) / (j - i)
    return bool(np.all(y[k] < chord))


def build_vg_oracle(series: TimeSeries) -> VisibilityGraph:
    """
    Reference constructor: checks the chord condition for every pair.

    O(T^3) work (vectorised over the intermediate points of each anchor);
    meant for tests, not for production-size series.
    """
    y = _values(series)
    n = y.size
    if n < 2:
        raise GraphError("need at least 2 points")

    src = [np.arange(n - 1)]
    dst = [np.arange(1, n)]
    for i in range(n - 2):
        js = np.arange(i + 2, n)
        ks = np.arange(i + 1, n - 1)
        chord = y[js][:, None] + (y[i] - y[js])[:, None] * (js[:, None] - ks[None, :]) / (js - i)[:, None]
        between = ks[None, :] < js[:, None]
        blocked = ((y[ks][None, :] >= chord) & between).any(axis=1)
        hits = js[~blocked]
        src.append(np.full(hits.size, i))
        dst.append(hits)
    return VisibilityGraph.from_edges(n, np.concatenate(src), np.concatenate(dst), label=_label(series))


def _sweep_from(anchor: float, ahead: np.ndarray) -> np.ndarray:
    """
    Offsets (0-based) of the points in `ahead` visible from `anchor`.

    `ahead[d]` sits d+1 steps away. A point is visible iff its chord slope
    strictly exceeds the largest slope to any nearer point.
    """
    slopes = (ahead - anchor) / np.arange(1, ahead.size + 1)
    seen = np.empty(ahead.size, dtype=bool)
    seen[0] = True
    if ahead.size > 1:
        seen[1:] = slopes[1:] > np.maximum.accumulate(slopes)[:-1]
    return np.flatnonzero(seen)


def build_vg_sweep(series: TimeSeries) -> VisibilityGraph:
    """Quadratic constructor: one running-maximum slope sweep per anchor."""
    y = _values(series)
    n = y.size
    if n < 2:
        raise GraphError("need at least 2 points")

    src: list[np.ndarray] = []
    dst: list[np.ndarray] = []
    for i in range(n - 1):
        hits = i + 1 + _sweep_from(y[i], y[i + 1 :])
        src.append(np.full(hits.size, i))
        dst.append(hits)
    return VisibilityGraph.from_edges(n, np.concatenate(src), np.concatenate(dst), label=_label(series))


def build_vg_dc(series: TimeSeries) -> VisibilityGraph:
    """
    Divide-and-conquer constructor.

    The maximum of a range (smallest index on ties) is linked to everything
    it sees inside the range by one sweep to each side, then both sub-ranges
    are processed. No chord can pass over the maximum, so the sub-ranges
    share no edges. Ranges live on an explicit work list, never the call stack.
    """
    y = _values(series)
    n = y.size
    if n < 2:
        raise GraphError("need at least 2 points")

    src: list[np.ndarray] = []
    dst: list[np.ndarray] = []
    pending = [(0, n - 1)]
    while pending:
        lo, hi = pending.pop()
        peak = lo + int(np.argmax(y[lo : hi + 1]))
        if peak < hi:
            right = peak + 1 + _sweep_from(y[peak], y[peak + 1 : hi + 1])
            src.append(np.full(right.size, peak))
            dst.append(right)
            if hi - peak > 1:
                pending.append((peak + 1, hi))
        if peak > lo:
            left = peak - 1 - _sweep_from(y[peak], y[lo:peak][::-1])
            src.append(np.full(left.size, peak))
            dst.append(left)
            if peak - lo > 1:
                pending.append((lo, peak - 1))
    return VisibilityGraph.from_edges(n, np.concatenate(src), np.concatenate(dst), label=_label(series))


CONSTRUCTORS: dict[str, Callable[[TimeSeries], VisibilityGraph]] = {
    "oracle": build_vg_oracle,
    "sweep": build_vg_sweep,
    "dc": build_vg_dc,
}


def build_vg(series: TimeSeries, algorithm: Algorithm = "dc") -> VisibilityGraph:
    try:
        constructor = CONSTRUCTORS[algorithm]
    except KeyError:
        raise GraphError(f"unknown algorithm '{algorithm}' (choose from {sorted(CONSTRUCTORS)})") from None
    began = time.perf_counter()
    graph = constructor(series)
    logger.debug(
        "%s: %s VG with %d nodes, %d edges in %.3fs",
        graph.label or "series",
        algorithm,
        graph.node_count,
        graph.edge_count,
        time.perf_counter() - began,
    )
    return graph


# ---------------------------------------------------------------------------
# Edge lists
# ---------------------------------------------------------------------------

def export_edgelist(graph: Graph, sink: IO[str]) -> int:
    """Write "i j" lines (i < j, lexicographic order); returns the line count."""
    lo, hi = graph.edges()
    try:
        for start in range(0, lo.size, EDGELIST_CHUNK):
            stop = start + EDGELIST_CHUNK
            sink.write("".join(f"{a} {b}\n" for a, b in zip(lo[start:stop].tolist(), hi[start:stop].tolist())))
    except OSError as e:
        raise ReportIOError(f"edge list write failed: {e}") from e
    return int(lo.size)


def write_edgelist(graph: Graph, path: str | Path) -> int:
    """Atomically write the edge list to `path` (gzip when it ends in .gz)."""
    with atomic_text_writer(path) as sink:
        return export_edgelist(graph, sink)


def read_edgelist(path: str | Path, node_count: int | None = None, label: str = "") -> Graph:
    """Inverse of export_edgelist; node count defaults to the largest id + 1."""
    source = Path(path)
    if not source.exists():
        raise IngestError(f"edge list not found: {source}")
    try:
        frame = pd.read_csv(
            source,
            sep=r"\s+",
            header=None,
            comment="#",
            dtype=np.int64,
            compression="gzip" if is_gzip(source) else None,
        )
    except pd.errors.EmptyDataError as e:
        raise IngestError(f"{source}: edge list is empty") from e
    except (ValueError, pd.errors.ParserError, OSError) as e:
        raise IngestError(f"{source}: malformed edge list: {e}") from e
    if frame.shape[1] != 2:
        raise IngestError(f"{source}: expected two columns per line, found {frame.shape[1]}")

    src = frame[0].to_numpy()
    dst = frame[1].to_numpy()
    count = int(max(src.max(), dst.max())) + 1 if node_count is None else node_count
    return Graph.from_edges(count, src, dst, label=label or source.name.split(".")[0])
