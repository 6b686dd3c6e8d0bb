"""
Compressed undirected graphs
Sorted neighbour lists in CSR form, immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import GraphError


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected simple graph on nodes 0..node_count-1.

    `indices[indptr[i]:indptr[i+1]]` are the neighbours of node i in
    ascending order; every edge is stored in both directions.
    """

    node_count: int
    indptr: np.ndarray
    indices: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        if indptr.size != self.node_count + 1 or indptr[-1] != indices.size:
            raise GraphError("inconsistent compressed adjacency")
        if indices.size % 2:
            raise GraphError("adjacency is not symmetric")
        for arr in (indptr, indices):
            arr.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        src: np.ndarray | list[int],
        dst: np.ndarray | list[int],
        label: str = "",
    ):
        """Build from an edge list; duplicates and self-loops are dropped."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise GraphError("edge endpoint arrays differ in length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= node_count):
            raise GraphError(f"edge endpoint outside 0..{node_count - 1}")

        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        keep = lo != hi
        keys = np.unique(lo[keep] * node_count + hi[keep])
        lo, hi = np.divmod(keys, node_count)

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        counts = np.bincount(rows, minlength=node_count)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return cls(node_count=node_count, indptr=indptr, indices=cols[order], label=label)

    # -- read-only views -------------------------------------------------

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        return deg

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node] : self.indptr[node + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges (i, j) with i < j, sorted lexicographically."""
        rows = np.repeat(np.arange(self.node_count), self.degrees)
        upper = self.indices > rows
        return rows[upper], self.indices[upper]

    def edge_set(self) -> set[tuple[int, int]]:
        lo, hi = self.edges()
        return set(zip(lo.tolist(), hi.tolist()))

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """0/1 adjacency as a scipy CSR matrix (int64 data)."""
        data = np.ones(self.indices.size, dtype=np.int64)
        return sparse.csr_matrix(
            (data, self.indices, self.indptr), shape=(self.node_count, self.node_count)
        )

    def is_connected(self) -> bool:
        if self.node_count <= 1:
            return True
        count, _ = csgraph.connected_components(self.adjacency, directed=False)
        return count == 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(label={self.label!r}, nodes={self.node_count}, edges={self.edge_count})"
