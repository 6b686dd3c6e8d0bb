"""
Shared fixtures: small reference graphs and seeded generators.
"""

import itertools
from types import SimpleNamespace

import numpy as np
import pytest

from visnet.graph import Graph
from visnet.series import TimeSeries


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, np.arange(n - 1), np.arange(1, n), label=f"P{n}")


def complete_graph(n: int) -> Graph:
    pairs = np.array(list(itertools.combinations(range(n), 2)))
    return Graph.from_edges(n, pairs[:, 0], pairs[:, 1], label=f"K{n}")


def star_graph(n: int) -> Graph:
    """Centre 0 joined to leaves 1..n-1."""
    return Graph.from_edges(n, np.zeros(n - 1, dtype=int), np.arange(1, n), label=f"S{n}")


def cycle_graph(n: int) -> Graph:
    nodes = np.arange(n)
    return Graph.from_edges(n, nodes, (nodes + 1) % n, label=f"C{n}")


@pytest.fixture
def graphs():
    return SimpleNamespace(path=path_graph, complete=complete_graph, star=star_graph, cycle=cycle_graph)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_series():
    return TimeSeries(values=np.array([3.0, 1.0, 2.0, 0.0, 4.0]), label="small")


@pytest.fixture
def csv_file(tmp_path):
    """Write text to a CSV under tmp_path and return its path."""

    def write(text: str, name: str = "series.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
