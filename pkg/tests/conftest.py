from __future__ import annotations

import numpy as np
import pytest

from ergoswarm.graph import RegionGraph
from ergoswarm.target import TargetDistribution


def random_connected_graph(
    n: int, rng: np.random.Generator, extra_edge_prob: float = 0.3
) -> RegionGraph:
    """Random spanning tree plus extra undirected edges, self-loops on."""
    edges = set()
    order = rng.permutation(n)
    for idx in range(1, n):
        a = int(order[idx])
        b = int(order[rng.integers(0, idx)])
        edges.add((min(a, b), max(a, b)))
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < extra_edge_prob:
                edges.add((a, b))
    return RegionGraph.from_undirected(n, sorted(edges), self_loops=True)


def random_positive_target(n: int, rng: np.random.Generator) -> TargetDistribution:
    w = rng.random(n) + 0.05
    return TargetDistribution(rho=w / w.sum())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
