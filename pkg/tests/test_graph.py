import numpy as np
import pytest

from ergoswarm.graph import RegionGraph, demo_graph, validate

from conftest import random_connected_graph


def test_singleton_with_self_loop_is_valid():
    g = RegionGraph.from_undirected(1, [], self_loops=True)
    report = validate(g)
    assert report.valid
    assert report.strongly_connected
    assert g.neighbors(0) == [0]


def test_one_way_edge_is_not_strongly_connected():
    g = RegionGraph(n_regions=2, edges=frozenset({(0, 1)}), self_loops=False)
    report = validate(g)
    assert not report.strongly_connected
    assert not report.valid


def test_demo_graph_is_valid():
    report = validate(demo_graph())
    assert report.valid
    assert report.strongly_connected
    assert not report.bad_edges
    assert not report.missing_self_loops


def test_demo_graph_neighbors_of_node_zero():
    # ring edges (0,1) and (6,0) plus the self-loop
    assert demo_graph().neighbors(0) == [0, 1, 6]


def test_path_graph_neighbors():
    g = RegionGraph.from_undirected(3, [(0, 1), (1, 2)], self_loops=True)
    assert g.neighbors(1) == [0, 1, 2]
    assert g.neighbors(0) == [0, 1]


def test_neighbors_out_of_range():
    g = demo_graph()
    with pytest.raises(IndexError):
        g.neighbors(7)
    with pytest.raises(IndexError):
        g.neighbors(-1)


def test_out_of_range_edges_reported():
    g = RegionGraph(n_regions=2, edges=frozenset({(0, 1), (1, 0), (0, 5)}), self_loops=False)
    report = validate(g)
    assert (0, 5) in report.bad_edges
    assert not report.valid


def test_missing_self_loop_reported():
    g = RegionGraph(n_regions=2, edges=frozenset({(0, 1), (1, 0), (0, 0)}), self_loops=True)
    report = validate(g)
    assert report.missing_self_loops == [1]
    assert not report.valid


def test_undirected_expansion_is_symmetric():
    g = RegionGraph.from_undirected(4, [(0, 1), (2, 3)], self_loops=False)
    for a, b in [(0, 1), (2, 3)]:
        assert (a, b) in g.edges and (b, a) in g.edges


def test_all_pairs_reachability_on_valid_graphs(rng):
    # validation implies every node reaches every other node
    for trial in range(10):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(n, rng)
        assert validate(g).valid
        for start in range(n):
            seen = {start}
            stack = [start]
            while stack:
                u = stack.pop()
                for v in g.neighbors(u):
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            assert seen == set(range(n))


def test_neighbors_round_trip_against_edge_set(rng):
    for trial in range(10):
        n = int(rng.integers(2, 9))
        g = random_connected_graph(n, rng)
        for j in range(n):
            assert set(g.neighbors(j)) == {i for (jj, i) in g.edges if jj == j}
