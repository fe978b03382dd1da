"""Region graphs: the node/edge structure that constrains robot transitions.

Edges are stored as directed pairs ``(j, i)`` meaning "a robot in region j
may move to region i".  Undirected inputs are expanded to both directions at
construction time; self-loops are added for every node when enabled so a
robot can stay put and re-sample its current region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Edge = tuple[int, int]

# Ring over 7 regions plus one chord and all self-loops: a sparse demo
# topology with regions separated by "obstacles".  Any connected graph can
# be supplied through the experiment config instead.
DEMO_EDGES: tuple[Edge, ...] = (
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (1, 4),
)


@dataclass(frozen=True)
class RegionGraph:
    """Directed region graph with ``n_regions`` nodes.

    ``edges`` holds ordered pairs ``(j, i)``: from-region j, to-region i.
    """

    n_regions: int
    edges: frozenset[Edge]
    self_loops: bool = True

    @classmethod
    def from_undirected(
        cls,
        n_regions: int,
        undirected_edges: Iterable[Sequence[int]],
        self_loops: bool = True,
    ) -> "RegionGraph":
        """Expand an undirected edge list to both directions, plus self-loops."""
        directed: set[Edge] = set()
        for e in undirected_edges:
            a, b = int(e[0]), int(e[1])
            directed.add((a, b))
            directed.add((b, a))
        if self_loops:
            directed.update((i, i) for i in range(n_regions))
        return cls(n_regions=n_regions, edges=frozenset(directed), self_loops=self_loops)

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_regions)]
        for j, i in self.edges:
            if 0 <= j < self.n_regions and 0 <= i < self.n_regions:
                out[j].append(i)
        return tuple(tuple(sorted(a)) for a in out)

    def neighbors(self, j: int) -> list[int]:
        """All regions reachable in one hop from j, sorted ascending.

        Includes j itself when the graph carries a self-loop at j.
        """
        if not 0 <= j < self.n_regions:
            raise IndexError(f"region index {j} out of range [0, {self.n_regions})")
        return list(self._adjacency[j])

    def nonself_neighbors(self, j: int) -> list[int]:
        return [i for i in self.neighbors(j) if i != j]


@dataclass
class GraphReport:
    """Outcome of :func:`validate`; callers decide what to do with it."""

    n_regions: int
    strongly_connected: bool
    bad_edges: list[Edge] = field(default_factory=list)
    missing_self_loops: list[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return (
            self.strongly_connected
            and not self.bad_edges
            and not self.missing_self_loops
        )


def _reachable_from(graph: RegionGraph, start: int, reverse: bool = False) -> set[int]:
    adj: list[list[int]] = [[] for _ in range(graph.n_regions)]
    for j, i in graph.edges:
        if 0 <= j < graph.n_regions and 0 <= i < graph.n_regions:
            if reverse:
                adj[i].append(j)
            else:
                adj[j].append(i)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def is_strongly_connected(graph: RegionGraph) -> bool:
    if graph.n_regions <= 0:
        return False
    n = graph.n_regions
    return (
        len(_reachable_from(graph, 0)) == n
        and len(_reachable_from(graph, 0, reverse=True)) == n
    )


def validate(graph: RegionGraph) -> GraphReport:
    """Check connectivity, edge-index ranges, and the self-loop invariant.

    A valid report is a precondition for every chain-synthesis operation.
    """
    bad = sorted(
        (j, i)
        for j, i in graph.edges
        if not (0 <= j < graph.n_regions and 0 <= i < graph.n_regions)
    )
    missing = []
    if graph.self_loops:
        missing = [i for i in range(graph.n_regions) if (i, i) not in graph.edges]
    return GraphReport(
        n_regions=graph.n_regions,
        strongly_connected=is_strongly_connected(graph),
        bad_edges=bad,
        missing_self_loops=missing,
    )


def demo_graph() -> RegionGraph:
    """The default 7-region demo graph: a ring with one chord, self-loops on."""
    return RegionGraph.from_undirected(7, DEMO_EDGES, self_loops=True)
