"""Exact minimum-weight perfect matching on small integer-weighted graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

import networkx as nx

from surface_app.exceptions import MatchingError

Edge = tuple[int, int, int]


@dataclass
class MatchingGraph:
    """
    Nodes are 0..n_nodes-1; `labels` carries whatever the caller attached to them
    (detection events and boundary companions for the decoder).
    """

    n_nodes: int
    edges: list[Edge] = field(default_factory=list)
    labels: list[Hashable] = field(default_factory=list)

    def add_edge(self, u: int, v: int, w: int) -> None:
        if u == v or not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
            raise MatchingError(f"bad edge ({u}, {v}) on {self.n_nodes} nodes")
        self.edges.append((min(u, v), max(u, v), int(w)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def weights(self) -> dict[tuple[int, int], int]:
        result: dict[tuple[int, int], int] = {}
        for u, v, w in self.edges:
            if (u, v) not in result or w < result[(u, v)]:
                result[(u, v)] = w
        return result


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]
    weight: int

    def partner(self) -> dict[int, int]:
        result = {}
        for u, v in self.pairs:
            result[u] = v
            result[v] = u
        return result


def _perturbed_costs(weights: dict[tuple[int, int], int]) -> dict[tuple[int, int], int]:
    """
    Scales weights so that among minimum-weight matchings the one using the
    lexicographically earliest edges wins; Python ints keep this exact.
    """
    ordered = sorted(weights)
    e = len(ordered)
    return {pair: weights[pair] * (1 << e) - (1 << (e - 1 - i)) for i, pair in enumerate(ordered)}


def _check_even(graph: MatchingGraph) -> None:
    if graph.n_nodes % 2:
        raise MatchingError(f"odd node count {graph.n_nodes}")


def min_weight_match(graph: MatchingGraph) -> Matching:
    """
    Minimum-weight perfect matching with a deterministic tie-break.

    Raises:
        MatchingError: on an odd node count or when no perfect matching exists.
    """
    _check_even(graph)
    if graph.n_nodes == 0:
        return Matching((), 0)
    weights = graph.weights()
    costs = _perturbed_costs(weights)
    g = nx.Graph()
    g.add_nodes_from(range(graph.n_nodes))
    for (u, v), c in costs.items():
        g.add_edge(u, v, weight=c)
    mate = nx.min_weight_matching(g, weight="weight")
    pairs = tuple(sorted((min(u, v), max(u, v)) for u, v in mate))
    if 2 * len(pairs) != graph.n_nodes:
        raise MatchingError(f"no perfect matching on {graph.n_nodes} nodes")
    return Matching(pairs, sum(weights[p] for p in pairs))


def brute_force_match(graph: MatchingGraph) -> Matching:
    """Exhaustive enumeration with the same tie-break as min_weight_match; for tests on small graphs."""
    _check_even(graph)
    weights = graph.weights()
    costs = _perturbed_costs(weights)
    adjacency: dict[int, dict[int, int]] = {i: {} for i in range(graph.n_nodes)}
    for (u, v), c in costs.items():
        adjacency[u][v] = c
        adjacency[v][u] = c

    best: list = [None, None]

    def search(unmatched: frozenset, cost: int, chosen: list) -> None:
        if not unmatched:
            if best[0] is None or cost < best[0]:
                best[0], best[1] = cost, list(chosen)
            return
        u = min(unmatched)
        rest = unmatched - {u}
        for v, c in adjacency[u].items():
            if v in rest:
                chosen.append((u, v))
                search(rest - {v}, cost + c, chosen)
                chosen.pop()

    search(frozenset(range(graph.n_nodes)), 0, [])
    if best[1] is None:
        raise MatchingError(f"no perfect matching on {graph.n_nodes} nodes")
    pairs = tuple(sorted(best[1]))
    return Matching(pairs, sum(weights[p] for p in pairs))
