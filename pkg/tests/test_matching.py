import itertools

import numpy as np
import pytest

from surface_app.exceptions import MatchingError
from surface_app.logic.helpers.decoder import GraphGeometry, build_graph
from surface_app.logic.helpers.matching import MatchingGraph, brute_force_match, min_weight_match
from surface_app.logic.helpers.planar_lattice import build_lattice
from surface_app.schemas.enums import StabilizerKind


def _random_graph(rng, n: int, density: float) -> MatchingGraph:
    graph = MatchingGraph(n)
    # a ring of heavy edges keeps a perfect matching available
    for u in range(n):
        graph.add_edge(u, (u + 1) % n, 9)
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < density:
            graph.add_edge(u, v, int(rng.integers(0, 6)))
    return graph


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_matches_brute_force(rng, n):
    for _ in range(25):
        graph = _random_graph(rng, n, 0.6)
        fast, exact = min_weight_match(graph), brute_force_match(graph)
        assert fast.weight == exact.weight
        assert fast.pairs == exact.pairs


def test_matches_brute_force_on_fourteen_nodes(rng):
    graph = _random_graph(rng, 14, 0.5)
    assert min_weight_match(graph) == brute_force_match(graph)


def test_tie_break_prefers_earliest_edges():
    graph = MatchingGraph(4)
    for u, v in itertools.combinations(range(4), 2):
        graph.add_edge(u, v, 1)
    assert min_weight_match(graph).pairs == ((0, 1), (2, 3))


def test_parallel_edges_keep_lightest():
    graph = MatchingGraph(2)
    graph.add_edge(0, 1, 5)
    graph.add_edge(1, 0, 2)
    assert min_weight_match(graph).weight == 2
    assert graph.n_edges == 2


def test_partner():
    graph = MatchingGraph(4)
    graph.add_edge(0, 3, 1)
    graph.add_edge(1, 2, 1)
    assert min_weight_match(graph).partner() == {0: 3, 3: 0, 1: 2, 2: 1}


def test_empty_graph():
    assert min_weight_match(MatchingGraph(0)).weight == 0


def test_errors():
    with pytest.raises(MatchingError):
        min_weight_match(MatchingGraph(3))
    graph = MatchingGraph(4)
    graph.add_edge(0, 1, 1)
    with pytest.raises(MatchingError):
        min_weight_match(graph)
    with pytest.raises(MatchingError):
        brute_force_match(graph)
    with pytest.raises(MatchingError):
        graph.add_edge(2, 2, 0)
    with pytest.raises(MatchingError):
        graph.add_edge(0, 4, 0)


@pytest.mark.parametrize("kind", list(StabilizerKind))
def test_pruning_keeps_minimum_weight(rng, kind):
    geometry = GraphGeometry(build_lattice(7), kind)
    for _ in range(30):
        k = int(rng.integers(1, 9))
        events = sorted(
            {(int(rng.integers(0, geometry.size)), int(rng.integers(1, 6))) for _ in range(k)},
            key=lambda e: e[1],
        )
        pruned = build_graph(events, geometry, prune=True)
        full = build_graph(events, geometry, prune=False)
        assert pruned.n_edges <= full.n_edges
        assert min_weight_match(pruned).weight == min_weight_match(full).weight


def _event_sets(seed: int, count: int):
    """Seeded decoder graphs of 1 to 7 distinct events, so 2 to 14 nodes."""
    rng = np.random.default_rng(seed)
    lattice = build_lattice(5)
    geometries = [GraphGeometry(lattice, kind) for kind in StabilizerKind]
    for _ in range(count):
        geometry = geometries[int(rng.integers(0, 2))]
        cells = rng.choice(geometry.size * 6, size=int(rng.integers(1, 8)), replace=False)
        events = sorted(((int(c) % geometry.size, int(c) // geometry.size + 1) for c in cells), key=lambda e: e[1])
        yield geometry, events


@pytest.mark.slow
def test_thousand_decoder_graphs_match_brute_force_with_and_without_pruning():
    sizes = set()
    for geometry, events in _event_sets(20240607, 1000):
        full = build_graph(events, geometry, prune=False)
        exact = brute_force_match(full)
        assert min_weight_match(full) == exact
        assert min_weight_match(build_graph(events, geometry, prune=True)).weight == exact.weight
        sizes.add(full.n_nodes)
    assert sizes == {2, 4, 6, 8, 10, 12, 14}


@pytest.mark.slow
def test_thousand_random_graphs_match_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        graph = _random_graph(rng, 2 * int(rng.integers(1, 8)), 0.5)
        assert min_weight_match(graph) == brute_force_match(graph)


def test_weight_ignores_node_labels(rng):
    for _ in range(30):
        n = 2 * int(rng.integers(1, 6))
        graph = _random_graph(rng, n, 0.5)
        relabel = rng.permutation(n)
        renamed = MatchingGraph(n)
        for u, v, w in graph.edges:
            renamed.add_edge(int(relabel[u]), int(relabel[v]), w)
        assert min_weight_match(renamed).weight == min_weight_match(graph).weight


def test_weight_ignores_event_order(rng):
    for geometry, events in _event_sets(11, 40):
        weight = min_weight_match(build_graph(events, geometry)).weight
        for _ in range(3):
            shuffled = [events[i] for i in rng.permutation(len(events))]
            assert min_weight_match(build_graph(shuffled, geometry)).weight == weight
