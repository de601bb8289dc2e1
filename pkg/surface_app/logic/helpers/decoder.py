"""Space-time matching decoder with boundary companions and a frozen-history window."""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass

import numpy as np
import pandas as pd
from loguru import logger

from surface_app.exceptions import MatchingError
from surface_app.schemas.enums import StabilizerKind
from .frame_simulator import ErrorFrame, SyndromeTrace, detection_events
from .matching import Matching, MatchingGraph, min_weight_match
from .planar_lattice import PlanarLattice

Event = tuple[int, int]


class GraphGeometry:
    """
    Coordinates of one stabilizer kind on the mixed lattice.

    Z-type faces sit at grid (2i+1, 2j) and are matched to the smooth top/bottom
    boundaries; X-type vertices sit at (2i, 2j+1) and are matched to the rough
    left/right boundaries.
    """

    def __init__(self, lattice: PlanarLattice, kind: StabilizerKind):
        self.lattice = lattice
        self.kind = StabilizerKind(kind)
        d = lattice.distance
        self.d = d
        if self.kind == StabilizerKind.Z:
            self.n_rows, self.n_cols = d - 1, d
            self.size = lattice.n_z
        else:
            self.n_rows, self.n_cols = d, d - 1
            self.size = lattice.n_x

    def coords(self, idx: int) -> tuple[int, int]:
        if not 0 <= idx < self.size:
            raise MatchingError(f"{self.kind.value}-type stabilizer {idx} does not exist")
        return divmod(idx, self.n_cols)

    def distance(self, a: int, b: int) -> int:
        (i1, j1), (i2, j2) = self.coords(a), self.coords(b)
        return abs(i1 - i2) + abs(j1 - j2)

    def boundary_distance(self, idx: int) -> int:
        i, j = self.coords(idx)
        if self.kind == StabilizerKind.Z:
            return min(i + 1, self.d - 1 - i)
        return min(j + 1, self.d - 1 - j)

    def _row_step(self, i: int, j: int) -> tuple[int, int]:
        """Data site between rows i and i+1 at column j (i = -1 and the last row reach the boundary)."""
        if self.kind == StabilizerKind.Z:
            return 2 * i + 2, 2 * j
        return 2 * i + 1, 2 * j + 1

    def _col_step(self, i: int, j: int) -> tuple[int, int]:
        if self.kind == StabilizerKind.Z:
            return 2 * i + 1, 2 * j + 1
        return 2 * i, 2 * j + 2

    def path(self, a: int, b: int) -> list[int]:
        """Data qubits along the row-first shortest path between two stabilizers."""
        (i1, j1), (i2, j2) = self.coords(a), self.coords(b)
        sites = [self._row_step(i, j1) for i in range(min(i1, i2), max(i1, i2))]
        sites += [self._col_step(i2, j) for j in range(min(j1, j2), max(j1, j2))]
        return [self.lattice.data_index(s) for s in sites]

    def boundary_path(self, idx: int) -> list[int]:
        """Data qubits from a stabilizer to its nearest eligible boundary (the lower side on ties)."""
        i, j = self.coords(idx)
        if self.kind == StabilizerKind.Z:
            if i + 1 <= self.d - 1 - i:
                sites = [self._row_step(k, j) for k in range(-1, i)]
            else:
                sites = [self._row_step(k, j) for k in range(i, self.d - 1)]
        else:
            if j + 1 <= self.d - 1 - j:
                sites = [self._col_step(i, k) for k in range(-1, j)]
            else:
                sites = [self._col_step(i, k) for k in range(j, self.d - 1)]
        return [self.lattice.data_index(s) for s in sites]


def build_graph(events: list[Event], geometry: GraphGeometry, prune: bool = True) -> MatchingGraph:
    """
    Matching graph over detection events (local stabilizer index, cycle).

    Node i < k is event i, node k + i its boundary companion. Interior edges weigh the
    space distance plus the cycle difference and, when pruning, are kept only if no
    heavier than both nodes' boundary weights combined.
    """
    k = len(events)
    graph = MatchingGraph(2 * k, labels=[("event", s, t) for s, t in events] + [("boundary", s, t) for s, t in events])
    bdist = [geometry.boundary_distance(s) for s, _ in events]
    for a in range(k):
        sa, ta = events[a]
        for b in range(a + 1, k):
            sb, tb = events[b]
            w = geometry.distance(sa, sb) + abs(ta - tb)
            if not prune or w <= bdist[a] + bdist[b]:
                graph.add_edge(a, b, w)
        graph.add_edge(a, k + a, bdist[a])
        for b in range(a + 1, k):
            graph.add_edge(k + a, k + b, 0)
    return graph


def correction_bits(graph: MatchingGraph, matching: Matching, geometry: GraphGeometry) -> np.ndarray:
    """Spatial projection of every matched path, as flips over data qubits."""
    bits = np.zeros(geometry.lattice.n_data, dtype=np.uint8)
    k = graph.n_nodes // 2
    for u, v in matching.pairs:
        if u >= k and v >= k:
            continue
        if v >= k:
            qubits = geometry.boundary_path(graph.labels[u][1])
        else:
            qubits = geometry.path(graph.labels[u][1], graph.labels[v][1])
        for q in qubits:
            bits[q] ^= 1
    return bits


def apply_correction(
        frame: ErrorFrame, graph: MatchingGraph, matching: Matching, lattice: PlanarLattice, kind: StabilizerKind
) -> ErrorFrame:
    """X flips for the Z-type graph, Z flips for the X-type graph."""
    bits = correction_bits(graph, matching, GraphGeometry(lattice, kind))
    if StabilizerKind(kind) == StabilizerKind.Z:
        frame.x_err ^= bits
    else:
        frame.z_err ^= bits
    return frame


@dataclass
class DecodeResult:
    correction: np.ndarray
    weight: int
    nodes: int
    edges: int


class IncrementalDecoder:
    """
    Accumulates detection events of one stabilizer kind and re-matches only the recent window.

    Pairs whose latest event is more than `t_freeze` cycles behind the newest cycle are
    frozen: their correction is kept and their events leave the matching problem.
    """

    def __init__(self, lattice: PlanarLattice, kind: StabilizerKind, t_freeze: int = 20, verify: bool = False):
        self.geometry = GraphGeometry(lattice, kind)
        self.t_freeze = t_freeze
        self.verify = verify
        self.active: list[Event] = []
        self.history: list[Event] = []
        self.frozen_correction = np.zeros(lattice.n_data, dtype=np.uint8)
        self.frozen_weight = 0
        self.divergences = 0
        self.now = 0

    def update(self, new_events: list[Event]) -> IncrementalDecoder:
        for s, t in new_events:
            if t < self.now:
                raise MatchingError(f"event at cycle {t} arrived after cycle {self.now}")
            self.geometry.coords(s)
            self.now = t
            self.active.append((s, t))
            if self.verify:
                self.history.append((s, t))
        return self

    def advance(self, cycle: int) -> None:
        self.now = max(self.now, cycle)

    def copy(self) -> IncrementalDecoder:
        clone = copy.copy(self)
        clone.active = list(self.active)
        clone.history = list(self.history)
        clone.frozen_correction = self.frozen_correction.copy()
        return clone

    def decode(self, extra_events: list[Event] = ()) -> DecodeResult:
        """
        Matches the active window plus `extra_events` (not retained) and freezes old pairs.

        Returns:
            Total correction including frozen pairs.
        """
        events = self.active + list(extra_events)
        graph = build_graph(events, self.geometry)
        matching = min_weight_match(graph)
        correction = self.frozen_correction ^ correction_bits(graph, matching, self.geometry)
        weight = self.frozen_weight + matching.weight
        if self.verify:
            self._check_against_full(list(extra_events), weight)
        self._freeze(graph, matching)
        return DecodeResult(correction, weight, graph.n_nodes, graph.n_edges)

    def _check_against_full(self, extra_events: list[Event], weight: int) -> None:
        full = min_weight_match(build_graph(self.history + extra_events, self.geometry))
        if full.weight != weight:
            self.divergences += 1
            logger.warning(
                f"{self.geometry.kind.value}-graph window matching weight {weight} differs from full {full.weight}"
            )

    def _freeze(self, graph: MatchingGraph, matching: Matching) -> None:
        horizon = self.now - self.t_freeze
        n_active = len(self.active)
        k = graph.n_nodes // 2
        frozen_nodes: set[int] = set()
        sub = MatchingGraph(graph.n_nodes, labels=graph.labels)
        kept: list[tuple[int, int]] = []
        for u, v in matching.pairs:
            if u >= k:
                continue
            owner = [u] if v >= k else [u, v]
            if any(x >= n_active for x in owner):
                continue
            if max(graph.labels[x][2] for x in owner) < horizon:
                frozen_nodes.update(owner)
                kept.append((u, v))
        if not kept:
            return
        weights = graph.weights()
        sub_matching = Matching(tuple(kept), sum(weights[p] for p in kept))
        self.frozen_correction ^= correction_bits(sub, sub_matching, self.geometry)
        self.frozen_weight += sub_matching.weight
        self.active = [e for i, e in enumerate(self.active) if i not in frozen_nodes]


class SurfaceDecoder:
    """Independent Z-type and X-type decoders fed from global stabilizer ids."""

    def __init__(self, lattice: PlanarLattice, t_freeze: int = 20, verify: bool = False):
        self.lattice = lattice
        self.z = IncrementalDecoder(lattice, StabilizerKind.Z, t_freeze, verify)
        self.x = IncrementalDecoder(lattice, StabilizerKind.X, t_freeze, verify)

    def _split(self, events: list[Event]) -> tuple[list[Event], list[Event]]:
        n_z = self.lattice.n_z
        z_events = [(s, t) for s, t in events if s < n_z]
        x_events = [(s - n_z, t) for s, t in events if s >= n_z]
        if any(s >= self.lattice.n_x for s, _ in x_events):
            raise MatchingError("event id outside the lattice")
        return z_events, x_events

    def update(self, events: list[Event], cycle: int) -> SurfaceDecoder:
        z_events, x_events = self._split(events)
        self.z.update(z_events)
        self.x.update(x_events)
        self.z.advance(cycle)
        self.x.advance(cycle)
        return self

    def decode(self, extra_events: list[Event] = ()) -> tuple[DecodeResult, DecodeResult]:
        z_extra, x_extra = self._split(list(extra_events))
        return self.z.decode(z_extra), self.x.decode(x_extra)

    def apply(self, frame: ErrorFrame, extra_events: list[Event] = ()) -> ErrorFrame:
        z_result, x_result = self.decode(extra_events)
        frame.x_err ^= z_result.correction
        frame.z_err ^= x_result.correction
        return frame

    def copy(self) -> SurfaceDecoder:
        clone = copy.copy(self)
        clone.z = self.z.copy()
        clone.x = self.x.copy()
        return clone

    @property
    def divergences(self) -> int:
        return self.z.divergences + self.x.divergences


def replay_trace(trace: SyndromeTrace, lattice: PlanarLattice, t_freeze: int = 20) -> pd.DataFrame:
    """
    Decodes a recorded trace cycle by cycle.

    Returns:
        DataFrame with columns cycle, kind, nodes, edges, weight, time_us.
    """
    decoder = SurfaceDecoder(lattice, t_freeze)
    rows = []
    prev = None
    logger.info(f"Replaying {len(trace.records)} cycles at d={trace.distance}")
    for record in trace.records:
        decoder.update(detection_events(prev, record), record.cycle)
        prev = record
        for kind, sub in ((StabilizerKind.Z, decoder.z), (StabilizerKind.X, decoder.x)):
            start = time.perf_counter()
            result = sub.decode()
            elapsed = (time.perf_counter() - start) * 1e6
            rows.append({
                "cycle": record.cycle,
                "kind": kind.value,
                "nodes": result.nodes,
                "edges": result.edges,
                "weight": result.weight,
                "time_us": round(elapsed, 1),
            })
    logger.success(f"Replayed trace at d={trace.distance}")
    return pd.DataFrame(rows, columns=["cycle", "kind", "nodes", "edges", "weight", "time_us"])
