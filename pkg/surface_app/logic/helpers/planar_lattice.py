"""Planar surface-code geometry and the six-step syndrome extraction schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from surface_app.exceptions import LatticeError, ScheduleError
from surface_app.schemas.enums import BoundaryType, LatticeVariant, StabilizerKind
from .gates import Gate
from .pauli_algebra import PauliOperator, symplectic_rank

DIRECTIONS = ("N", "W", "E", "S")
_OFFSETS = {"N": (-1, 0), "W": (0, -1), "E": (0, 1), "S": (1, 0)}

Site = tuple[int, int]


@dataclass(frozen=True)
class Stabilizer:
    index: int
    kind: StabilizerKind
    site: Site
    neighbours: tuple[tuple[str, int], ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(q for _, q in self.neighbours))

    def qubit_towards(self, direction: str) -> int | None:
        for d, q in self.neighbours:
            if d == direction:
                return q
        return None


@dataclass(frozen=True)
class PlanarLattice:
    """
    Interleaved square grid: data qubits on edges, Z-type stabilizers on faces and
    X-type stabilizers on vertices.

    Syndrome qubits are numbered Z-type first, then X-type; `stabilizers` follows the same order.
    """

    variant: LatticeVariant
    w: int
    h: int
    rows: int
    cols: int
    data_sites: tuple[Site, ...]
    z_stabilizers: tuple[Stabilizer, ...]
    x_stabilizers: tuple[Stabilizer, ...]
    boundary_types: dict[str, BoundaryType] = field(compare=False)
    logical_z_support: tuple[int, ...] = ()
    logical_x_support: tuple[int, ...] = ()

    @property
    def distance(self) -> int:
        return self.w

    @property
    def n_data(self) -> int:
        return len(self.data_sites)

    @property
    def n_z(self) -> int:
        return len(self.z_stabilizers)

    @property
    def n_x(self) -> int:
        return len(self.x_stabilizers)

    @property
    def n_syndromes(self) -> int:
        return self.n_z + self.n_x

    @property
    def stabilizers(self) -> tuple[Stabilizer, ...]:
        return self.z_stabilizers + self.x_stabilizers

    def data_index(self, site: Site) -> int:
        try:
            return self._site_lookup()[site]
        except KeyError:
            raise LatticeError(f"{site} is not a data site")

    def _site_lookup(self) -> dict[Site, int]:
        lookup = self.__dict__.get("_lookup")
        if lookup is None:
            lookup = {s: i for i, s in enumerate(self.data_sites)}
            object.__setattr__(self, "_lookup", lookup)
        return lookup

    def is_data_site(self, site: Site) -> bool:
        return site in self._site_lookup()


def _stabilizers_at(
        sites: list[Site], kind: StabilizerKind, lookup: dict[Site, int], start: int
) -> tuple[Stabilizer, ...]:
    result = []
    for i, (r, c) in enumerate(sites):
        neighbours = []
        for d in DIRECTIONS:
            dr, dc = _OFFSETS[d]
            q = lookup.get((r + dr, c + dc))
            if q is not None:
                neighbours.append((d, q))
        result.append(Stabilizer(start + i, kind, (r, c), tuple(neighbours)))
    return tuple(result)


def build_lattice(d: int) -> PlanarLattice:
    """
    Builds the distance-d planar code with rough left/right and smooth top/bottom boundaries.

    Args:
        d: code distance, at least 2.

    Returns:
        Validated PlanarLattice with logical Z along the top row and logical X along the left column.
    """
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise LatticeError(f"distance must be an integer >= 2, got {d}")
    size = 2 * d - 1
    data_sites = [(r, c) for r in range(size) for c in range(size) if (r + c) % 2 == 0]
    lookup = {s: i for i, s in enumerate(data_sites)}
    faces = [(r, c) for r in range(1, size, 2) for c in range(0, size, 2)]
    vertices = [(r, c) for r in range(0, size, 2) for c in range(1, size, 2)]
    z_stabs = _stabilizers_at(faces, StabilizerKind.Z, lookup, 0)
    x_stabs = _stabilizers_at(vertices, StabilizerKind.X, lookup, len(faces))
    lattice = PlanarLattice(
        variant=LatticeVariant.MIXED,
        w=d,
        h=d,
        rows=size,
        cols=size,
        data_sites=tuple(data_sites),
        z_stabilizers=z_stabs,
        x_stabilizers=x_stabs,
        boundary_types={
            "left": BoundaryType.ROUGH,
            "right": BoundaryType.ROUGH,
            "top": BoundaryType.SMOOTH,
            "bottom": BoundaryType.SMOOTH,
        },
        logical_z_support=tuple(lookup[(0, c)] for c in range(0, size, 2)),
        logical_x_support=tuple(lookup[(r, 0)] for r in range(0, size, 2)),
    )
    validate_lattice(lattice)
    return lattice


def build_all_smooth_lattice(w: int, h: int) -> PlanarLattice:
    """w x h faces with four smooth boundaries; encodes no logical qubit."""
    if w < 1 or h < 1:
        raise LatticeError(f"face counts must be positive, got {w}x{h}")
    rows, cols = 2 * h + 1, 2 * w + 1
    data_sites = [(r, c) for r in range(rows) for c in range(cols) if (r + c) % 2 == 1]
    lookup = {s: i for i, s in enumerate(data_sites)}
    faces = [(r, c) for r in range(1, rows, 2) for c in range(1, cols, 2)]
    vertices = [(r, c) for r in range(0, rows, 2) for c in range(0, cols, 2)]
    lattice = PlanarLattice(
        variant=LatticeVariant.ALL_SMOOTH,
        w=w,
        h=h,
        rows=rows,
        cols=cols,
        data_sites=tuple(data_sites),
        z_stabilizers=_stabilizers_at(faces, StabilizerKind.Z, lookup, 0),
        x_stabilizers=_stabilizers_at(vertices, StabilizerKind.X, lookup, len(faces)),
        boundary_types={side: BoundaryType.SMOOTH for side in ("left", "right", "top", "bottom")},
    )
    validate_lattice(lattice)
    return lattice


def stabilizer_operators(lattice: PlanarLattice) -> list[PauliOperator]:
    return [
        PauliOperator.from_support(lattice.n_data, s.kind.value, s.support)
        for s in lattice.stabilizers
    ]


def logical_operators(lattice: PlanarLattice) -> tuple[PauliOperator, PauliOperator]:
    """(Z_L, X_L) for the mixed-boundary lattice."""
    if not lattice.logical_z_support:
        raise LatticeError(f"{lattice.variant.value} lattice encodes no logical qubit")
    n = lattice.n_data
    return (
        PauliOperator.from_support(n, "Z", lattice.logical_z_support),
        PauliOperator.from_support(n, "X", lattice.logical_x_support),
    )


def validate_lattice(lattice: PlanarLattice) -> None:
    stabs = stabilizer_operators(lattice)
    for s in lattice.stabilizers:
        if len(s.neighbours) < 2:
            raise LatticeError(f"stabilizer at {s.site} has {len(s.neighbours)} terms")
    xs = np.array([s.symplectic()[: lattice.n_data] for s in stabs], dtype=np.uint8)
    zs = np.array([s.symplectic()[lattice.n_data:] for s in stabs], dtype=np.uint8)
    overlaps = (xs.astype(np.int64) @ zs.T.astype(np.int64) + zs.astype(np.int64) @ xs.T.astype(np.int64)) % 2
    if overlaps.any():
        raise LatticeError("stabilizers do not commute")
    rank = symplectic_rank(stabs)
    expected = lattice.n_data - 1 if lattice.variant == LatticeVariant.MIXED else lattice.n_data
    if rank != expected:
        raise LatticeError(f"{rank} independent stabilizers on {lattice.n_data} qubits")
    if lattice.variant == LatticeVariant.MIXED:
        z_l, x_l = logical_operators(lattice)
        if any(not z_l.commutes(s) or not x_l.commutes(s) for s in stabs):
            raise LatticeError("logical operator anticommutes with a stabilizer")
        if z_l.commutes(x_l):
            raise LatticeError("logical operators commute")


@dataclass(frozen=True)
class CnotLayer:
    """One CNOT step; index arrays are aligned, syndromes use local per-kind numbering."""

    direction: str
    z_synd: np.ndarray
    z_data: np.ndarray
    x_synd: np.ndarray
    x_data: np.ndarray
    data_busy: np.ndarray
    synd_busy: np.ndarray


@dataclass(frozen=True)
class ExtractionSchedule:
    """Step 0 initialises, steps 1-4 are CNOT layers in N, W, E, S order, step 5 reads out."""

    lattice: PlanarLattice
    layers: tuple[CnotLayer, ...]

    n_steps: int = 6

    def cnot_counts(self) -> np.ndarray:
        counts = np.zeros(self.lattice.n_syndromes, dtype=np.int64)
        for layer in self.layers:
            counts += layer.synd_busy
        return counts

    def gates(self, step: int) -> list[Gate]:
        """Gates of one step on the register data 0..n-1 followed by syndromes n..n+m-1."""
        n, n_z = self.lattice.n_data, self.lattice.n_z
        if step == 0 or step == self.n_steps - 1:
            return [Gate.h(n + n_z + i) for i in range(self.lattice.n_x)]
        layer = self.layers[step - 1]
        gates = [Gate.cnot(int(q), n + int(s)) for s, q in zip(layer.z_synd, layer.z_data)]
        gates += [Gate.cnot(n + n_z + int(s), int(q)) for s, q in zip(layer.x_synd, layer.x_data)]
        return gates

    def touch_step(self, stabilizer: int, qubit: int) -> int | None:
        for step, layer in enumerate(self.layers, start=1):
            n_z = self.lattice.n_z
            if stabilizer < n_z:
                hit = (layer.z_synd == stabilizer) & (layer.z_data == qubit)
            else:
                hit = (layer.x_synd == stabilizer - n_z) & (layer.x_data == qubit)
            if hit.any():
                return step
        return None


def build_schedule(lattice: PlanarLattice) -> ExtractionSchedule:
    layers = []
    n_z = lattice.n_z
    for direction in DIRECTIONS:
        z_pairs = [(s.index, s.qubit_towards(direction)) for s in lattice.z_stabilizers]
        z_pairs = [(s, q) for s, q in z_pairs if q is not None]
        x_pairs = [(s.index - n_z, s.qubit_towards(direction)) for s in lattice.x_stabilizers]
        x_pairs = [(s, q) for s, q in x_pairs if q is not None]
        data_busy = np.zeros(lattice.n_data, dtype=bool)
        synd_busy = np.zeros(lattice.n_syndromes, dtype=bool)
        for s, q in z_pairs:
            data_busy[q] = True
            synd_busy[s] = True
        for s, q in x_pairs:
            data_busy[q] = True
            synd_busy[n_z + s] = True
        layers.append(CnotLayer(
            direction=direction,
            z_synd=np.array([s for s, _ in z_pairs], dtype=np.int64),
            z_data=np.array([q for _, q in z_pairs], dtype=np.int64),
            x_synd=np.array([s for s, _ in x_pairs], dtype=np.int64),
            x_data=np.array([q for _, q in x_pairs], dtype=np.int64),
            data_busy=data_busy,
            synd_busy=synd_busy,
        ))
    schedule = ExtractionSchedule(lattice, tuple(layers))
    validate_schedule(schedule)
    return schedule


def validate_schedule(schedule: ExtractionSchedule) -> None:
    """
    Raises ScheduleError on a qubit used twice in one step or on two stabilizers that
    share two data qubits without one of them going first on both.
    """
    for layer in schedule.layers:
        data = np.concatenate([layer.z_data, layer.x_data])
        if np.unique(data).size != data.size:
            raise ScheduleError(f"data qubit reused in layer {layer.direction}")
        if np.unique(layer.z_synd).size != layer.z_synd.size or np.unique(layer.x_synd).size != layer.x_synd.size:
            raise ScheduleError(f"syndrome qubit reused in layer {layer.direction}")
    lattice = schedule.lattice
    steps = {}
    for step, layer in enumerate(schedule.layers, start=1):
        for s, q in zip(layer.z_synd, layer.z_data):
            steps[(int(s), int(q))] = step
        for s, q in zip(layer.x_synd, layer.x_data):
            steps[(lattice.n_z + int(s), int(q))] = step
    for a in lattice.z_stabilizers:
        for b in lattice.x_stabilizers:
            shared = sorted(set(a.support) & set(b.support))
            if len(shared) < 2:
                continue
            order = {np.sign(steps[(a.index, q)] - steps[(b.index, q)]) for q in shared}
            if len(order) != 1:
                raise ScheduleError(f"stabilizers at {a.site} and {b.site} interleave on {shared}")


def dump(lattice: PlanarLattice) -> str:
    """Text grid of qubit roles: d<k> data, Z<k>/X<k> syndromes, followed by stabilizer supports."""
    index = {}
    for i, site in enumerate(lattice.data_sites):
        index[site] = f"d{i}"
    for s in lattice.stabilizers:
        index[s.site] = f"{s.kind.value}{s.index}"
    width = max(len(v) for v in index.values()) + 1
    lines = [
        "".join(index.get((r, c), ".").rjust(width) for c in range(lattice.cols))
        for r in range(lattice.rows)
    ]
    lines.append("")
    for s in lattice.stabilizers:
        lines.append(f"{s.kind.value}{s.index}: " + " ".join(f"{s.kind.value}{q}" for q in s.support))
    if lattice.logical_z_support:
        lines.append("Z_L: " + " ".join(f"Z{q}" for q in lattice.logical_z_support))
        lines.append("X_L: " + " ".join(f"X{q}" for q in lattice.logical_x_support))
    return "\n".join(lines)
