"""
Defect-based logical qubits on an all-smooth lattice, tracked exactly on a stabilizer tableau.

Faces and vertices are addressed by cell coordinates: face (i, j) sits at grid site
(2i+1, 2j+1), vertex (i, j) at (2i, 2j). A smooth defect is a connected set of faces whose
Z stabilizers are no longer measured; data qubits interior to it are measured in X instead.
A rough defect is the dual: a set of vertices, interior qubits measured in Z.

Every change of the measured set goes through `DefectLattice._reconfigure`, which
  1. multiplies each tracked operator by old stabilizers until it commutes with the new ones,
  2. measures the new stabilizers on the tableau,
  3. flips negative outcomes with a Pauli that commutes with every tracked operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import yaml
from loguru import logger

from surface_app.exceptions import LatticeError, StateVectorError
from surface_app.schemas.enums import DefectType, PauliKind
from .binary_linalg import gf2_solve
from .gates import Gate
from .pauli_algebra import PauliOperator, SignedBasis, StabilizerTableau, product
from .planar_lattice import PlanarLattice, build_all_smooth_lattice
from .statevector import StateVector, equal_up_to_phase, rx_matrix, rz_matrix

Coord = tuple[int, int]


def _stack(ops: Sequence[PauliOperator], n: int) -> tuple[np.ndarray, np.ndarray]:
    if not ops:
        return np.zeros((0, n), np.int64), np.zeros((0, n), np.int64)
    return np.array([op.x for op in ops], np.int64), np.array([op.z for op in ops], np.int64)


def _unique(ops: Iterable[PauliOperator]) -> list[PauliOperator]:
    seen: set[bytes] = set()
    result = []
    for op in ops:
        if op.is_identity() or op.key() in seen:
            continue
        seen.add(op.key())
        result.append(op)
    return result


def _l_path(start: Coord, end: Coord) -> list[Coord]:
    """Cells visited moving row-first from start to end, start excluded."""
    (i, j), (ti, tj) = start, end
    cells = []
    while i != ti:
        i += 1 if ti > i else -1
        cells.append((i, j))
    while j != tj:
        j += 1 if tj > j else -1
        cells.append((i, j))
    return cells


def _connected(cells: frozenset[Coord]) -> bool:
    if not cells:
        return False
    start = min(cells)
    seen = {start}
    stack = [start]
    while stack:
        i, j = stack.pop()
        for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


def _hadamard_image(op: PauliOperator, qubits: Sequence[int]) -> PauliOperator:
    """H on every listed qubit: X and Z swap, each Y picks up a minus sign."""
    x, z = op.x.copy(), op.z.copy()
    idx = np.asarray(qubits, dtype=np.int64)
    n_y = int(np.count_nonzero(x[idx] & z[idx]))
    x[idx], z[idx] = op.z[idx], op.x[idx]
    return PauliOperator(x, z, op.sign * (-1) ** n_y)


def _permuted(op: PauliOperator, order: np.ndarray) -> PauliOperator:
    return PauliOperator(op.x[order], op.z[order], op.sign)


@dataclass
class LogicalQubit:
    """
    A double-defect logical qubit.

    For a smooth qubit X_L is an X chain between the defects and Z_L the Z ring around the
    first one; rough qubits are the dual. `gauge` is the product of both defect rings, a
    +1 stabilizer of the state that is not measured.
    """

    name: str
    kind: DefectType
    defects: tuple[str, str]
    x_rep: PauliOperator | None = None
    z_rep: PauliOperator | None = None
    gauge: PauliOperator | None = None

    def rep(self, basis: str | PauliKind) -> PauliOperator:
        basis = PauliKind(basis)
        if basis == PauliKind.X:
            return self.x_rep
        if basis == PauliKind.Z:
            return self.z_rep
        raise LatticeError(f"logical {basis.value} has no single tracked representative")


@dataclass
class BraidReport:
    path: list[Coord]
    images: dict[str, PauliOperator]
    before: dict[str, PauliOperator]


@dataclass
class CnotReport:
    m_x: int
    m_z: int
    braids: list[BraidReport] = field(default_factory=list)


@dataclass
class HadamardReport:
    enclosed: int
    m_z: int
    braid: BraidReport


class DefectLattice:
    """
    All-smooth w x h-face surface holding defect qubits, plus optional reference qubits
    appended after the data qubits.

    The initial state is the code state: every vertex X and face Z stabilizer is +1.
    """

    def __init__(
            self,
            w: int,
            h: int,
            n_reference: int = 0,
            seed: int | None = None,
            rng: np.random.Generator | None = None,
    ):
        self.base: PlanarLattice = build_all_smooth_lattice(w, h)
        self.w, self.h = w, h
        self.n_data = self.base.n_data
        self.n_reference = n_reference
        self.n = self.n_data + n_reference
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.smooth_regions: dict[str, frozenset[Coord]] = {}
        self.rough_regions: dict[str, frozenset[Coord]] = {}
        self.qubits: dict[str, LogicalQubit] = {}
        self.extra_tracked: dict[str, PauliOperator] = {}
        self.references: dict[int, str] = {}
        self._edge_faces, self._edge_ends = self._adjacency()
        self.tableau = StabilizerTableau.zero_state(self.n)
        for c in self.vertices():
            op = self._op("X", self.vertex_support(c))
            if self.tableau.expectation(op) == 0:
                self.tableau.measure(op, forced_outcome=1)
        self.measured: list[PauliOperator] = self.configuration()

    # ---- geometry -------------------------------------------------------------------

    def faces(self) -> list[Coord]:
        return [(i, j) for i in range(self.h) for j in range(self.w)]

    def vertices(self) -> list[Coord]:
        return [(i, j) for i in range(self.h + 1) for j in range(self.w + 1)]

    def face_support(self, face: Coord) -> tuple[int, ...]:
        i, j = face
        if not (0 <= i < self.h and 0 <= j < self.w):
            raise LatticeError(f"face {face} is outside the {self.w}x{self.h} lattice")
        return self.base.z_stabilizers[i * self.w + j].support

    def vertex_support(self, vertex: Coord) -> tuple[int, ...]:
        i, j = vertex
        if not (0 <= i <= self.h and 0 <= j <= self.w):
            raise LatticeError(f"vertex {vertex} is outside the {self.w}x{self.h} lattice")
        return self.base.x_stabilizers[i * (self.w + 1) + j].support

    def _adjacency(self) -> tuple[list[list[Coord]], list[list[Coord]]]:
        faces, ends = [], []
        for r, c in self.base.data_sites:
            f, e = [], []
            for a, b in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if not (0 <= a < self.base.rows and 0 <= b < self.base.cols):
                    continue
                if a % 2:
                    f.append(((a - 1) // 2, (b - 1) // 2))
                else:
                    e.append((a // 2, b // 2))
            faces.append(f)
            ends.append(e)
        return faces, ends

    def _op(self, kind: str, qubits: Iterable[int]) -> PauliOperator:
        return PauliOperator.from_support(self.n, kind, qubits)

    def removed_qubits(self) -> tuple[set[int], set[int]]:
        """(measured in X inside smooth defects, measured in Z inside rough defects)."""
        x_removed, z_removed = set(), set()
        for region in self.smooth_regions.values():
            for q, faces in enumerate(self._edge_faces):
                if len(faces) == 2 and all(f in region for f in faces):
                    x_removed.add(q)
        for region in self.rough_regions.values():
            for q, ends in enumerate(self._edge_ends):
                if len(ends) == 2 and all(v in region for v in ends):
                    z_removed.add(q)
        return x_removed, z_removed

    def configuration(self) -> list[PauliOperator]:
        """Measured operators implied by the current defect regions."""
        x_removed, z_removed = self.removed_qubits()
        smooth = set().union(*self.smooth_regions.values()) if self.smooth_regions else set()
        rough = set().union(*self.rough_regions.values()) if self.rough_regions else set()
        ops = [self._op("X", [q]) for q in sorted(x_removed)]
        ops += [self._op("Z", [q]) for q in sorted(z_removed)]
        for f in self.faces():
            if f not in smooth:
                ops.append(self._op("Z", [q for q in self.face_support(f) if q not in z_removed]))
        for v in self.vertices():
            if v not in rough:
                ops.append(self._op("X", [q for q in self.vertex_support(v) if q not in x_removed]))
        return _unique(ops)

    # ---- structural operators -------------------------------------------------------

    def _xor(self, supports: Iterable[Iterable[int]]) -> list[int]:
        bits = np.zeros(self.n, np.uint8)
        for s in supports:
            for q in s:
                bits[q] ^= 1
        return np.flatnonzero(bits).tolist()

    def smooth_ring(self, region: Iterable[Coord]) -> PauliOperator:
        return self._op("Z", self._xor(self.face_support(f) for f in region))

    def rough_ring(self, region: Iterable[Coord]) -> PauliOperator:
        return self._op("X", self._xor(self.vertex_support(v) for v in region))

    @staticmethod
    def _closest_pair(r1: Iterable[Coord], r2: Iterable[Coord]) -> tuple[Coord, Coord]:
        return min(
            ((a, b) for a in r1 for b in r2),
            key=lambda ab: (abs(ab[0][0] - ab[1][0]) + abs(ab[0][1] - ab[1][1]), ab),
        )

    def smooth_chain(self, r1: Iterable[Coord], r2: Iterable[Coord]) -> PauliOperator:
        """X chain across the edges between the closest faces of two smooth regions."""
        a, b = self._closest_pair(r1, r2)
        sites, prev = [], a
        for cell in _l_path(a, b):
            (i1, j1), (i2, j2) = prev, cell
            sites.append((i1 + i2 + 1, j1 + j2 + 1))
            prev = cell
        x_removed, _ = self.removed_qubits()
        qubits = [q for q in self._xor([[self.base.data_index(s) for s in sites]]) if q not in x_removed]
        return self._op("X", qubits)

    def rough_chain(self, v1: Iterable[Coord], v2: Iterable[Coord]) -> PauliOperator:
        """Z chain along the edges between the closest vertices of two rough regions."""
        a, b = self._closest_pair(v1, v2)
        sites, prev = [], a
        for cell in _l_path(a, b):
            (i1, j1), (i2, j2) = prev, cell
            sites.append((i1 + i2, j1 + j2))
            prev = cell
        _, z_removed = self.removed_qubits()
        qubits = [q for q in self._xor([[self.base.data_index(s) for s in sites]]) if q not in z_removed]
        return self._op("Z", qubits)

    # ---- bookkeeping ----------------------------------------------------------------

    def _region_owner(self, defect_id: str) -> tuple[DefectType, dict[str, frozenset[Coord]]]:
        if defect_id in self.smooth_regions:
            return DefectType.SMOOTH, self.smooth_regions
        if defect_id in self.rough_regions:
            return DefectType.ROUGH, self.rough_regions
        raise LatticeError(f"unknown defect {defect_id!r}")

    def _check_region(self, kind: DefectType, region: frozenset[Coord], ignore: str | None = None) -> None:
        if not region:
            raise LatticeError("empty defect region")
        if not _connected(region):
            raise LatticeError(f"region {sorted(region)} is not connected")
        if kind == DefectType.SMOOTH:
            for i, j in region:
                if not (1 <= i <= self.h - 2 and 1 <= j <= self.w - 2):
                    raise LatticeError(f"smooth defect face {(i, j)} touches the lattice boundary")
            for name, other in self.smooth_regions.items():
                if name != ignore and region & other:
                    raise LatticeError(f"region overlaps defect {name!r}")
            corners = {(i + di, j + dj) for i, j in region for di in (0, 1) for dj in (0, 1)}
            for name, other in self.rough_regions.items():
                if name != ignore and corners & other:
                    raise LatticeError(f"region touches rough defect {name!r}")
        else:
            for i, j in region:
                if not (1 <= i <= self.h - 1 and 1 <= j <= self.w - 1):
                    raise LatticeError(f"rough defect vertex {(i, j)} touches the lattice boundary")
            for name, other in self.rough_regions.items():
                if name != ignore and region & other:
                    raise LatticeError(f"region overlaps defect {name!r}")
            for name, other in self.smooth_regions.items():
                corners = {(i + di, j + dj) for i, j in other for di in (0, 1) for dj in (0, 1)}
                if name != ignore and corners & region:
                    raise LatticeError(f"region touches smooth defect {name!r}")

    def _tracked(self) -> list[tuple[object, str]]:
        slots: list[tuple[object, str]] = []
        for q in self.qubits.values():
            for attr in ("x_rep", "z_rep", "gauge"):
                if getattr(q, attr) is not None:
                    slots.append((q, attr))
        slots += [(self.extra_tracked, key) for key in self.extra_tracked]
        return slots

    @staticmethod
    def _get(owner, attr: str) -> PauliOperator:
        return owner[attr] if isinstance(owner, dict) else getattr(owner, attr)

    @staticmethod
    def _set(owner, attr: str, op: PauliOperator) -> None:
        if isinstance(owner, dict):
            owner[attr] = op
        else:
            setattr(owner, attr, op)

    def stabilizer_group(self) -> list[PauliOperator]:
        """Measured operators together with every qubit's gauge."""
        return self.measured + [q.gauge for q in self.qubits.values() if q.gauge is not None]

    def logical_deficit(self) -> int:
        """Data qubits minus the rank of the stabilizer group; equals the number of logical qubits."""
        return self.n_data - SignedBasis(self.stabilizer_group(), self.n).rank

    def canonical(self, op: PauliOperator) -> PauliOperator:
        """Representative of op modulo the measured group."""
        return SignedBasis(self.measured, self.n).reduce(op)

    def equivalent(self, a: PauliOperator, b: PauliOperator) -> bool:
        basis = SignedBasis(self.measured, self.n)
        return basis.reduce(a) == basis.reduce(b)

    def expectation(self, op: PauliOperator) -> int:
        return self.tableau.expectation(op)

    def logical_expectation(self, qid: str, basis: str | PauliKind) -> int:
        return self.tableau.expectation(self.qubit(qid).rep(basis))

    def qubit(self, qid: str) -> LogicalQubit:
        try:
            return self.qubits[qid]
        except KeyError:
            raise LatticeError(f"unknown logical qubit {qid!r}")

    def reference_operator(self, slot: int, basis: str | PauliKind) -> PauliOperator:
        if slot not in self.references:
            raise LatticeError(f"reference qubit {slot} is not attached")
        return self._op(PauliKind(basis).value, [self.n_data + slot])

    # ---- the reconfiguration engine -------------------------------------------------

    def _deformed(
            self, slots: list[tuple[object, str]], old: list[PauliOperator], fresh: list[PauliOperator]
    ) -> list[PauliOperator]:
        fx, fz = _stack(fresh, self.n)
        ox, oz = _stack(old, self.n)
        a = (fx @ oz.T + fz @ ox.T) % 2
        result = []
        for owner, attr in slots:
            rep = self._get(owner, attr)
            b = (fx @ rep.z.astype(np.int64) + fz @ rep.x.astype(np.int64)) % 2
            if b.any():
                c = gf2_solve(a, b)
                if c is None:
                    raise LatticeError(f"tracked operator {attr} would be measured by the new stabilizers")
                rep = product([rep] + [old[i] for i in np.flatnonzero(c)])
            result.append(rep)
        return result

    def _check_pinching(self, new_ops: list[PauliOperator], slots, deformed) -> None:
        basis = SignedBasis(new_ops, self.n)
        for (owner, attr), rep in zip(slots, deformed):
            if isinstance(owner, LogicalQubit) and attr != "gauge" and basis.reduce(rep).is_identity():
                raise LatticeError(f"operation would measure logical {attr[0].upper()} of {owner.name!r}")

    def _sign_correction(
            self,
            new_ops: list[PauliOperator],
            negative: list[PauliOperator],
            fresh: list[PauliOperator],
            tracked: list[PauliOperator],
    ) -> PauliOperator:
        constraints = new_ops + tracked
        neg_keys = {op.key() for op in negative}
        target = np.array(
            [1 if i < len(new_ops) and op.key() in neg_keys else 0 for i, op in enumerate(constraints)],
            dtype=np.uint8,
        )
        cx, cz = _stack(constraints, self.n)
        local = sorted({q for op in fresh for q in op.support if q < self.n_data})
        for support in (local, list(range(self.n_data))):
            cols = np.asarray(support, dtype=np.int64)
            k = cols.size
            sol = gf2_solve(np.concatenate([cz[:, cols], cx[:, cols]], axis=1), target)
            if sol is not None:
                x = np.zeros(self.n, np.uint8)
                z = np.zeros(self.n, np.uint8)
                x[cols] = sol[:k]
                z[cols] = sol[k:]
                return PauliOperator(x, z)
        raise LatticeError("no sign correction commutes with the tracked logical operators")

    def _reconfigure(self, new_ops: list[PauliOperator]) -> list[int]:
        """
        Switches the measured set to new_ops.

        Returns:
            Raw outcomes of the newly measured operators, in order.
        """
        new_ops = _unique(new_ops)
        old_keys = {op.key() for op in self.measured}
        fresh = [op for op in new_ops if op.key() not in old_keys]
        if not fresh:
            self.measured = new_ops
            return []
        slots = self._tracked()
        deformed = self._deformed(slots, self.measured, fresh)
        self._check_pinching(new_ops, slots, deformed)
        for (owner, attr), rep in zip(slots, deformed):
            self._set(owner, attr, rep)
        outcomes = [self.tableau.measure(op, self.rng)[0] for op in fresh]
        negative = [op for op, m in zip(fresh, outcomes) if m < 0]
        if negative:
            correction = self._sign_correction(new_ops, negative, fresh, deformed)
            self.tableau.apply_pauli(correction)
        self.measured = new_ops
        return outcomes

    # ---- logical qubits -------------------------------------------------------------

    def _new_defects(self, name: str) -> tuple[str, str]:
        if name in self.qubits:
            raise LatticeError(f"logical qubit {name!r} already exists")
        return f"{name}.0", f"{name}.1"

    @staticmethod
    def _as_region(cells: Iterable[Sequence[int]]) -> frozenset[Coord]:
        return frozenset((int(i), int(j)) for i, j in cells)

    def create_smooth_qubit(self, name: str, region1: Iterable[Coord], region2: Iterable[Coord]) -> LogicalQubit:
        """Opens two smooth defects; the new qubit starts in |0_L>."""
        r1, r2 = self._as_region(region1), self._as_region(region2)
        if r1 & r2:
            raise LatticeError("defect regions overlap")
        self._check_region(DefectType.SMOOTH, r1)
        self._check_region(DefectType.SMOOTH, r2)
        d1, d2 = self._new_defects(name)
        ring1, ring2 = self.smooth_ring(r1), self.smooth_ring(r2)
        q = LogicalQubit(name, DefectType.SMOOTH, (d1, d2), z_rep=ring1, gauge=ring1 * ring2)
        self.qubits[name] = q
        self.smooth_regions[d1], self.smooth_regions[d2] = r1, r2
        try:
            self._reconfigure(self.configuration())
        except LatticeError:
            del self.qubits[name], self.smooth_regions[d1], self.smooth_regions[d2]
            raise
        q.x_rep = self.smooth_chain(self.smooth_regions[d1], self.smooth_regions[d2])
        self._check_logical(q)
        return q

    def create_rough_qubit(self, name: str, region1: Iterable[Coord], region2: Iterable[Coord]) -> LogicalQubit:
        """Opens two rough defects; the new qubit starts in |+_L>."""
        v1, v2 = self._as_region(region1), self._as_region(region2)
        if v1 & v2:
            raise LatticeError("defect regions overlap")
        self._check_region(DefectType.ROUGH, v1)
        self._check_region(DefectType.ROUGH, v2)
        d1, d2 = self._new_defects(name)
        ring1, ring2 = self.rough_ring(v1), self.rough_ring(v2)
        q = LogicalQubit(name, DefectType.ROUGH, (d1, d2), x_rep=ring1, gauge=ring1 * ring2)
        self.qubits[name] = q
        self.rough_regions[d1], self.rough_regions[d2] = v1, v2
        try:
            self._reconfigure(self.configuration())
        except LatticeError:
            del self.qubits[name], self.rough_regions[d1], self.rough_regions[d2]
            raise
        q.z_rep = self.rough_chain(self.rough_regions[d1], self.rough_regions[d2])
        self._check_logical(q)
        return q

    def _check_logical(self, q: LogicalQubit) -> None:
        ops = self.measured
        if not all(op.commutes(q.x_rep) and op.commutes(q.z_rep) for op in ops) or q.x_rep.commutes(q.z_rep):
            self.remove_qubit(q.name)
            raise LatticeError(f"no clear chain between the defects of {q.name!r}")

    def remove_qubit(self, qid: str) -> None:
        """Closes both defects of a qubit by measuring their stabilizers again."""
        q = self.qubit(qid)
        del self.qubits[qid]
        for d in q.defects:
            self._region_owner(d)[1].pop(d)
        self._reconfigure(self.configuration())
        self.references = {slot: name for slot, name in self.references.items() if name != qid}

    def _rename(self, old: str, new: str) -> None:
        q = self.qubits.pop(old)
        renamed = []
        for k, d in enumerate(q.defects):
            _, regions = self._region_owner(d)
            regions[f"{new}.{k}"] = regions.pop(d)
            renamed.append(f"{new}.{k}")
        q.name, q.defects = new, tuple(renamed)
        self.qubits[new] = q
        self.references = {slot: (new if name == old else name) for slot, name in self.references.items()}

    def measure_logical(self, qid: str, basis: str | PauliKind) -> int:
        outcome, _ = self.tableau.measure(self.qubit(qid).rep(basis), self.rng)
        return outcome

    def prepare_logical(self, qid: str, basis: str | PauliKind) -> int:
        """Measures the logical and fixes a -1 with the conjugate logical; returns the raw outcome."""
        q = self.qubit(qid)
        outcome = self.measure_logical(qid, basis)
        if outcome < 0:
            fix = q.z_rep if PauliKind(basis) == PauliKind.X else q.x_rep
            self.tableau.apply_pauli(fix)
        return outcome

    def apply_logical(self, qid: str, pauli: str | PauliKind) -> None:
        q = self.qubit(qid)
        pauli = PauliKind(pauli)
        if pauli in (PauliKind.X, PauliKind.Y):
            self.tableau.apply_pauli(q.x_rep)
        if pauli in (PauliKind.Z, PauliKind.Y):
            self.tableau.apply_pauli(q.z_rep)

    def attach_reference(self, qid: str) -> int:
        """
        Maximally entangles a free reference qubit with a logical qubit.

        Returns:
            The reference slot; the state is then stabilized by X_L X_ref and Z_L Z_ref.
        """
        q = self.qubit(qid)
        slot = len(self.references)
        if slot >= self.n_reference:
            raise LatticeError(f"all {self.n_reference} reference qubits are in use")
        xr, zr = self._op("X", [self.n_data + slot]), self._op("Z", [self.n_data + slot])
        m_x, _ = self.tableau.measure(q.x_rep * xr, self.rng)
        m_z, _ = self.tableau.measure(q.z_rep * zr, self.rng)
        if m_x < 0:
            self.tableau.apply_pauli(zr)
        if m_z < 0:
            self.tableau.apply_pauli(xr)
        self.references[slot] = qid
        return slot

    # ---- movement and braiding ------------------------------------------------------

    def move_defect(self, defect_id: str, target: Iterable[Coord]) -> None:
        """Extends the defect over the target region, then shrinks it onto the target."""
        kind, regions = self._region_owner(defect_id)
        current = regions[defect_id]
        target = self._as_region(target)
        merged = current | target
        if not _connected(merged):
            raise LatticeError(f"target {sorted(target)} is not connected to defect {defect_id!r}")
        self._check_region(kind, merged, ignore=defect_id)
        self._check_region(kind, target, ignore=defect_id)
        for stage in (merged, target):
            regions[defect_id] = stage
            try:
                self._reconfigure(self.configuration())
            except LatticeError:
                regions[defect_id] = current if stage is merged else merged
                raise

    def braid_path(self, moving_face: Coord, around_vertex: Coord, reverse: bool = False) -> list[Coord]:
        """
        Closed face path: row-first to the ring of twelve faces framing the 4 x 4 block
        centred on the vertex, once around the ring, and back.
        """
        a, b = around_vertex
        ring = [(a - 2, j) for j in range(b - 2, b + 2)]
        ring += [(i, b + 1) for i in range(a - 1, a + 2)]
        ring += [(a + 1, j) for j in range(b, b - 3, -1)]
        ring += [(i, b - 2) for i in range(a, a - 2, -1)]
        if reverse:
            ring = [ring[0]] + ring[:0:-1]
        for i, j in ring:
            if not (0 <= i < self.h and 0 <= j < self.w):
                raise LatticeError(f"braid ring around {around_vertex} leaves the lattice")
        start = tuple(moving_face)
        k = min(range(len(ring)), key=lambda idx: abs(ring[idx][0] - start[0]) + abs(ring[idx][1] - start[1]))
        loop = ring[k:] + ring[:k]
        approach = _l_path(start, loop[0])
        path = [start] + approach + loop[1:] + [loop[0]]
        if approach:
            path += list(reversed(approach[:-1])) + [start]
        return path

    def braid_cnot(self, smooth: str, rough: str, reverse: bool = False) -> BraidReport:
        """
        Drags the first defect of a smooth qubit around the first defect of a rough qubit.

        Acts as a logical CNOT with the smooth qubit as control. The returned images are the
        tracked operators after the braid; the qubits' representatives are reset to the
        pre-braid ones, which are valid again once the defect is home.
        """
        sq, rq = self.qubit(smooth), self.qubit(rough)
        if sq.kind != DefectType.SMOOTH or rq.kind != DefectType.ROUGH:
            raise LatticeError("braiding needs a smooth control and a rough target")
        mover = sq.defects[0]
        region, around = self.smooth_regions[mover], self.rough_regions[rq.defects[0]]
        if len(region) != 1 or len(around) != 1:
            raise LatticeError("braiding moves single-face defects around single-vertex defects")
        (vertex,) = around
        (face,) = region
        a, b = vertex
        for name, other in self.rough_regions.items():
            if name != rq.defects[0] and any(abs(i - a) <= 1 and abs(j - b) <= 1 for i, j in other):
                raise LatticeError(f"braid path encloses defect {name!r}")
        for name, other in self.smooth_regions.items():
            if name != mover and any(a - 1 <= i <= a and b - 1 <= j <= b for i, j in other):
                raise LatticeError(f"braid path encloses defect {name!r}")

        saved = {(q.name, attr): getattr(q, attr) for q in self.qubits.values() for attr in ("x_rep", "z_rep", "gauge")}
        before = {
            "smooth_x": sq.x_rep, "smooth_z": sq.z_rep, "rough_x": rq.x_rep, "rough_z": rq.z_rep,
        }
        path = self.braid_path(face, vertex, reverse)
        for cell in path[1:]:
            self.move_defect(mover, [cell])
        images = {
            "smooth_x": sq.x_rep, "smooth_z": sq.z_rep, "rough_x": rq.x_rep, "rough_z": rq.z_rep,
        }
        for (name, attr), op in saved.items():
            setattr(self.qubits[name], attr, op)
        return BraidReport(path, images, before)

    def same_type_cnot(
            self, control: str, target: str, ancilla: tuple[Iterable[Coord], Iterable[Coord]]
    ) -> CnotReport:
        """
        Logical CNOT between two smooth qubits through a rough ancilla in |0_L>.

        The target is teleported into the ancilla, receives the control, and is teleported
        back into a fresh smooth qubit on the target's defect sites; (Z x Z)^{M_X} and
        X^{M_Z} byproducts are fixed at once.
        """
        cq, tq = self.qubit(control), self.qubit(target)
        if cq.kind != DefectType.SMOOTH or tq.kind != DefectType.SMOOTH:
            raise LatticeError("same-type CNOT acts on two smooth qubits")
        anc = f"{target}.anc"
        fresh = f"{target}.new"
        sites = [self.smooth_regions[d] for d in tq.defects]
        self.create_rough_qubit(anc, *ancilla)
        self.prepare_logical(anc, PauliKind.Z)
        braids = [self.braid_cnot(target, anc)]
        m_x = self.measure_logical(target, PauliKind.X)
        self.remove_qubit(target)
        braids.append(self.braid_cnot(control, anc))
        self.create_smooth_qubit(fresh, *sites)
        self.prepare_logical(fresh, PauliKind.X)
        braids.append(self.braid_cnot(fresh, anc))
        m_z = self.measure_logical(anc, PauliKind.Z)
        self.remove_qubit(anc)
        if m_x < 0:
            self.apply_logical(control, PauliKind.Z)
            self.apply_logical(fresh, PauliKind.Z)
        if m_z < 0:
            self.apply_logical(fresh, PauliKind.X)
        self._rename(fresh, target)
        return CnotReport(m_x, m_z, braids)

    # ---- Hadamard -------------------------------------------------------------------

    def transversal_hadamard(
            self,
            qid: str,
            cut: tuple[Coord, Coord],
            ancilla: tuple[Iterable[Coord], Iterable[Coord]],
    ) -> HadamardReport:
        """
        Logical Hadamard on a smooth qubit.

        A rectangular ring of Z measurements along the vertices of `cut` isolates the qubit's
        patch; Hadamards on the enclosed qubits turn it into a rough qubit, a diagonal
        relabelling of the enclosed sites realigns it with the lattice, and a braid with a
        smooth ancilla in |+_L> on the `ancilla` faces restores the smooth type.
        """
        q = self.qubit(qid)
        if q.kind != DefectType.SMOOTH:
            raise LatticeError("transversal Hadamard expects a smooth qubit")
        (i0, j0), (i1, j1) = cut
        if not (1 <= i0 < i1 <= self.h - 1 and 1 <= j0 < j1 <= self.w - 1):
            raise LatticeError(f"cut {cut} does not fit inside the lattice")
        for d in q.defects:
            for i, j in self.smooth_regions[d]:
                if not (i0 + 1 <= i <= i1 - 2 and j0 + 1 <= j <= j1 - 2):
                    raise LatticeError(f"defect {d!r} is too close to the cut ring")
        for name, other in self.smooth_regions.items():
            if name not in q.defects and any(i0 - 1 <= i <= i1 and j0 - 1 <= j <= j1 for i, j in other):
                raise LatticeError(f"cut ring intersects defect {name!r}")
        for name, other in self.rough_regions.items():
            if any(i0 - 1 <= i <= i1 + 1 and j0 - 1 <= j <= j1 + 1 for i, j in other):
                raise LatticeError(f"cut ring intersects defect {name!r}")

        r_lo, r_hi, c_lo, c_hi = 2 * i0, 2 * i1, 2 * j0, 2 * j1
        enclosed_sites = {s for s in self.base.data_sites if r_lo < s[0] < r_hi and c_lo < s[1] < c_hi}
        enclosed = sorted(self.base.data_index(s) for s in enclosed_sites)
        inside = set(enclosed)
        for attr in ("x_rep", "z_rep", "gauge"):
            if not set(getattr(q, attr).support) <= inside:
                raise LatticeError(f"logical operator of {qid!r} leaves the cut")

        loop = frozenset(
            {(i, j) for i in range(i0, i1 + 1) for j in (j0, j1)}
            | {(i, j) for j in range(j0, j1 + 1) for i in (i0, i1)}
        )
        cut_id = f"{qid}.cut"
        self.rough_regions[cut_id] = loop
        self.extra_tracked[cut_id] = self.rough_ring(loop)
        self._reconfigure(self.configuration())
        del self.extra_tracked[cut_id]
        for other in self.qubits.values():
            if other is q:
                continue
            for attr in ("x_rep", "z_rep", "gauge"):
                op = getattr(other, attr)
                if op is not None and set(op.support) & inside:
                    raise LatticeError(f"logical operator of {other.name!r} crosses the cut")

        for idx in enclosed:
            self.tableau.apply_gate(Gate.h(idx))
        image_sites = {(r + 1, c + 1) for r, c in enclosed_sites}
        displaced = sorted(image_sites - enclosed_sites)
        vacated = sorted(enclosed_sites - image_sites)
        mapping = {self.base.data_index(s): self.base.data_index((s[0] + 1, s[1] + 1)) for s in enclosed_sites}
        mapping.update({self.base.data_index(a): self.base.data_index(b) for a, b in zip(displaced, vacated)})
        self.tableau.permute(mapping)
        order = np.arange(self.n)
        for src, dst in mapping.items():
            order[dst] = src

        def transform(op: PauliOperator) -> PauliOperator:
            return _permuted(_hadamard_image(op, enclosed), order)

        self.measured = [transform(op) for op in self.measured]
        q.x_rep, q.z_rep, q.gauge = transform(q.z_rep), transform(q.x_rep), transform(q.gauge)
        for d in q.defects:
            self.rough_regions[d] = frozenset((i + 1, j + 1) for i, j in self.smooth_regions.pop(d))
        del self.rough_regions[cut_id]
        q.kind = DefectType.ROUGH
        self._reconfigure(self.configuration())

        restore = f"{qid}.h"
        self.create_smooth_qubit(restore, *ancilla)
        self.prepare_logical(restore, PauliKind.X)
        braid = self.braid_cnot(restore, qid)
        m_z = self.measure_logical(qid, PauliKind.Z)
        if m_z < 0:
            self.apply_logical(restore, PauliKind.X)
        self.remove_qubit(qid)
        self._rename(restore, qid)
        return HadamardReport(len(enclosed), m_z, braid)


def hadamard_decomposition(theta: float = np.pi / 4) -> tuple[np.ndarray, bool]:
    """
    R_Z(theta) R_X(theta) R_Z(theta) with angles quoted as exp(-i theta P).

    Returns:
        The product matrix and whether it equals H up to a global phase.
    """
    rz, rx = rz_matrix(2 * theta), rx_matrix(2 * theta)
    m = rz @ rx @ rz
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    return m, equal_up_to_phase(m, h, atol=1e-10)


# qubits 1..9 of the injection fragment are indices 0..8
def _fragment(paulis: dict[int, str], sign: int = 1) -> PauliOperator:
    return PauliOperator.from_mapping(9, {q - 1: p for q, p in paulis.items()}, sign)


_FRAGMENT_INITIAL = [
    _fragment({1: "X", 2: "X", 3: "X", 5: "X"}),
    _fragment({5: "X", 7: "X", 8: "X", 9: "X"}),
    _fragment({2: "Z", 4: "Z", 5: "Z", 7: "Z"}),
    _fragment({3: "Z", 5: "Z", 6: "Z", 8: "Z"}),
    _fragment({4: "Z"}),
    _fragment({6: "Z"}),
    _fragment({1: "Z", 2: "Z"}),
    _fragment({2: "Z", 3: "Z"}),
    _fragment({8: "Z", 9: "Z"}),
]
_FRAGMENT_FINAL = [
    _fragment({1: "X", 2: "X", 3: "X", 7: "X", 8: "X", 9: "X"}),
    _fragment({2: "Z", 4: "Z", 5: "Z", 7: "Z"}),
    _fragment({3: "Z", 5: "Z", 6: "Z", 8: "Z"}),
    _fragment({4: "Z"}),
    _fragment({6: "Z"}),
    _fragment({1: "Z", 2: "Z"}),
    _fragment({2: "Z", 3: "Z"}),
    _fragment({8: "Z", 9: "Z"}),
]
FRAGMENT_LOGICAL_Z = _fragment({5: "Z"})
FRAGMENT_LOGICAL_X = _fragment({1: "X", 2: "X", 3: "X", 5: "X"})


@dataclass
class InjectionResult:
    state: StateVector
    m_x: int
    m_z: int
    expected: StateVector
    tables: dict[str, list[str]]

    @property
    def fidelity(self) -> float:
        return self.state.fidelity(self.expected)


def inject_state(
        alpha: complex,
        beta: complex,
        rng: np.random.Generator | None = None,
        forced: tuple[int | None, int | None] = (None, None),
) -> InjectionResult:
    """
    Non-fault-tolerant injection of alpha|0_L> + beta|1_L> into a nine-qubit fragment.

    Qubit 5 is measured in X, rotated to the requested state, and merged back by measuring
    Z2Z4Z5Z7; both measurements are fixed up with stabilizer-sized corrections.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-10:
        raise StateVectorError(f"amplitudes ({alpha}, {beta}) are not normalised")
    rng = rng if rng is not None else np.random.default_rng()
    state = StateVector.from_stabilizers(_FRAGMENT_INITIAL)
    m_x, state = state.measure_pauli(_fragment({5: "X"}), rng, forced[0])
    if m_x < 0:
        state.apply_pauli(_FRAGMENT_INITIAL[2])
    u = np.array([[alpha, -np.conj(beta)], [beta, np.conj(alpha)]], dtype=complex)
    state.apply_gate(Gate.h(4)).apply_gate(Gate.unitary(4, u))
    m_z, state = state.measure_pauli(_FRAGMENT_INITIAL[2], rng, forced[1])
    if m_z < 0:
        state.apply_pauli(_fragment({5: "X"})).apply_pauli(FRAGMENT_LOGICAL_X)

    zero = StateVector.from_stabilizers(_FRAGMENT_FINAL + [FRAGMENT_LOGICAL_Z])
    one = zero.copy().apply_pauli(FRAGMENT_LOGICAL_X)
    expected = StateVector(alpha * zero.amplitudes + beta * one.amplitudes)
    tables = {
        "alpha": [op.to_label() for op in _FRAGMENT_FINAL + [FRAGMENT_LOGICAL_Z]],
        "beta": [op.to_label() for op in _FRAGMENT_FINAL + [-FRAGMENT_LOGICAL_Z]],
    }
    return InjectionResult(state, m_x, m_z, expected, tables)


# ---- declarative scripts ---------------------------------------------------------------

def _regions(value) -> tuple[list[Coord], list[Coord]]:
    first, second = value
    return [tuple(c) for c in first], [tuple(c) for c in second]


def run_script(text: str) -> list[dict]:
    """
    Runs a YAML script of defect operations.

    The document holds `lattice: {width, height, references, seed}` and a `steps` list; each
    step names its `op` (create_smooth, create_rough, move, braid, cnot, hadamard, measure,
    prepare, apply, remove, reference, expect) and that operation's arguments.

    Returns:
        One record per step that produced a value.
    """
    doc = yaml.safe_load(text) or {}
    layout = doc.get("lattice", {})
    try:
        dl = DefectLattice(
            int(layout["width"]), int(layout["height"]), int(layout.get("references", 0)), seed=layout.get("seed")
        )
    except KeyError as e:
        raise LatticeError(f"script lattice lacks {e}") from e
    record: list[dict] = []
    for k, step in enumerate(doc.get("steps", [])):
        op = step.get("op")
        value = None
        if op == "create_smooth":
            dl.create_smooth_qubit(step["name"], *_regions(step["regions"]))
        elif op == "create_rough":
            dl.create_rough_qubit(step["name"], *_regions(step["regions"]))
        elif op == "move":
            dl.move_defect(step["defect"], [tuple(c) for c in step["to"]])
        elif op == "braid":
            dl.braid_cnot(step["smooth"], step["rough"], bool(step.get("reverse", False)))
        elif op == "cnot":
            report = dl.same_type_cnot(step["control"], step["target"], _regions(step["ancilla"]))
            value = [report.m_x, report.m_z]
        elif op == "hadamard":
            cut = tuple(tuple(c) for c in step["cut"])
            value = dl.transversal_hadamard(step["qubit"], cut, _regions(step["ancilla"])).m_z
        elif op == "measure":
            value = dl.measure_logical(step["qubit"], step["basis"])
        elif op == "prepare":
            dl.prepare_logical(step["qubit"], step["basis"])
        elif op == "apply":
            dl.apply_logical(step["qubit"], step["pauli"])
        elif op == "remove":
            dl.remove_qubit(step["qubit"])
        elif op == "reference":
            value = dl.attach_reference(step["qubit"])
        elif op == "expect":
            value = dl.logical_expectation(step["qubit"], step["basis"])
        else:
            raise LatticeError(f"unknown script operation {op!r} at step {k}")
        if value is not None:
            record.append({"step": k, "op": op, "qubit": step.get("qubit"), "value": value})
    logger.info(f"Script finished after {len(doc.get('steps', []))} steps")
    return record
