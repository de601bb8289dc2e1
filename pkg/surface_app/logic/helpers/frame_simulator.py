"""Pauli-frame Monte Carlo of repeated noisy syndrome extraction."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from storage.interfaces import Cacheable
from surface_app.exceptions import LatticeError, MatchingError, ScheduleError
from surface_app.schemas.enums import FailureType, IdleNoise
from .noise_model import NoiseParams, flip_layer, memory_layer, two_qubit_layer
from .planar_lattice import ExtractionSchedule, PlanarLattice

_PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass
class ErrorFrame:
    """Accumulated Pauli error relative to the ideal codestate."""

    x_err: np.ndarray
    z_err: np.ndarray
    synd_x_err: np.ndarray
    synd_z_err: np.ndarray
    cycle: int = 0

    @classmethod
    def clean(cls, lattice: PlanarLattice) -> ErrorFrame:
        return cls(
            np.zeros(lattice.n_data, dtype=np.uint8),
            np.zeros(lattice.n_data, dtype=np.uint8),
            np.zeros(lattice.n_syndromes, dtype=np.uint8),
            np.zeros(lattice.n_syndromes, dtype=np.uint8),
        )

    def copy(self) -> ErrorFrame:
        return ErrorFrame(
            self.x_err.copy(), self.z_err.copy(), self.synd_x_err.copy(), self.synd_z_err.copy(), self.cycle
        )

    def matches(self, lattice: PlanarLattice) -> bool:
        return (
            self.x_err.size == lattice.n_data
            and self.z_err.size == lattice.n_data
            and self.synd_x_err.size == lattice.n_syndromes
            and self.synd_z_err.size == lattice.n_syndromes
        )


@dataclass(frozen=True)
class SyndromeRecord:
    """Reported stabilizer signs of one cycle, 0 for +1 and 1 for -1."""

    cycle: int
    z_reports: np.ndarray
    x_reports: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, SyndromeRecord):
            return NotImplemented
        return (
            self.cycle == other.cycle
            and np.array_equal(self.z_reports, other.z_reports)
            and np.array_equal(self.x_reports, other.x_reports)
        )

    @property
    def reports(self) -> np.ndarray:
        return np.concatenate([self.z_reports, self.x_reports])


def inject_pauli(frame: ErrorFrame, qubit: int, pauli: str) -> ErrorFrame:
    """XORs a single-qubit Pauli on a data qubit into the frame."""
    if not 0 <= qubit < frame.x_err.size:
        raise LatticeError(f"data qubit {qubit} out of range")
    try:
        bx, bz = _PAULI_BITS[pauli.upper()]
    except KeyError:
        raise LatticeError(f"unknown Pauli {pauli!r}")
    frame.x_err[qubit] ^= bx
    frame.z_err[qubit] ^= bz
    return frame


@dataclass(frozen=True)
class Fault:
    """
    A deterministic error placed at the end of one cycle step.

    `data` and `synd` map qubit indices (syndromes numbered globally, Z-type first) to
    Paulis; `flips` lists syndromes whose report is inverted and only counts at the
    readout step.
    """

    step: int
    data: Mapping[int, str] = field(default_factory=dict)
    synd: Mapping[int, str] = field(default_factory=dict)
    flips: tuple[int, ...] = ()


def _apply_faults(frame: ErrorFrame, faults: Iterable[Fault]) -> None:
    for fault in faults:
        for q, pauli in fault.data.items():
            inject_pauli(frame, q, pauli)
        for s, pauli in fault.synd.items():
            if not 0 <= s < frame.synd_x_err.size:
                raise LatticeError(f"syndrome qubit {s} out of range")
            bx, bz = _PAULI_BITS[pauli.upper()]
            frame.synd_x_err[s] ^= bx
            frame.synd_z_err[s] ^= bz


class FrameSimulator:
    """
    Runs the six-step extraction cycle on an ErrorFrame.

    A CNOT copies X from control to target and Z from target to control; Z-type circuits
    use data as control, X-type circuits use the syndrome as control.
    """

    def __init__(
            self,
            lattice: PlanarLattice,
            schedule: ExtractionSchedule,
            noise: NoiseParams,
            idle_noise: IdleNoise = IdleNoise.ALL,
            readout_idle_noise: bool = True,
    ):
        self.lattice = lattice
        self.schedule = schedule
        self.noise = noise
        self.idle_noise = IdleNoise(idle_noise)
        self.readout_idle_noise = readout_idle_noise
        self.n_z = lattice.n_z

    def _memory(self, frame: ErrorFrame, data_idle: np.ndarray, synd_idle: np.ndarray | None, rng) -> None:
        p_m = self.noise.p_m
        if p_m <= 0.0:
            return
        idx = np.flatnonzero(data_idle)
        ex, ez = memory_layer(p_m, idx.size, rng)
        frame.x_err[idx] ^= ex
        frame.z_err[idx] ^= ez
        if synd_idle is not None and self.idle_noise == IdleNoise.ALL:
            idx = np.flatnonzero(synd_idle)
            ex, ez = memory_layer(p_m, idx.size, rng)
            frame.synd_x_err[idx] ^= ex
            frame.synd_z_err[idx] ^= ez

    def run_cycle(
            self,
            frame: ErrorFrame,
            rng: np.random.Generator | None = None,
            faults: Sequence[Fault] = (),
    ) -> SyndromeRecord:
        """
        One extraction cycle; rng may be None only for a noiseless model.

        `faults` are applied at the end of their step on top of the sampled noise.

        Returns:
            The reported syndromes; frame.cycle is incremented.
        """
        if not frame.matches(self.lattice):
            raise LatticeError("frame dimensions do not match the lattice")
        noisy = not self.noise.is_noiseless
        if noisy and rng is None:
            raise LatticeError("a noisy cycle needs a random source")
        by_step: dict[int, list[Fault]] = {}
        for fault in faults:
            if not 0 <= fault.step < self.schedule.n_steps:
                raise ScheduleError(f"fault at step {fault.step} outside the cycle")
            by_step.setdefault(fault.step, []).append(fault)
        n_z = self.n_z
        n_data = self.lattice.n_data
        all_data = np.ones(n_data, dtype=bool)

        # step 0: Z-type syndromes start in |0>, X-type in |+>
        frame.synd_x_err[:] = 0
        frame.synd_z_err[:] = 0
        if noisy:
            frame.synd_x_err[:n_z] ^= flip_layer(self.noise.p_i, n_z, rng)
            frame.synd_z_err[n_z:] ^= flip_layer(self.noise.p_i, self.lattice.n_x, rng)
            self._memory(frame, all_data, None, rng)
        _apply_faults(frame, by_step.get(0, ()))

        for step, layer in enumerate(self.schedule.layers, start=1):
            zs, zq = layer.z_synd, layer.z_data
            xs, xq = layer.x_synd + n_z, layer.x_data
            frame.synd_x_err[zs] ^= frame.x_err[zq]
            frame.z_err[zq] ^= frame.synd_z_err[zs]
            frame.x_err[xq] ^= frame.synd_x_err[xs]
            frame.synd_z_err[xs] ^= frame.z_err[xq]
            if noisy:
                ax, az, bx, bz = two_qubit_layer(self.noise.p_g, zs.size, rng)
                frame.x_err[zq] ^= ax
                frame.z_err[zq] ^= az
                frame.synd_x_err[zs] ^= bx
                frame.synd_z_err[zs] ^= bz
                ax, az, bx, bz = two_qubit_layer(self.noise.p_g, xs.size, rng)
                frame.synd_x_err[xs] ^= ax
                frame.synd_z_err[xs] ^= az
                frame.x_err[xq] ^= bx
                frame.z_err[xq] ^= bz
                self._memory(frame, ~layer.data_busy, ~layer.synd_busy, rng)
            _apply_faults(frame, by_step.get(step, ()))

        # step 5: readout flips are classical and only touch the report
        z_reports = frame.synd_x_err[:n_z].copy()
        x_reports = frame.synd_z_err[n_z:].copy()
        if noisy:
            z_reports ^= flip_layer(self.noise.p_r, n_z, rng)
            x_reports ^= flip_layer(self.noise.p_r, self.lattice.n_x, rng)
            if self.readout_idle_noise:
                self._memory(frame, all_data, None, rng)
        last = by_step.get(self.schedule.n_steps - 1, ())
        for fault in last:
            for s in fault.flips:
                if s < n_z:
                    z_reports[s] ^= 1
                else:
                    x_reports[s - n_z] ^= 1
        _apply_faults(frame, last)
        frame.cycle += 1
        return SyndromeRecord(frame.cycle, z_reports, x_reports)

    def perfect_cycle(self, frame: ErrorFrame) -> SyndromeRecord:
        """Noiseless extraction cycle used for verification."""
        return FrameSimulator(self.lattice, self.schedule, NoiseParams.noiseless()).run_cycle(frame)


def run_cycle(
        frame: ErrorFrame,
        lattice: PlanarLattice,
        schedule: ExtractionSchedule,
        noise: NoiseParams,
        rng: np.random.Generator | None,
        idle_noise: IdleNoise = IdleNoise.ALL,
        readout_idle_noise: bool = True,
        faults: Sequence[Fault] = (),
) -> SyndromeRecord:
    return FrameSimulator(lattice, schedule, noise, idle_noise, readout_idle_noise).run_cycle(frame, rng, faults)


def perfect_cycle(frame: ErrorFrame, lattice: PlanarLattice, schedule: ExtractionSchedule) -> SyndromeRecord:
    return FrameSimulator(lattice, schedule, NoiseParams.noiseless()).run_cycle(frame)


def detection_events(prev: SyndromeRecord | None, cur: SyndromeRecord) -> list[tuple[int, int]]:
    """
    (stabilizer id, cycle) pairs where the report changed; Z-type ids come first.

    The first record is compared against the all-+1 reference.
    """
    if prev is None:
        if cur.cycle != 1:
            raise MatchingError(f"first record must be cycle 1, got {cur.cycle}")
        changed = cur.reports
    else:
        if cur.cycle != prev.cycle + 1:
            raise MatchingError(f"records {prev.cycle} and {cur.cycle} are not consecutive")
        changed = cur.reports ^ prev.reports
    return [(int(s), cur.cycle) for s in np.flatnonzero(changed)]


def logical_failure(frame: ErrorFrame, lattice: PlanarLattice) -> FailureType | None:
    """
    Odd X parity along the logical-Z line is a logical X; odd Z parity along the
    logical-X line is a logical Z. X is reported when both occurred.
    """
    if np.bitwise_xor.reduce(frame.x_err[list(lattice.logical_z_support)]):
        return FailureType.LOGICAL_X
    if np.bitwise_xor.reduce(frame.z_err[list(lattice.logical_x_support)]):
        return FailureType.LOGICAL_Z
    return None


_TRACE_MAGIC = b"SFTR"
_TRACE_VERSION = 1


@dataclass
class SyndromeTrace(Cacheable):
    """Recorded syndromes of one run together with the parameters that produced them."""

    distance: int
    noise: NoiseParams
    seed: int
    n_z: int
    n_x: int
    records: list[SyndromeRecord] = field(default_factory=list)

    def append(self, record: SyndromeRecord) -> None:
        self.records.append(record)

    def to_bytes(self) -> bytes:
        header = json.dumps({
            "distance": self.distance,
            "noise": self.noise.to_dict(),
            "seed": self.seed,
            "n_z": self.n_z,
            "n_x": self.n_x,
            "cycles": len(self.records),
        }).encode()
        body = b"".join(
            struct.pack("<I", r.cycle) + np.packbits(r.reports).tobytes() for r in self.records
        )
        return _TRACE_MAGIC + struct.pack("<HI", _TRACE_VERSION, len(header)) + header + body

    @classmethod
    def from_bytes(cls, blob: bytes) -> SyndromeTrace:
        if blob[:4] != _TRACE_MAGIC:
            raise MatchingError("not a syndrome trace")
        version, header_len = struct.unpack("<HI", blob[4:10])
        if version != _TRACE_VERSION:
            raise MatchingError(f"unsupported trace version {version}")
        header = json.loads(blob[10:10 + header_len])
        trace = cls(header["distance"], NoiseParams(**header["noise"]), header["seed"], header["n_z"], header["n_x"])
        n_bits = trace.n_z + trace.n_x
        chunk = 4 + (n_bits + 7) // 8
        offset = 10 + header_len
        for _ in range(header["cycles"]):
            cycle = struct.unpack("<I", blob[offset:offset + 4])[0]
            bits = np.unpackbits(np.frombuffer(blob[offset + 4:offset + chunk], dtype=np.uint8))[:n_bits]
            trace.append(SyndromeRecord(cycle, bits[:trace.n_z].copy(), bits[trace.n_z:].copy()))
            offset += chunk
        return trace

    def to_file(self, path: Path, name: str, date: datetime, *args) -> Path:
        path.mkdir(parents=True, exist_ok=True)
        file_path = path / f"{date.strftime('%Y-%m-%d-%H-%M-%S')}_{name}.trace"
        file_path.write_bytes(self.to_bytes())
        return file_path

    @classmethod
    def from_file(cls, file_path: Path) -> SyndromeTrace:
        return cls.from_bytes(Path(file_path).read_bytes())
