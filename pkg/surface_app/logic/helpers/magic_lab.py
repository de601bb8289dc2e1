"""
Distillation of |Y> and |A> states and teleported rotations, on the statevector backend.

Both distillation circuits are the encoders of the 7-qubit Steane and 15-qubit Reed-Muller
codes run backwards. The gate lists live in fixtures/distillation_circuits.yaml.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
import yaml
from loguru import logger
from pandarallel import pandarallel

from storage.caching import caching_service
from surface_app.config import config
from surface_app.exceptions import ConfigError, FixtureError, StateVectorError
from surface_app.schemas.distillation import OutcomeRow, OutcomeTable, ScalingReport, ScalingRow
from surface_app.schemas.enums import CodeFamily, PauliKind, RotationAxis
from .gates import Gate
from .pauli_algebra import PauliOperator, StabilizerTableau
from .statevector import NORM_TOLERANCE, StateVector, single_qubit_matrix

pandarallel.initialize(progress_bar=False, nb_workers=config.get_int("NB_WORKERS", 4), verbose=0)

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "fixtures" / "distillation_circuits.yaml"
ACCEPT_TOLERANCE = 1e-12
WRONG_TOLERANCE = 1e-9
MAX_SCALING_P = 0.05
SCALING_COLUMNS = ["code", "p", "coefficient", "mc_estimate", "mc_sigma", "acceptance_rate"]

Y_STATE = np.array([1, 1j], dtype=complex) / np.sqrt(2)
A_STATE = np.array([1, np.exp(1j * np.pi / 4)], dtype=complex) / np.sqrt(2)
PAULI_MATRICES = {k: single_qubit_matrix(Gate(k.value, (0,))) for k in PauliKind}
_H = single_qubit_matrix(Gate.h(0))


@dataclass(frozen=True)
class DistillationCircuit:
    code: CodeFamily
    n: int
    input: int
    mx: tuple[int, ...]
    mz: tuple[int, ...]
    encoder: tuple[Gate, ...]

    @property
    def decoder(self) -> tuple[Gate, ...]:
        # every gate used is its own inverse
        return tuple(reversed(self.encoder))

    @property
    def readout(self) -> tuple[int, ...]:
        return self.mx + self.mz

    def x_stabilizers(self) -> list[PauliOperator]:
        """X on each Hadamard qubit and the targets it fans out to."""
        gens = []
        for gate in self.encoder:
            if gate.name != "H":
                continue
            q = gate.qubits[0]
            support = {q} | {g.qubits[1] for g in self.encoder if g.name == "CNOT" and g.qubits[0] == q}
            gens.append(PauliOperator.from_support(self.n, "X", sorted(support)))
        return gens


def _canonical_text(codes: dict) -> str:
    lines = []
    for name in sorted(codes):
        spec = codes[name]
        lines += [
            f"{name}:qubits {spec['qubits']}",
            f"{name}:input {spec['input']}",
            f"{name}:mx " + " ".join(str(q) for q in spec["mx"]),
            f"{name}:mz " + " ".join(str(q) for q in spec["mz"]),
        ]
        lines += [f"{name}:" + " ".join(str(line).split()) for line in spec["encoder"]]
    return "\n".join(lines)


def _parse_gates(lines: Sequence[str], n: int) -> tuple[Gate, ...]:
    gates = []
    for line in lines:
        name, *args = str(line).split()
        try:
            qubits = [int(a) for a in args]
        except ValueError as e:
            raise FixtureError(f"bad qubit index in {line!r}") from e
        if any(not 0 <= q < n for q in qubits):
            raise FixtureError(f"qubit index out of range in {line!r}")
        if name == "h" and len(qubits) == 1:
            gates.append(Gate.h(qubits[0]))
        elif name == "cnot" and len(qubits) >= 2:
            gates += [Gate.cnot(qubits[0], t) for t in qubits[1:]]
        else:
            raise FixtureError(f"unknown gate line {line!r}")
    return tuple(gates)


def load_fixture(path: Path | None = None) -> dict:
    path = path or FIXTURE_PATH
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as e:
        raise FixtureError(f"cannot read {path}: {e}") from e
    if not isinstance(doc, dict) or "codes" not in doc:
        raise FixtureError(f"{path} has no codes section")
    digest = hashlib.sha256(_canonical_text(doc["codes"]).encode("utf-8")).hexdigest()
    if digest != doc.get("checksum"):
        raise FixtureError(f"checksum mismatch in {path.name}")
    return doc


@lru_cache(maxsize=4)
def load_circuits(path: Path | None = None) -> dict[CodeFamily, DistillationCircuit]:
    circuits = {}
    for name, spec in load_fixture(path)["codes"].items():
        code = CodeFamily(name)
        n = int(spec["qubits"])
        circuits[code] = DistillationCircuit(
            code=code,
            n=n,
            input=int(spec["input"]),
            mx=tuple(int(q) for q in spec["mx"]),
            mz=tuple(int(q) for q in spec["mz"]),
            encoder=_parse_gates(spec["encoder"], n),
        )
    return circuits


def fixture_checksum() -> str:
    return load_fixture()["checksum"]


def reference_table() -> pd.DataFrame:
    """The |Y> outcome table as transcribed in the fixture."""
    return pd.DataFrame(load_fixture()["steane_reference_table"], columns=["pattern", "correction"])


def ideal_state(code: CodeFamily) -> np.ndarray:
    return Y_STATE if CodeFamily(code) == CodeFamily.STEANE else A_STATE


def _output_label(code: CodeFamily, correction: PauliKind) -> str:
    name = "|Y>" if CodeFamily(code) == CodeFamily.STEANE else "|A>"
    return name if correction == PauliKind.I else f"{correction.value}{name}"


# ---- encoding ---------------------------------------------------------------------------

def encode(circuit: DistillationCircuit, psi: Sequence[complex]) -> StateVector:
    """Encodes a single-qubit state; every other qubit starts in |0>."""
    singles = [np.array([1, 0], dtype=complex)] * circuit.n
    singles[circuit.input] = np.asarray(psi, dtype=complex)
    return StateVector.product(singles).apply_circuit(circuit.encoder)


def decode(circuit: DistillationCircuit, state: StateVector) -> StateVector:
    if state.n != circuit.n:
        raise StateVectorError(f"{state.n}-qubit state given to a {circuit.n}-qubit decoder")
    return state.copy().apply_circuit(circuit.decoder)


def pattern_distribution(circuit: DistillationCircuit, inputs: StateVector) -> tuple[np.ndarray, np.ndarray]:
    """
    Decodes and reads out every non-input qubit.

    Returns:
        (probability per pattern, unnormalised output amplitudes per pattern); pattern r is
        the binary expansion of r over `circuit.readout`, bit 1 meaning outcome -1.
    """
    amps = decode(circuit, inputs).amplitudes.reshape((2,) * circuit.n)
    order = list(circuit.readout) + [circuit.input]
    outputs = amps.transpose(order).reshape(2 ** (circuit.n - 1), 2)
    probs = np.sum(np.abs(outputs) ** 2, axis=1)
    return probs, outputs


def pattern_label(circuit: DistillationCircuit, r: int) -> str:
    return format(r, f"0{circuit.n - 1}b")


def nearest_pauli(output: np.ndarray, ideal: np.ndarray) -> tuple[PauliKind, float]:
    """Pauli that brings output closest to ideal, with the resulting fidelity."""
    output = output / np.linalg.norm(output)
    best, best_fidelity = PauliKind.I, -1.0
    # Z before X: on |Y> the two differ by a stabilizer and Z is the conventional fix
    for kind in (PauliKind.I, PauliKind.Z, PauliKind.X, PauliKind.Y):
        fidelity = float(abs(np.vdot(ideal, PAULI_MATRICES[kind] @ output)) ** 2)
        if fidelity > best_fidelity + WRONG_TOLERANCE:
            best, best_fidelity = kind, fidelity
    return best, best_fidelity


# ---- acceptance tables ------------------------------------------------------------------

def _compute_table(code: CodeFamily) -> OutcomeTable:
    circuit = load_circuits()[code]
    ideal = ideal_state(code)
    probs, outputs = pattern_distribution(circuit, StateVector.product([ideal] * circuit.n))
    rows = []
    for r in np.flatnonzero(probs > ACCEPT_TOLERANCE):
        correction, fidelity = nearest_pauli(outputs[r], ideal)
        rows.append(OutcomeRow(
            pattern=pattern_label(circuit, int(r)),
            probability=float(probs[r]),
            correction=correction,
            output=_output_label(code, correction),
            fidelity=min(fidelity, 1.0),
        ))
    return OutcomeTable(code=code, rows=rows)


@lru_cache(maxsize=4)
def acceptance_table(code: CodeFamily) -> OutcomeTable:
    """
    Patterns seen with perfect inputs, their probabilities and output corrections.

    Generated once per code and kept in the disk cache under the fixture checksum.
    """
    code = CodeFamily(code)
    params = {"code": code.value, "fixture": fixture_checksum()[:16]}
    cached = caching_service.load_recent("acceptance_table", params)
    if cached:
        return OutcomeTable.model_validate(cached)
    table = _compute_table(code)
    caching_service.save_with_cleanup(table.model_dump(mode="json"), "acceptance_table", params)
    logger.info(f"Generated {code.value} acceptance table with {len(table.rows)} patterns")
    return table


def tableau_table() -> pd.DataFrame:
    """
    The |Y> outcome table recomputed on the stabilizer tableau.

    Returns:
        DataFrame with columns pattern, probability, correction.
    """
    circuit = load_circuits()[CodeFamily.STEANE]
    n = circuit.n
    start = StabilizerTableau([PauliOperator.from_mapping(n, {q: "Y"}) for q in range(n)])
    for gate in circuit.decoder:
        start.apply_gate(gate)
    y_out = PauliOperator.from_mapping(n, {circuit.input: "Y"})
    rows = []
    for bits in itertools.product((0, 1), repeat=len(circuit.readout)):
        tableau = start.copy()
        n_random, possible = 0, True
        for q, bit in zip(circuit.readout, bits):
            op = PauliOperator.from_mapping(n, {q: "Z"})
            target = -1 if bit else 1
            value = tableau.expectation(op)
            if value == 0:
                tableau.measure(op, forced_outcome=target)
                n_random += 1
            elif value != target:
                possible = False
                break
        if not possible:
            continue
        sign = tableau.expectation(y_out)
        rows.append({
            "pattern": "".join(str(b) for b in bits),
            "probability": 2.0 ** -n_random,
            "correction": PauliKind.I.value if sign > 0 else PauliKind.Z.value,
        })
    return pd.DataFrame(rows, columns=["pattern", "probability", "correction"])


# ---- distillation -----------------------------------------------------------------------

@dataclass
class DistillationResult:
    accepted: bool
    pattern: str
    output: StateVector | None = None
    correction: PauliKind | None = None


def distill(
        code: CodeFamily, inputs: Sequence[Sequence[complex]], rng: np.random.Generator | None = None
) -> DistillationResult:
    """
    Runs the distillation circuit on the given single-qubit inputs and samples a pattern.

    Patterns outside the acceptance table reject the output; rejection is a normal result.
    """
    code = CodeFamily(code)
    circuit = load_circuits()[code]
    if len(inputs) != circuit.n:
        raise StateVectorError(f"{code.value} distillation takes {circuit.n} inputs, got {len(inputs)}")
    rng = rng if rng is not None else np.random.default_rng()
    probs, outputs = pattern_distribution(circuit, StateVector.product(inputs))
    r = int(rng.choice(probs.size, p=probs / probs.sum()))
    pattern = pattern_label(circuit, r)
    corrections = {row.pattern: row.correction for row in acceptance_table(code).rows}
    if pattern not in corrections:
        return DistillationResult(False, pattern)
    correction = corrections[pattern]
    out = PAULI_MATRICES[correction] @ outputs[r]
    return DistillationResult(True, pattern, StateVector(out / np.linalg.norm(out)), correction)


def distill_y(inputs: Sequence[Sequence[complex]], rng: np.random.Generator | None = None) -> DistillationResult:
    return distill(CodeFamily.STEANE, inputs, rng)


def distill_a(inputs: Sequence[Sequence[complex]], rng: np.random.Generator | None = None) -> DistillationResult:
    return distill(CodeFamily.REED_MULLER, inputs, rng)


# ---- error scaling ----------------------------------------------------------------------

def error_response(code: CodeFamily, errors: Sequence[int]) -> tuple[float, float]:
    """
    Feeds ideal inputs with Z errors on the listed qubits through the circuit.

    Returns:
        (acceptance probability, probability of an accepted output that is wrong after correction)
    """
    code = CodeFamily(code)
    circuit = load_circuits()[code]
    ideal = ideal_state(code)
    z = PAULI_MATRICES[PauliKind.Z]
    flipped = set(errors)
    singles = [z @ ideal if q in flipped else ideal for q in range(circuit.n)]
    probs, outputs = pattern_distribution(circuit, StateVector.product(singles))
    p_accept = p_wrong = 0.0
    for row in acceptance_table(code).rows:
        r = int(row.pattern, 2)
        if probs[r] <= ACCEPT_TOLERANCE:
            continue
        p_accept += probs[r]
        out = PAULI_MATRICES[row.correction] @ outputs[r]
        infidelity = 1 - abs(np.vdot(ideal, out / np.linalg.norm(out))) ** 2
        if infidelity > WRONG_TOLERANCE:
            p_wrong += probs[r] * infidelity
    return float(p_accept), float(p_wrong)


def _response_frame(code: CodeFamily, patterns: list[tuple[int, ...]], workers: int) -> pd.DataFrame:
    frame = pd.DataFrame({"errors": patterns})

    def run(row: pd.Series) -> pd.Series:
        accept, wrong = error_response(code, row["errors"])
        return pd.Series({"accept": accept, "wrong": wrong})

    responses = frame.parallel_apply(run, axis=1) if workers > 1 else frame.apply(run, axis=1)
    return pd.concat([frame, responses], axis=1)


def _weight_probability(n: int, w: int, p: float) -> float:
    return comb(n, w) * p ** w * (1 - p) ** (n - w)


def exhaustive_responses(code: CodeFamily, max_weight: int = 3, workers: int = 1) -> pd.DataFrame:
    """Every Z-error pattern up to max_weight with its acceptance and wrong-output probabilities."""
    n = load_circuits()[CodeFamily(code)].n
    patterns = [e for w in range(max_weight + 1) for e in itertools.combinations(range(n), w)]
    frame = _response_frame(code, patterns, workers)
    frame["weight"] = frame["errors"].map(len)
    return frame


def error_scaling(
        code: CodeFamily, p: float, shots: int = 2000, seed: int = 0, workers: int | None = None
) -> ScalingRow:
    """
    Output error probability of a distillation round with each input flipped by Z with probability p.

    Z flips cover X, Y and Z input errors. On |Y> an X error equals Z up to phase and a Y error
    does nothing, so depolarising noise at rate q is a Z flip at 2q/3. On |A> twirling with the
    Clifford that fixes |A> makes any Pauli error diagonal in the {|A>, Z|A>} basis.

    The exhaustive value sums all error patterns of weight <= 3; its cubic coefficient is the
    leading one whenever weights 1 and 2 never yield a wrong accepted output. The Monte Carlo
    cross-check samples `shots` patterns per weight 1..4 and weights them binomially.
    """
    code = CodeFamily(code)
    if not 0 <= p <= MAX_SCALING_P:
        raise ConfigError(f"p={p} is outside the leading-order range [0, {MAX_SCALING_P}]")
    workers = workers or config.get_int("NB_WORKERS", 1)
    n = load_circuits()[code].n
    frame = exhaustive_responses(code, 3, workers)
    by_weight = frame.groupby("weight")
    wrong_sum = by_weight["wrong"].sum()
    coefficient = float(wrong_sum.get(3, 0.0))
    if wrong_sum.get(1, 0.0) > WRONG_TOLERANCE or wrong_sum.get(2, 0.0) > WRONG_TOLERANCE:
        logger.warning(f"{code.value}: low-weight errors reach the output, cubic coefficient is not leading")
    exhaustive = float(sum(p ** w * (1 - p) ** (n - w) * wrong_sum.get(w, 0.0) for w in range(4)))

    rng = np.random.default_rng(seed)
    estimate, variance = 0.0, 0.0
    acceptance = _weight_probability(n, 0, p)
    for w in range(1, 5):
        samples = [tuple(sorted(rng.choice(n, size=w, replace=False).tolist())) for _ in range(shots)]
        unique = sorted(set(samples))
        responses = _response_frame(code, unique, workers)
        lookup = dict(zip(responses["errors"], zip(responses["accept"], responses["wrong"])))
        accept = np.array([lookup[s][0] for s in samples])
        wrong = np.array([lookup[s][1] for s in samples])
        weight_p = _weight_probability(n, w, p)
        estimate += weight_p * wrong.mean()
        variance += weight_p ** 2 * wrong.var(ddof=1) / shots if shots > 1 else 0.0
        acceptance += weight_p * accept.mean()
    logger.info(f"{code.value} p={p:.3g}: coefficient {coefficient:.4g}, exhaustive {exhaustive:.3e}, MC {estimate:.3e}")
    return ScalingRow(
        code=code,
        p=p,
        coefficient=coefficient,
        exhaustive=exhaustive,
        mc_estimate=float(estimate),
        mc_sigma=float(np.sqrt(variance)),
        acceptance_rate=float(acceptance),
    )


def scaling_report(
        codes: Sequence[CodeFamily], ps: Sequence[float], shots: int = 2000, seed: int = 0, workers: int | None = None
) -> ScalingReport:
    rows = [error_scaling(code, p, shots, seed, workers) for code in codes for p in ps]
    frame = pd.DataFrame([row.model_dump(mode="json") for row in rows], columns=SCALING_COLUMNS)
    logger.success(f"Scaling report with {len(rows)} rows")
    return ScalingReport(rows=rows, csv=frame.to_csv(index=False))


# ---- teleported rotations ---------------------------------------------------------------

def rotation_ancilla(theta: float) -> np.ndarray:
    return np.array([1, np.exp(1j * theta)], dtype=complex) / np.sqrt(2)


@dataclass
class RotationResult:
    state: StateVector
    byproduct: bool
    outcomes: list[int]


def _as_qubit(psi) -> np.ndarray:
    vec = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)
    if vec.shape != (2,) or abs(np.vdot(vec, vec).real - 1) > NORM_TOLERANCE:
        raise StateVectorError("rotation input must be a normalised single-qubit state")
    return vec


def teleported_rotation(
        psi,
        theta: float,
        axis: RotationAxis = RotationAxis.Z,
        rng: np.random.Generator | None = None,
        ancilla: Sequence[complex] | None = None,
        forced_outcome: int | None = None,
) -> RotationResult:
    """
    One gadget: CNOT from the ancilla onto the data, Z readout of the data.

    The output lives on the ancilla and equals R(theta)|psi> on +1, X R_Z(-theta)|psi>
    (Z R_X(-theta)|psi> for the X axis) on -1.
    """
    vec = _as_qubit(psi)
    anc = rotation_ancilla(theta) if ancilla is None else np.asarray(ancilla, dtype=complex)
    if anc.shape != (2,) or abs(np.vdot(anc, anc).real - 1) > NORM_TOLERANCE:
        raise StateVectorError("rotation ancilla is not a normalised single-qubit state")
    axis = RotationAxis(axis)
    data = vec if axis == RotationAxis.Z else _H @ vec
    state = StateVector(np.kron(data, anc)).apply_gate(Gate.cnot(1, 0))
    rng = rng if rng is not None else np.random.default_rng()
    m, post = state.measure_pauli(PauliOperator.from_label("ZI"), rng, forced_outcome)
    out = post.amplitudes.reshape(2, 2)[0 if m > 0 else 1]
    out = out / np.linalg.norm(out)
    if axis == RotationAxis.X:
        out = _H @ out
    return RotationResult(StateVector(out), m < 0, [m])


def rotate(
        psi, theta: float, axis: RotationAxis = RotationAxis.Z, rng: np.random.Generator | None = None
) -> RotationResult:
    """
    Deterministic R(theta) for theta = pi/2 or pi/4 by chaining gadgets.

    A failed pi/2 attempt is fixed with Pauli gates; a failed pi/4 attempt is undone to
    R(-pi/4) and followed by a pi/2 attempt.
    """
    axis = RotationAxis(axis)
    flip, phase = (PAULI_MATRICES[PauliKind.X], PAULI_MATRICES[PauliKind.Z])
    if axis == RotationAxis.X:
        flip, phase = phase, flip
    if np.isclose(theta, np.pi / 2):
        result = teleported_rotation(psi, theta, axis, rng)
        if result.byproduct:
            fixed = phase @ (flip @ result.state.amplitudes)
            return RotationResult(StateVector(fixed), False, result.outcomes)
        return result
    if np.isclose(theta, np.pi / 4):
        result = teleported_rotation(psi, theta, axis, rng)
        if not result.byproduct:
            return result
        undone = flip @ result.state.amplitudes
        follow = rotate(undone, np.pi / 2, axis, rng)
        return RotationResult(follow.state, False, result.outcomes + follow.outcomes)
    raise StateVectorError(f"no deterministic chain for theta={theta}")
