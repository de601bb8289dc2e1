"""Dense complex-amplitude simulator used as an oracle and for non-stabilizer states."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from surface_app.exceptions import StateVectorError
from .gates import Gate
from .pauli_algebra import PauliOperator

MAX_QUBITS = 20
NORM_TOLERANCE = 1e-10

_SQRT_HALF = 1 / np.sqrt(2)
_FIXED = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "S_DAG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "T_DAG": np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
}


def rz_matrix(theta: float) -> np.ndarray:
    """Z rotation taking |+> to (|0> + e^{i theta}|1>)/sqrt(2), written as exp(-i theta Z / 2)."""
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


def rx_matrix(theta: float) -> np.ndarray:
    """X rotation exp(-i theta X / 2), the Hadamard conjugate of rz_matrix."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def single_qubit_matrix(gate: Gate) -> np.ndarray:
    if gate.name in _FIXED:
        return _FIXED[gate.name]
    if gate.name == "RZ":
        return rz_matrix(gate.theta)
    if gate.name == "RX":
        return rx_matrix(gate.theta)
    if gate.name == "U":
        if gate.matrix is None or gate.matrix.shape != (2, 2):
            raise StateVectorError("U gate needs a 2x2 matrix")
        return gate.matrix
    raise StateVectorError(f"{gate.name} is not a single-qubit gate")


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = NORM_TOLERANCE) -> bool:
    """Compares two vectors or matrices up to a global phase."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < atol:
        return bool(np.allclose(a, 0, atol=atol))
    phase = a[k] / b[k]
    if not np.isclose(abs(phase), 1, atol=1e-8):
        return False
    return bool(np.max(np.abs(a - phase * b)) <= atol)


class StateVector:
    """
    A normalised n-qubit pure state; qubit 0 is the most significant tensor factor.

    Global phase is not normalised.
    """

    def __init__(self, amplitudes: Sequence[complex] | np.ndarray, check_norm: bool = True):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or 2 ** n != amps.size:
            raise StateVectorError(f"{amps.size} amplitudes do not describe a qubit register")
        if n > MAX_QUBITS:
            raise StateVectorError(f"{n} qubits exceed the cap of {MAX_QUBITS}")
        if check_norm and abs(np.vdot(amps, amps).real - 1) > NORM_TOLERANCE:
            raise StateVectorError("amplitudes are not normalised")
        self.n = n
        self.amplitudes = amps

    @classmethod
    def zero(cls, n: int) -> StateVector:
        if not 1 <= n <= MAX_QUBITS:
            raise StateVectorError(f"{n} qubits outside 1..{MAX_QUBITS}")
        amps = np.zeros(2 ** n, dtype=complex)
        amps[0] = 1
        return cls(amps)

    @classmethod
    def product(cls, single_states: Sequence[Sequence[complex]]) -> StateVector:
        """Tensor product of normalised single-qubit states."""
        amps = np.array([1], dtype=complex)
        for s in single_states:
            v = np.asarray(s, dtype=complex)
            v = v / np.linalg.norm(v)
            amps = np.kron(amps, v)
        return cls(amps)

    @classmethod
    def from_stabilizers(cls, generators: Sequence[PauliOperator]) -> StateVector:
        """The +1 eigenstate of n independent commuting generators."""
        n = generators[0].n
        for start in range(2 ** n):
            amps = np.zeros(2 ** n, dtype=complex)
            amps[start] = 1
            state = cls(amps)
            for g in generators:
                state.amplitudes = 0.5 * (state.amplitudes + state._pauli_image(g))
            norm = np.linalg.norm(state.amplitudes)
            if norm > 1e-6:
                state.amplitudes /= norm
                return state
        raise StateVectorError("generators have no common +1 eigenstate")

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy(), check_norm=False)

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    def _check_qubits(self, qubits: Sequence[int]) -> None:
        for q in qubits:
            if not 0 <= q < self.n:
                raise StateVectorError(f"qubit {q} out of range for {self.n} qubits")
        if len(set(qubits)) != len(qubits):
            raise StateVectorError(f"repeated qubit in {qubits}")

    def apply_matrix(self, matrix: np.ndarray, qubits: Sequence[int]) -> StateVector:
        """Applies a 2^k x 2^k unitary to the listed qubits in place."""
        self._check_qubits(qubits)
        k = len(qubits)
        op = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
        psi = np.tensordot(op, self._tensor(), axes=(list(range(k, 2 * k)), list(qubits)))
        psi = np.moveaxis(psi, list(range(k)), list(qubits))
        self.amplitudes = psi.reshape(-1)
        return self

    def apply_gate(self, gate: Gate) -> StateVector:
        if gate.name == "CNOT":
            c, t = gate.qubits
            self._check_qubits((c, t))
            psi = self._tensor().copy()
            idx = [slice(None)] * self.n
            idx[c] = 1
            sub = psi[tuple(idx)]
            axis = t - 1 if t > c else t
            psi[tuple(idx)] = np.flip(sub, axis=axis)
            self.amplitudes = psi.reshape(-1)
            return self
        if gate.name == "CZ":
            a, b = gate.qubits
            self._check_qubits((a, b))
            psi = self._tensor().copy()
            idx = [slice(None)] * self.n
            idx[a] = 1
            idx[b] = 1
            psi[tuple(idx)] *= -1
            self.amplitudes = psi.reshape(-1)
            return self
        return self.apply_matrix(single_qubit_matrix(gate), gate.qubits)

    def apply_circuit(self, gates: Sequence[Gate]) -> StateVector:
        for g in gates:
            self.apply_gate(g)
        return self

    def _pauli_image(self, op: PauliOperator) -> np.ndarray:
        """Amplitudes of op|psi> including the operator sign."""
        if op.n != self.n:
            raise StateVectorError(f"operator on {op.n} qubits applied to {self.n} qubits")
        psi = self._tensor().copy()
        for q in op.support:
            kind = op.pauli_at(q)
            psi = np.moveaxis(np.tensordot(_FIXED[kind], psi, axes=([1], [q])), 0, q)
        return op.sign * psi.reshape(-1)

    def apply_pauli(self, op: PauliOperator) -> StateVector:
        self.amplitudes = self._pauli_image(op)
        return self

    def expectation(self, op: PauliOperator) -> float:
        return float(np.vdot(self.amplitudes, self._pauli_image(op)).real)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probability_plus(self, op: PauliOperator) -> float:
        return float(np.clip((1 + self.expectation(op)) / 2, 0, 1))

    def measure_pauli(
            self,
            op: PauliOperator,
            rng: np.random.Generator | None = None,
            forced_outcome: int | None = None,
    ) -> tuple[int, StateVector]:
        """
        Projects with (1 +- op)/2 and renormalises.

        Returns:
            (outcome, post-measurement state); self is left untouched.
        """
        image = self._pauli_image(op)
        p_plus = float(np.clip((1 + np.vdot(self.amplitudes, image).real) / 2, 0, 1))
        if forced_outcome is not None:
            outcome = forced_outcome
            prob = p_plus if outcome == 1 else 1 - p_plus
            if prob < NORM_TOLERANCE:
                raise StateVectorError(f"outcome {outcome} of {op.to_label()} has zero probability")
        else:
            if rng is None:
                raise StateVectorError("measurement requires a random source")
            outcome = 1 if rng.random() < p_plus else -1
        projected = 0.5 * (self.amplitudes + outcome * image)
        projected /= np.linalg.norm(projected)
        return outcome, StateVector(projected, check_norm=False)

    def fidelity(self, other: StateVector) -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def equals_up_to_phase(self, other: StateVector, atol: float = NORM_TOLERANCE) -> bool:
        return equal_up_to_phase(self.amplitudes, other.amplitudes, atol)


def circuit_unitary(gates: Sequence[Gate], n: int) -> np.ndarray:
    """Dense unitary of a gate list, built column by column."""
    columns = []
    for basis in range(2 ** n):
        amps = np.zeros(2 ** n, dtype=complex)
        amps[basis] = 1
        columns.append(StateVector(amps).apply_circuit(gates).amplitudes)
    return np.array(columns).T
