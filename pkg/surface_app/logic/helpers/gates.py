"""Gate descriptions shared by the tableau and statevector backends."""

from dataclasses import dataclass, field

import numpy as np

CLIFFORD_GATES = frozenset({"I", "X", "Y", "Z", "H", "S", "S_DAG", "CNOT", "CZ"})
ROTATION_GATES = frozenset({"T", "T_DAG", "RZ", "RX", "U"})
TWO_QUBIT_GATES = frozenset({"CNOT", "CZ"})


@dataclass(frozen=True)
class Gate:
    """
    A named gate acting on explicit qubit indices.

    `theta` parametrises RZ and RX, `matrix` carries an arbitrary single-qubit unitary for U.
    For CNOT the first qubit is the control.
    """

    name: str
    qubits: tuple[int, ...]
    theta: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    @property
    def is_clifford(self) -> bool:
        return self.name in CLIFFORD_GATES

    @classmethod
    def x(cls, q: int) -> "Gate":
        return cls("X", (q,))

    @classmethod
    def y(cls, q: int) -> "Gate":
        return cls("Y", (q,))

    @classmethod
    def z(cls, q: int) -> "Gate":
        return cls("Z", (q,))

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls("H", (q,))

    @classmethod
    def s(cls, q: int) -> "Gate":
        return cls("S", (q,))

    @classmethod
    def s_dag(cls, q: int) -> "Gate":
        return cls("S_DAG", (q,))

    @classmethod
    def t(cls, q: int) -> "Gate":
        return cls("T", (q,))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("CNOT", (control, target))

    @classmethod
    def cz(cls, a: int, b: int) -> "Gate":
        return cls("CZ", (a, b))

    @classmethod
    def rz(cls, q: int, theta: float) -> "Gate":
        return cls("RZ", (q,), theta=theta)

    @classmethod
    def rx(cls, q: int, theta: float) -> "Gate":
        return cls("RX", (q,), theta=theta)

    @classmethod
    def unitary(cls, q: int, matrix: np.ndarray) -> "Gate":
        return cls("U", (q,), matrix=np.asarray(matrix, dtype=complex))
