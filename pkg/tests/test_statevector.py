import numpy as np
import pytest

from surface_app.exceptions import StateVectorError
from surface_app.logic.helpers.gates import Gate
from surface_app.logic.helpers.pauli_algebra import PauliOperator, StabilizerTableau
from surface_app.logic.helpers.statevector import (
    MAX_QUBITS,
    StateVector,
    circuit_unitary,
    equal_up_to_phase,
    rx_matrix,
    rz_matrix,
)

P = PauliOperator.from_label
S2 = 1 / np.sqrt(2)


def test_bell_state():
    psi = StateVector.zero(2).apply_gate(Gate.h(0)).apply_gate(Gate.cnot(0, 1))
    np.testing.assert_allclose(psi.amplitudes, [S2, 0, 0, S2], atol=1e-12)
    assert psi.expectation(P("XX")) == pytest.approx(1)
    assert psi.expectation(P("ZZ")) == pytest.approx(1)
    assert psi.expectation(P("YY")) == pytest.approx(-1)


def test_cnot_with_control_after_target():
    psi = StateVector.zero(3).apply_gate(Gate.x(2)).apply_gate(Gate.cnot(2, 0))
    assert abs(psi.amplitudes[0b101]) == pytest.approx(1)


def test_cz_phase():
    psi = StateVector.product([[S2, S2], [S2, S2]]).apply_gate(Gate.cz(0, 1))
    np.testing.assert_allclose(psi.amplitudes, [0.5, 0.5, 0.5, -0.5], atol=1e-12)


def test_rotation_matrices():
    plus = np.array([S2, S2])
    theta = 0.3
    out = rz_matrix(theta) @ plus
    assert equal_up_to_phase(out, np.array([1, np.exp(1j * theta)]) * S2)
    h = np.array([[1, 1], [1, -1]]) * S2
    np.testing.assert_allclose(rx_matrix(theta), h @ rz_matrix(theta) @ h, atol=1e-12)


def test_from_stabilizers():
    psi = StateVector.from_stabilizers([P("XX"), P("-ZZ")])
    expected = np.array([0, S2, S2, 0])
    assert equal_up_to_phase(psi.amplitudes, expected)


def test_measure_pauli_forced_and_impossible():
    psi = StateVector.zero(1)
    outcome, post = psi.measure_pauli(P("X"), forced_outcome=-1)
    assert outcome == -1
    np.testing.assert_allclose(np.abs(post.amplitudes), [S2, S2], atol=1e-12)
    with pytest.raises(StateVectorError):
        psi.measure_pauli(P("Z"), forced_outcome=-1)
    with pytest.raises(StateVectorError):
        psi.measure_pauli(P("X"))


def test_register_errors():
    with pytest.raises(StateVectorError):
        StateVector([1, 0, 0])
    with pytest.raises(StateVectorError):
        StateVector([1, 1])
    with pytest.raises(StateVectorError):
        StateVector.zero(MAX_QUBITS + 1)
    with pytest.raises(StateVectorError):
        StateVector.zero(2).apply_gate(Gate.h(2))
    with pytest.raises(StateVectorError):
        StateVector.zero(2).apply_gate(Gate.cnot(1, 1))


def test_fidelity_ignores_global_phase():
    a = StateVector([S2, 1j * S2])
    b = StateVector([1j * S2, -S2])
    assert a.fidelity(b) == pytest.approx(1)
    assert a.equals_up_to_phase(b)


def test_circuit_unitary_of_swap():
    swap = circuit_unitary([Gate.cnot(0, 1), Gate.cnot(1, 0), Gate.cnot(0, 1)], 2)
    expected = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    np.testing.assert_allclose(swap, expected, atol=1e-12)


def _random_program(rng: np.random.Generator, n: int, length: int):
    names = ["H", "S", "S_DAG", "X", "Y", "Z"]
    steps = []
    for _ in range(length):
        r = rng.random()
        if r < 0.3:
            a, b = (int(v) for v in rng.choice(n, 2, replace=False))
            steps.append(Gate(str(rng.choice(["CNOT", "CZ"])), (a, b)))
        elif r < 0.7:
            steps.append(Gate(str(rng.choice(names)), (int(rng.integers(n)),)))
        else:
            x = rng.integers(2, size=n)
            z = rng.integers(2, size=n)
            if not (x.any() or z.any()):
                z[0] = 1
            steps.append(PauliOperator(x, z, int(rng.choice([1, -1]))))
    return steps


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_tableau_agrees_with_statevector(n, rng):
    """Measurement outcomes and post-states of the tableau match the dense simulation."""
    for _ in range(1000 // 6 + 1):
        tableau = StabilizerTableau.zero_state(n)
        psi = StateVector.zero(n)
        for step in _random_program(rng, n, 12):
            if isinstance(step, Gate):
                tableau.apply_gate(step)
                psi.apply_gate(step)
                continue
            outcome, deterministic = tableau.measure(step, rng)
            if deterministic:
                assert psi.expectation(step) == pytest.approx(outcome, abs=1e-9)
            else:
                assert psi.probability_plus(step) == pytest.approx(0.5, abs=1e-9)
            _, psi = psi.measure_pauli(step, forced_outcome=outcome)
        for g in tableau.generators:
            assert psi.expectation(g) == pytest.approx(1, abs=1e-9)
