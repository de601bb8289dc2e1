import numpy as np
import pandas as pd
import pytest

from surface_app.exceptions import ConfigError, FixtureError, StateVectorError
from surface_app.logic.helpers import magic_lab
from surface_app.logic.helpers.magic_lab import A_STATE, FIXTURE_PATH, PAULI_MATRICES, Y_STATE
from surface_app.logic.helpers.statevector import StateVector, equal_up_to_phase, rx_matrix, rz_matrix
from surface_app.schemas.enums import CodeFamily, PauliKind, RotationAxis


@pytest.fixture(autouse=True)
def isolated_tables(tmp_cache):
    magic_lab.acceptance_table.cache_clear()
    yield
    magic_lab.acceptance_table.cache_clear()


class TestFixture:
    def test_circuits(self):
        circuits = magic_lab.load_circuits()
        steane, rm = circuits[CodeFamily.STEANE], circuits[CodeFamily.REED_MULLER]
        assert (steane.n, len(steane.mx), len(steane.mz)) == (7, 3, 3)
        assert (rm.n, len(rm.mx), len(rm.mz)) == (15, 4, 10)
        assert sorted(steane.readout + (steane.input,)) == list(range(7))
        assert all(op.weight == 4 for op in steane.x_stabilizers())
        assert all(op.weight == 8 for op in rm.x_stabilizers())

    def test_tampered_fixture(self, tmp_path):
        text = FIXTURE_PATH.read_text()
        assert "- cnot 3 4 5 6\n" in text
        path = tmp_path / "circuits.yaml"
        path.write_text(text.replace("- cnot 3 4 5 6\n", "- cnot 3 4 5\n"))
        with pytest.raises(FixtureError):
            magic_lab.load_fixture(path)

    def test_unreadable_fixture(self, tmp_path):
        with pytest.raises(FixtureError):
            magic_lab.load_fixture(tmp_path / "missing.yaml")
        path = tmp_path / "empty.yaml"
        path.write_text("checksum: 0\n")
        with pytest.raises(FixtureError):
            magic_lab.load_fixture(path)


class TestAcceptanceTables:
    def test_steane_table_matches_reference(self):
        table = magic_lab.acceptance_table(CodeFamily.STEANE)
        computed = pd.DataFrame(
            [{"pattern": r.pattern, "correction": r.correction.value} for r in table.rows]
        )
        pd.testing.assert_frame_equal(computed, magic_lab.reference_table())
        assert all(r.probability == pytest.approx(1 / 8) for r in table.rows)
        assert all(r.fidelity == pytest.approx(1.0) for r in table.rows)
        assert {r.output for r in table.rows} == {"|Y>", "Z|Y>"}

    def test_tableau_agrees_with_statevector(self):
        tableau = magic_lab.tableau_table()
        reference = magic_lab.reference_table()
        pd.testing.assert_frame_equal(tableau[["pattern", "correction"]], reference)
        assert tableau["probability"].sum() == pytest.approx(1.0)

    def test_reed_muller_table(self):
        table = magic_lab.acceptance_table(CodeFamily.REED_MULLER)
        assert table.total_probability == pytest.approx(1.0)
        assert all(len(r.pattern) == 14 for r in table.rows)
        assert all(r.fidelity == pytest.approx(1.0) for r in table.rows)

    def test_table_is_cached(self, tmp_cache):
        magic_lab.acceptance_table(CodeFamily.STEANE)
        params = {"code": "steane", "fixture": magic_lab.fixture_checksum()[:16]}
        assert tmp_cache.load_recent("acceptance_table", params)

    def test_table_from_another_fixture_is_ignored(self, tmp_cache):
        stale = {"code": "steane", "rows": []}
        tmp_cache.save_with_cleanup(stale, "acceptance_table", {"code": "steane"})
        tmp_cache.save_with_cleanup(stale, "acceptance_table", {"code": "steane", "fixture": "0" * 16})
        table = magic_lab.acceptance_table(CodeFamily.STEANE)
        assert len(table.rows) == 8
        assert table.total_probability == pytest.approx(1.0)


class TestDistillation:
    def test_perfect_inputs_are_accepted(self, rng):
        for _ in range(10):
            result = magic_lab.distill_y([Y_STATE] * 7, rng)
            assert result.accepted
            assert result.output.fidelity(StateVector(Y_STATE)) == pytest.approx(1.0)

    def test_single_error_is_always_rejected(self):
        for q in range(7):
            accept, wrong = magic_lab.error_response(CodeFamily.STEANE, [q])
            assert accept == pytest.approx(0.0, abs=1e-12)
            assert wrong == 0.0

    def test_flipped_input_is_rejected(self, rng):
        inputs = [Y_STATE] * 7
        inputs[4] = PAULI_MATRICES[PauliKind.Z] @ Y_STATE
        assert not magic_lab.distill_y(inputs, rng).accepted

    def test_y_inputs_see_x_errors_as_z_flips(self):
        circuit = magic_lab.load_circuits()[CodeFamily.STEANE]

        def distribution(pauli: PauliKind) -> np.ndarray:
            inputs = [Y_STATE] * 7
            inputs[2] = PAULI_MATRICES[pauli] @ Y_STATE
            probs, _ = magic_lab.pattern_distribution(circuit, StateVector.product(inputs))
            return probs

        clean, _ = magic_lab.pattern_distribution(circuit, StateVector.product([Y_STATE] * 7))
        np.testing.assert_allclose(distribution(PauliKind.X), distribution(PauliKind.Z), atol=1e-12)
        np.testing.assert_allclose(distribution(PauliKind.Y), clean, atol=1e-12)

    def test_wrong_input_count(self):
        with pytest.raises(StateVectorError):
            magic_lab.distill_a([A_STATE] * 7)

    def test_steane_cubic_coefficient(self):
        frame = magic_lab.exhaustive_responses(CodeFamily.STEANE)
        wrong = frame.groupby("weight")["wrong"].sum()
        assert wrong[1] == pytest.approx(0.0, abs=1e-9)
        assert wrong[2] == pytest.approx(0.0, abs=1e-9)
        assert wrong[3] == pytest.approx(7.0, rel=1e-9)

    def test_scaling_row(self):
        row = magic_lab.error_scaling(CodeFamily.STEANE, 0.01, shots=200, seed=3, workers=1)
        assert row.coefficient == pytest.approx(7.0)
        assert row.exhaustive == pytest.approx(7 * 0.01 ** 3, rel=0.1)
        assert row.mc_sigma > 0
        assert abs(row.mc_estimate - row.exhaustive) <= 3 * row.mc_sigma
        assert 0.85 < row.acceptance_rate < 1.0

    @pytest.mark.slow
    def test_reed_muller_scaling_row(self):
        row = magic_lab.error_scaling(CodeFamily.REED_MULLER, 0.01, shots=500, seed=3, workers=1)
        assert row.coefficient == pytest.approx(35.0)
        assert row.exhaustive == pytest.approx(35 * 0.01 ** 3, rel=0.15)
        assert row.mc_sigma > 0
        assert abs(row.mc_estimate - row.exhaustive) <= 3 * row.mc_sigma

    def test_scaling_rate_limit(self):
        with pytest.raises(ConfigError):
            magic_lab.error_scaling(CodeFamily.STEANE, 0.2)

    def test_scaling_report_csv(self):
        report = magic_lab.scaling_report([CodeFamily.STEANE], [0.005, 0.01], shots=50, seed=1, workers=1)
        lines = report.csv.splitlines()
        assert lines[0] == ",".join(magic_lab.SCALING_COLUMNS)
        assert len(lines) == 3

    @pytest.mark.slow
    def test_reed_muller_cubic_coefficient(self):
        frame = magic_lab.exhaustive_responses(CodeFamily.REED_MULLER)
        wrong = frame.groupby("weight")["wrong"].sum()
        assert wrong[1] == pytest.approx(0.0, abs=1e-9)
        assert wrong[2] == pytest.approx(0.0, abs=1e-9)
        assert wrong[3] == pytest.approx(35.0, rel=1e-9)


class TestRotations:
    @pytest.mark.parametrize("axis, rotation", [(RotationAxis.Z, rz_matrix), (RotationAxis.X, rx_matrix)])
    def test_gadget_outcomes(self, rng, axis, rotation):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        theta = 0.37
        plus = magic_lab.teleported_rotation(psi, theta, axis, forced_outcome=1)
        assert not plus.byproduct
        assert equal_up_to_phase(plus.state.amplitudes, rotation(theta) @ psi, atol=1e-9)
        minus = magic_lab.teleported_rotation(psi, theta, axis, forced_outcome=-1)
        flip = PAULI_MATRICES[PauliKind.X if axis == RotationAxis.Z else PauliKind.Z]
        assert minus.byproduct
        assert equal_up_to_phase(minus.state.amplitudes, flip @ rotation(-theta) @ psi, atol=1e-9)

    @pytest.mark.parametrize("theta", [np.pi / 2, np.pi / 4])
    @pytest.mark.parametrize("axis, rotation", [(RotationAxis.Z, rz_matrix), (RotationAxis.X, rx_matrix)])
    def test_rotate_is_deterministic(self, rng, theta, axis, rotation):
        psi = np.array([0.6, 0.8j])
        for _ in range(20):
            result = magic_lab.rotate(psi, theta, axis, rng)
            assert not result.byproduct
            assert equal_up_to_phase(result.state.amplitudes, rotation(theta) @ psi, atol=1e-9)

    def test_rotate_rejects_other_angles(self):
        with pytest.raises(StateVectorError):
            magic_lab.rotate(np.array([1, 0]), np.pi / 3)

    def test_rotation_needs_normalised_input(self):
        with pytest.raises(StateVectorError):
            magic_lab.teleported_rotation(np.array([1, 1]), np.pi / 4)
