import numpy as np
import pytest

from surface_app.exceptions import PauliAlgebraError
from surface_app.logic.helpers.gates import Gate
from surface_app.logic.helpers.pauli_algebra import (
    PauliOperator,
    StabilizerTableau,
    canonical_group,
    commutes,
    conjugate,
    multiply,
    symplectic_rank,
)

P = PauliOperator.from_label


class TestOperators:

    def test_label_round_trip_keeps_sign(self):
        assert P("-XZIY").to_label() == "-XZIY"
        assert P("XX").to_label() == "+XX"
        assert P("−ZZ").sign == -1

    def test_unknown_symbol(self):
        with pytest.raises(PauliAlgebraError):
            P("XQ")

    def test_single_qubit_products(self):
        assert multiply(P("X"), P("X")) == P("I")
        assert multiply(P("Z"), P("Z")) == P("I")
        assert multiply(P("Y"), P("Y")) == P("I")

    def test_commuting_product_sign(self):
        # XZ * ZX = (XZ)(ZX) = (-iY)(iY) = YY
        assert multiply(P("XZ"), P("ZX")) == P("YY")
        assert multiply(P("-XX"), P("ZZ")) == P("YY")

    def test_imaginary_product_rejected(self):
        with pytest.raises(PauliAlgebraError):
            multiply(P("X"), P("Z"))

    def test_size_mismatch(self):
        with pytest.raises(PauliAlgebraError):
            commutes(P("XX"), P("X"))
        with pytest.raises(PauliAlgebraError):
            multiply(P("XX"), P("XXX"))

    def test_commutation(self):
        assert commutes(P("XX"), P("ZZ"))
        assert not commutes(P("XI"), P("ZI"))
        assert commutes(P("XZ"), P("ZX"))
        assert not P("XYZ").commutes(P("ZZZ"))

    def test_support_and_weight(self):
        op = PauliOperator.from_support(5, "Z", [0, 3])
        assert op.support == [0, 3]
        assert op.weight == 2
        assert PauliOperator.identity(4).is_identity()

    def test_key_ignores_sign(self):
        assert P("XZ").key() == P("-XZ").key()
        assert P("XZ") != P("-XZ")


class TestConjugation:

    @pytest.mark.parametrize("gate, before, after", [
        (Gate.h(0), "X", "Z"),
        (Gate.h(0), "Y", "-Y"),
        (Gate.s(0), "X", "Y"),
        (Gate.s(0), "Y", "-X"),
        (Gate.s_dag(0), "X", "-Y"),
        (Gate.x(0), "Z", "-Z"),
        (Gate.z(0), "X", "-X"),
        (Gate.y(0), "Z", "-Z"),
        (Gate.cnot(0, 1), "XI", "XX"),
        (Gate.cnot(0, 1), "IZ", "ZZ"),
        (Gate.cnot(0, 1), "IX", "IX"),
        (Gate.cnot(0, 1), "YY", "-XZ"),
        (Gate.cz(0, 1), "XI", "XZ"),
        (Gate.cz(0, 1), "YI", "YZ"),
    ])
    def test_clifford_images(self, gate, before, after):
        assert conjugate(P(before), gate) == P(after)

    def test_non_clifford_rejected(self):
        with pytest.raises(PauliAlgebraError):
            conjugate(P("X"), Gate.t(0))

    def test_out_of_range(self):
        with pytest.raises(PauliAlgebraError):
            conjugate(P("XX"), Gate.cnot(0, 2))

    def test_pauli_conjugation_flips_anticommuting_generators(self):
        t = StabilizerTableau.from_labels(["ZZII", "IZZI", "IIZZ", "XXXX"])
        t.apply_pauli(P("IXII"))
        assert [g.to_label() for g in t.generators] == ["-ZZII", "-IZZI", "+IIZZ", "+XXXX"]


class TestMeasurement:

    def test_random_measurement_replaces_first_anticommuting_generator(self):
        t = StabilizerTableau.from_labels(["ZZII", "IZZI", "IIZZ", "XXXX"])
        outcome, deterministic = t.measure(P("IIXI"), forced_outcome=-1)
        assert (outcome, deterministic) == (-1, False)
        assert [g.to_label() for g in t.generators] == ["+ZZII", "-IIXI", "+IZIZ", "+XXXX"]

    def test_deterministic_measurement_leaves_tableau(self):
        t = StabilizerTableau.from_labels(["ZI", "-IZ"])
        before = t.to_text()
        assert t.measure(P("ZZ")) == (-1, True)
        assert t.to_text() == before

    def test_forced_outcome_on_deterministic_measurement(self):
        t = StabilizerTableau.zero_state(2)
        with pytest.raises(PauliAlgebraError):
            t.measure(P("ZI"), forced_outcome=1)

    def test_random_measurement_needs_rng(self):
        with pytest.raises(PauliAlgebraError):
            StabilizerTableau.zero_state(1).measure(P("X"))

    def test_expectation(self):
        t = StabilizerTableau.from_labels(["XX", "ZZ"])
        assert t.expectation(P("XX")) == 1
        assert t.expectation(P("YY")) == -1
        assert t.expectation(P("ZI")) == 0

    def test_invalid_tableaus(self):
        with pytest.raises(PauliAlgebraError):
            StabilizerTableau.from_labels(["XI", "ZI"])
        with pytest.raises(PauliAlgebraError):
            StabilizerTableau.from_labels(["ZZ", "ZZ"])
        with pytest.raises(PauliAlgebraError):
            StabilizerTableau.from_labels(["ZZ"])

    def test_text_round_trip(self):
        text = "# bell pair\n+XX\n-ZZ\n"
        t = StabilizerTableau.from_text(text)
        assert t.to_text() == "+XX\n-ZZ\n"


class TestGroups:

    def test_group_equality_ignores_generator_choice(self):
        a = StabilizerTableau.from_labels(["XX", "ZZ"])
        b = StabilizerTableau.from_labels(["-YY", "ZZ"])
        assert a.same_state(b)
        assert not a.same_state(StabilizerTableau.from_labels(["XX", "-ZZ"]))

    def test_reduce_tracks_sign(self):
        group = canonical_group([P("XX"), P("ZZ")])
        assert group.value_of(P("-YY")) == 1
        assert group.value_of(P("XI")) == 0
        assert group.reduce(P("XI")) == P("IX")

    def test_symplectic_rank(self):
        assert symplectic_rank([P("XX"), P("ZZ"), P("YY")]) == 2
        assert symplectic_rank([]) == 0

    def test_permute(self):
        t = StabilizerTableau.from_labels(["XII", "IZI", "IIZ"])
        t.permute({0: 2, 2: 0})
        assert [g.to_label() for g in t.generators] == ["+IIX", "+IZI", "+ZII"]
        with pytest.raises(PauliAlgebraError):
            t.permute({0: 1})

    def test_gates_preserve_validity(self, rng):
        t = StabilizerTableau.zero_state(4)
        names = ["H", "S", "S_DAG", "X", "Z"]
        for _ in range(50):
            if rng.random() < 0.4:
                a, b = rng.choice(4, 2, replace=False)
                t.apply_gate(Gate("CNOT", (int(a), int(b))))
            else:
                t.apply_gate(Gate(str(rng.choice(names)), (int(rng.integers(4)),)))
        assert t.is_valid()
        assert np.all(np.abs(t.signs) == 1)
