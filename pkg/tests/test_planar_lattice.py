import dataclasses

import numpy as np
import pytest

from surface_app.exceptions import LatticeError, ScheduleError
from surface_app.logic.helpers.planar_lattice import (
    build_all_smooth_lattice,
    build_lattice,
    build_schedule,
    dump,
    logical_operators,
    stabilizer_operators,
    validate_schedule,
)
from surface_app.schemas.enums import BoundaryType, LatticeVariant


@pytest.mark.parametrize("d", [2, 3, 5, 7])
def test_mixed_lattice_counts(d):
    lattice = build_lattice(d)
    assert lattice.n_data == d * d + (d - 1) * (d - 1)
    assert lattice.n_z == lattice.n_x == d * (d - 1)
    assert lattice.distance == d
    assert len(lattice.logical_z_support) == len(lattice.logical_x_support) == d


def test_mixed_lattice_boundaries_and_logicals():
    lattice = build_lattice(3)
    assert lattice.boundary_types["left"] == BoundaryType.ROUGH
    assert lattice.boundary_types["top"] == BoundaryType.SMOOTH
    z_l, x_l = logical_operators(lattice)
    assert all(z_l.commutes(s) and x_l.commutes(s) for s in stabilizer_operators(lattice))
    assert not z_l.commutes(x_l)


@pytest.mark.parametrize("d", [0, 1, 2.5, "3"])
def test_bad_distance(d):
    with pytest.raises(LatticeError):
        build_lattice(d)


def test_all_smooth_two_by_two_matches_published_list():
    lattice = build_all_smooth_lattice(2, 2)
    assert lattice.variant == LatticeVariant.ALL_SMOOTH
    assert lattice.n_data == 12
    x_supports = [s.support for s in lattice.x_stabilizers]
    z_supports = [s.support for s in lattice.z_stabilizers]
    assert x_supports == [
        (0, 2), (0, 1, 3), (1, 4), (2, 5, 7), (3, 5, 6, 8), (4, 6, 9), (7, 10), (8, 10, 11), (9, 11),
    ]
    assert z_supports == [(0, 2, 3, 5), (1, 3, 4, 6), (5, 7, 8, 10), (6, 8, 9, 11)]
    with pytest.raises(LatticeError):
        logical_operators(lattice)


def test_all_smooth_rejects_empty():
    with pytest.raises(LatticeError):
        build_all_smooth_lattice(0, 3)


def test_data_index():
    lattice = build_lattice(3)
    assert lattice.data_index((0, 0)) == 0
    assert lattice.is_data_site((2, 2))
    with pytest.raises(LatticeError):
        lattice.data_index((1, 0))


@pytest.mark.parametrize("d", [3, 4, 5])
def test_schedule_touches_every_support_once(d):
    lattice = build_lattice(d)
    schedule = build_schedule(lattice)
    counts = schedule.cnot_counts()
    assert counts.tolist() == [len(s.support) for s in lattice.stabilizers]
    assert [layer.direction for layer in schedule.layers] == ["N", "W", "E", "S"]
    for s in lattice.stabilizers:
        for q in s.support:
            assert schedule.touch_step(s.index, q) in (1, 2, 3, 4)
    assert schedule.touch_step(0, lattice.n_data - 1) is None


def test_schedule_gates():
    lattice = build_lattice(3)
    schedule = build_schedule(lattice)
    n, n_z = lattice.n_data, lattice.n_z
    hadamards = schedule.gates(0)
    assert [g.qubits[0] for g in hadamards] == list(range(n + n_z, n + lattice.n_syndromes))
    for g in schedule.gates(1):
        assert g.name == "CNOT"
        control, target = g.qubits
        assert (control < n) != (target < n)


def test_schedule_rejects_reused_data_qubit():
    schedule = build_schedule(build_lattice(3))
    first = schedule.layers[0]
    clash = dataclasses.replace(first, x_synd=np.array([0]), x_data=first.z_data[:1])
    broken = dataclasses.replace(schedule, layers=(clash, *schedule.layers[1:]))
    with pytest.raises(ScheduleError):
        validate_schedule(broken)


def test_dump_lists_roles_and_logicals():
    text = dump(build_lattice(2))
    assert "d0" in text and "Z0" in text and "X2" in text
    assert "Z_L: Z0 Z1" in text
    assert text.splitlines()[-1].startswith("X_L:")
    assert np.all([len(line) > 0 for line in text.splitlines()[:3]])
