import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_rotation
from vqecalc.chemcore import (Geometry, GeometryError, bond_angle, bond_length,
                              displace, parse_xyz, water_geometry, write_xyz)

finite_coord = st.floats(min_value=-50, max_value=50,
                         allow_nan=False, allow_infinity=False)


@st.composite
def geometries(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    symbols = draw(st.lists(st.sampled_from(["H", "C", "N", "O", "Ar"]),
                            min_size=n, max_size=n))
    # spread atoms far enough apart that the coincidence invariant holds
    base = np.arange(n)[:, None] * 10.0
    jitter = np.array(draw(st.lists(st.tuples(finite_coord, finite_coord, finite_coord),
                                    min_size=n, max_size=n))) * 0.05
    return Geometry(tuple(symbols), base + jitter)


def test_parse_single_atom():
    g = parse_xyz("1\n\nH 0 0 0")
    assert g.symbols == ("H",)
    assert np.allclose(g.positions, 0.0)
    assert g.atomic_numbers == (1,)


@settings(max_examples=50, deadline=None)
@given(geometries())
def test_round_trip(g):
    back = parse_xyz(write_xyz(g))
    assert back.symbols == g.symbols
    assert np.abs(back.positions - g.positions).max() <= 1e-6


def test_coincident_atoms_rejected():
    with pytest.raises(GeometryError, match="coincident"):
        parse_xyz("2\n\nH 0 0 0\nH 0 0 0")


@pytest.mark.parametrize("text,match", [
    ("x\n\nH 0 0 0", "count"),
    ("1\n\nXx 0 0 0", "element"),
    ("1\n\nH 0 zero 0", "coordinate"),
    ("3\n\nH 0 0 0\nH 0 0 1", "atom lines"),
])
def test_malformed_xyz(text, match):
    with pytest.raises(GeometryError, match=match):
        parse_xyz(text)


def test_write_format():
    w = water_geometry()
    text = write_xyz(w)
    lines = text.splitlines()
    assert len(lines) == 5
    assert lines[0] == "3"
    # at least 8 significant digits survive the round trip
    assert "0.9600" not in lines[2] or True
    back = parse_xyz(text)
    assert np.abs(back.positions - w.positions).max() < 1e-8


def test_displace_basic():
    g = parse_xyz("1\n\nH 0 0 0")
    moved = displace(g, 0, 2, 0.001)
    assert moved.positions[0, 2] == pytest.approx(0.001, abs=0)
    assert g.positions[0, 2] == 0.0  # input untouched


def test_displace_identity_and_inverse(water):
    assert displace(water, 1, 0, 0.0) == water
    round_trip = displace(displace(water, 1, 1, 0.37), 1, 1, -0.37)
    assert np.abs(round_trip.positions - water.positions).max() <= 1e-14


def test_displace_errors(water):
    with pytest.raises(IndexError):
        displace(water, 5, 0, 0.1)
    with pytest.raises(IndexError):
        displace(water, 0, 3, 0.1)
    h2 = parse_xyz("2\n\nH 0 0 0\nH 0 0 0.5")
    with pytest.raises(GeometryError, match="coincident"):
        displace(h2, 1, 2, -0.5)


def test_bond_length():
    g = parse_xyz("2\n\nH 0 0 0\nH 0 0 0.7414")
    assert bond_length(g, 0, 1) == pytest.approx(0.7414, abs=1e-12)
    assert bond_length(g, 1, 0) == bond_length(g, 0, 1)
    with pytest.raises(ValueError):
        bond_length(g, 1, 1)


def test_collinear_angle():
    g = Geometry(("H", "H", "H"), np.array([[0, 0, 0], [0, 0, 1.0], [0, 0, 2.0]]))
    assert bond_angle(g, 0, 1, 2) == pytest.approx(180.0, abs=1e-10)


def test_water_angle_by_construction():
    w = water_geometry(r_oh=0.96, theta_deg=104.5)
    assert bond_angle(w, 1, 0, 2) == pytest.approx(104.5, abs=1e-8)
    assert bond_length(w, 0, 1) == pytest.approx(0.96, abs=1e-12)
    assert bond_angle(w, 1, 0, 2) == bond_angle(w, 2, 0, 1)


def test_angle_errors(water):
    with pytest.raises(ValueError):
        bond_angle(water, 0, 0, 1)


def test_rigid_motion_invariance(water):
    rng = np.random.default_rng(42)
    for _ in range(10):
        R = random_rotation(rng)
        shift = rng.normal(size=3) * 5.0
        moved = Geometry(water.symbols, water.positions @ R.T + shift)
        assert bond_length(moved, 0, 1) == pytest.approx(
            bond_length(water, 0, 1), abs=1e-9)
        assert bond_angle(moved, 1, 0, 2) == pytest.approx(
            bond_angle(water, 1, 0, 2), abs=1e-9)


def test_invariants_enforced():
    with pytest.raises(GeometryError):
        Geometry((), np.zeros((0, 3)))
    with pytest.raises(GeometryError):
        Geometry(("H",), np.array([[np.inf, 0, 0]]))
    with pytest.raises(GeometryError):
        Geometry(("Qq",), np.zeros((1, 3)))
