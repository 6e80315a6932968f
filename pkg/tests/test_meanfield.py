import numpy as np
import pytest

from oracles import random_rotation
from vqecalc.chemcore import Geometry
from vqecalc.integrals import ERITensor, IntegralSet, build_basis, compute_integrals
from vqecalc.meanfield import (MOIntegrals, SCFError, rhf_energy_from_mo, run_rhf,
                               transform_to_mo)


def test_h2_energy_matches_reference(h2_14bohr):
    scf = run_rhf(h2_14bohr, 2)
    # reference electronic-structure value, 4 decimals: -1.1167 Hartree
    assert scf.e_total == pytest.approx(-1.1167, abs=5e-5)
    assert scf.converged
    assert np.all(np.diff(scf.eps) >= 0)


def test_water_energy_matches_reference(water_sto3g):
    ints, scf, _ = water_sto3g
    assert scf.e_total == pytest.approx(-74.96, abs=5e-3)


def test_helium_closed_form():
    g = Geometry(("He",), np.zeros((1, 3)))
    ints = compute_integrals(build_basis("sto-3g", g), g)
    assert ints.n_ao == 1
    scf = run_rhf(ints, 2)
    h11 = (ints.T + ints.V)[0, 0]
    expected = 2.0 * h11 + ints.eri[0, 0, 0, 0] + ints.e_nuc
    assert scf.e_total == pytest.approx(expected, abs=1e-12)


def test_electron_count_validation(h2_14bohr):
    with pytest.raises(ValueError, match="even"):
        run_rhf(h2_14bohr, 3)
    with pytest.raises(ValueError, match="fit"):
        run_rhf(h2_14bohr, 6)


def test_orthonormality_and_commutator(water_sto3g):
    ints, scf, _ = water_sto3g
    n = ints.n_ao
    assert np.abs(scf.C.T @ ints.S @ scf.C - np.eye(n)).max() < 1e-8
    # FDS - SDF stationarity at convergence
    P = 2.0 * scf.C[:, :5] @ scf.C[:, :5].T
    eri = ints.eri.dense()
    F = (ints.T + ints.V
         + np.einsum("pqrs,rs->pq", eri, P)
         - 0.5 * np.einsum("prqs,rs->pq", eri, P))
    comm = F @ P @ ints.S - ints.S @ P @ F
    assert np.abs(comm).max() < 1e-6


def test_energy_reassembly(water_sto3g):
    ints, scf, mo = water_sto3g
    assert rhf_energy_from_mo(mo, ints.e_nuc, 10) == pytest.approx(scf.e_total, abs=1e-8)


def test_energy_rotation_invariance(water):
    rng = np.random.default_rng(11)
    e0 = run_rhf(compute_integrals(build_basis("sto-3g", water), water), 10).e_total
    R = random_rotation(rng)
    moved = Geometry(water.symbols, water.positions @ R.T + rng.normal(size=3) * 2)
    e1 = run_rhf(compute_integrals(build_basis("sto-3g", moved), moved), 10).e_total
    assert e1 == pytest.approx(e0, abs=1e-9)


def test_nonconvergence_error(water_sto3g):
    ints, _, _ = water_sto3g
    with pytest.raises(SCFError) as err:
        run_rhf(ints, 10, max_iter=2)
    assert err.value.e_total is not None
    assert err.value.residual is not None


def _toy_integrals(n, h1, g2):
    eri = ERITensor(n)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    eri.set(p, q, r, s, g2[p, q, r, s])
    return IntegralSet(S=np.eye(n), T=h1, V=np.zeros((n, n)), eri=eri,
                       e_nuc=0.0, n_ao=n)


def test_transform_identity():
    rng = np.random.default_rng(0)
    n = 3
    h1 = rng.normal(size=(n, n))
    h1 = 0.5 * (h1 + h1.T)
    g2 = np.zeros((n, n, n, n))
    ints = _toy_integrals(n, h1, g2)
    mo = transform_to_mo(ints, np.eye(n))
    assert np.abs(mo.h1 - h1).max() < 1e-14


def test_transform_permutation():
    rng = np.random.default_rng(1)
    n = 3
    h1 = rng.normal(size=(n, n))
    h1 = 0.5 * (h1 + h1.T)
    g2 = rng.normal(size=(n,) * 4)
    sym = np.zeros_like(g2)
    for axes in [(0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
                 (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)]:
        sym += np.transpose(g2, axes)
    g2 = sym / 8.0
    ints = _toy_integrals(n, h1, g2)
    P = np.eye(n)[:, [2, 0, 1]]
    mo = transform_to_mo(ints, P)
    perm = [2, 0, 1]
    assert np.abs(mo.h1 - h1[np.ix_(perm, perm)]).max() < 1e-12
    assert np.abs(mo.g2 - g2[np.ix_(perm, perm, perm, perm)]).max() < 1e-12


def test_transform_trace_invariance():
    rng = np.random.default_rng(2)
    n = 4
    h1 = rng.normal(size=(n, n))
    h1 = 0.5 * (h1 + h1.T)
    ints = _toy_integrals(n, h1, np.zeros((n,) * 4))
    Q = np.linalg.qr(rng.normal(size=(n, n)))[0]
    mo = transform_to_mo(ints, Q)
    assert np.trace(mo.h1) == pytest.approx(np.trace(h1), abs=1e-10)


def test_transform_dimension_mismatch(water_sto3g):
    ints, _, _ = water_sto3g
    with pytest.raises(ValueError):
        transform_to_mo(ints, np.eye(3))
    with pytest.raises(ValueError, match="orthonormal"):
        transform_to_mo(ints, np.eye(ints.n_ao) * 2.0)
