import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vqecalc.chemcore import ANGSTROM_TO_BOHR, Geometry, water_geometry
from vqecalc.hamiltonian import build_full
from vqecalc.integrals import build_basis, compute_integrals
from vqecalc.meanfield import run_rhf, transform_to_mo


def h2_geometry(r_angstrom=0.7414):
    return Geometry(("H", "H"), np.array([[0.0, 0.0, 0.0], [0.0, 0.0, r_angstrom]]))


def h2_hamiltonian(r_angstrom=0.7414):
    """Full-space molecular Hamiltonian of H2/STO-3G at the given bond length."""
    g = h2_geometry(r_angstrom)
    ints = compute_integrals(build_basis("sto-3g", g), g)
    scf = run_rhf(ints, 2)
    mo = transform_to_mo(ints, scf.C)
    return build_full(mo, ints.e_nuc, 2), scf


@pytest.fixture(scope="session")
def h2():
    return h2_geometry()


@pytest.fixture(scope="session")
def h2_full():
    return h2_hamiltonian()[0]


@pytest.fixture(scope="session")
def h2_scf():
    return h2_hamiltonian()[1]


@pytest.fixture(scope="session")
def h2_14bohr():
    g = h2_geometry(1.4 / ANGSTROM_TO_BOHR)
    return compute_integrals(build_basis("sto-3g", g), g)


@pytest.fixture(scope="session")
def water():
    return water_geometry()


@pytest.fixture(scope="session")
def water_sto3g(water):
    ints = compute_integrals(build_basis("sto-3g", water), water)
    scf = run_rhf(ints, 10)
    mo = transform_to_mo(ints, scf.C)
    return ints, scf, mo


def random_two_orbital_hamiltonian(rng, n_elec=2):
    """Random Hermitian 2-spatial-orbital integral set (8-fold symmetric g2)."""
    h1 = rng.normal(size=(2, 2))
    h1 = 0.5 * (h1 + h1.T)
    g2 = rng.normal(size=(2, 2, 2, 2))
    sym = np.zeros_like(g2)
    for perm in ("pqrs", "qprs", "pqsr", "qpsr", "rspq", "srpq", "rsqp", "srqp"):
        axes = tuple("pqrs".index(c) for c in perm)
        sym += np.transpose(g2, axes)
    g2 = sym / 8.0
    from vqecalc.hamiltonian import MolecularHamiltonian
    return MolecularHamiltonian(e_core=float(rng.normal()), h1=h1, g2=g2,
                                n_orb=2, n_elec=n_elec)
