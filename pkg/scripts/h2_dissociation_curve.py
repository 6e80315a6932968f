"""H2/STO-3G dissociation curve: VQE (warm-started along the scan) against
exact diagonalization of the same qubit Hamiltonian."""

import argparse

import numpy as np

from vqecalc.chemcore import Geometry
from vqecalc.hamiltonian import build_full
from vqecalc.integrals import build_basis, compute_integrals
from vqecalc.meanfield import run_rhf, transform_to_mo
from vqecalc.qubitmap import FermionMapping, map_hamiltonian
from vqecalc.statesim import AnsatzSpec, build_ansatz, exact_lowest_eigenvalue
from vqecalc.vqe import run_vqe


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rmin", type=float, default=0.4)
    ap.add_argument("--rmax", type=float, default=3.0)
    ap.add_argument("--points", type=int, default=27)
    ap.add_argument("--mapping", default="jw", choices=["jw", "parity", "bk"])
    args = ap.parse_args()

    warm = None
    print(f"{'r_angstrom':>11} {'e_vqe':>16} {'e_exact':>16} {'gap':>10}")
    for r in np.linspace(args.rmin, args.rmax, args.points):
        g = Geometry(("H", "H"), np.array([[0.0, 0.0, 0.0], [0.0, 0.0, r]]))
        ints = compute_integrals(build_basis("sto-3g", g), g)
        scf = run_rhf(ints, 2)
        full = build_full(transform_to_mo(ints, scf.C), ints.e_nuc, 2)
        qop = map_hamiltonian(full, args.mapping)
        mp = FermionMapping.for_hamiltonian(full, args.mapping)
        circ = build_ansatz(AnsatzSpec("uccsd"), mp)
        x0 = warm if warm is not None else np.zeros(circ.n_params)
        res = run_vqe(qop, circ, x0)
        warm = res.params
        exact = exact_lowest_eigenvalue(qop)
        print(f"{r:>11.4f} {res.energy:>16.10f} {exact:>16.10f} {res.energy - exact:>10.2e}")


if __name__ == "__main__":
    main()
