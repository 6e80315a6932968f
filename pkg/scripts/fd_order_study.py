"""Finite-difference order study on the H2 VQE energy surface.

Compares central and one-sided force estimates at shrinking step sizes
against a tight-tolerance reference, and reports the log-log error slopes
(expected: ~2 for central, ~1 for one-sided).
"""

import argparse

import numpy as np

from vqecalc.chemcore import Geometry
from vqecalc.hamiltonian import build_full
from vqecalc.integrals import build_basis, compute_integrals
from vqecalc.meanfield import run_rhf, transform_to_mo
from vqecalc.qubitmap import FermionMapping, map_hamiltonian
from vqecalc.statesim import AnsatzSpec, build_ansatz
from vqecalc.vqe import OptimizerSpec, run_vqe


def make_energy_fn(ftol=1e-13):
    warm = {"params": None}
    opt = OptimizerSpec(ftol=ftol, gtol=1e-9)

    def energy(r):
        g = Geometry(("H", "H"), np.array([[0.0, 0.0, 0.0], [0.0, 0.0, r]]))
        ints = compute_integrals(build_basis("sto-3g", g), g)
        scf = run_rhf(ints, 2)
        full = build_full(transform_to_mo(ints, scf.C), ints.e_nuc, 2)
        qop = map_hamiltonian(full, "jw")
        circ = build_ansatz(AnsatzSpec("uccsd"), FermionMapping.for_hamiltonian(full, "jw"))
        x0 = warm["params"] if warm["params"] is not None else np.zeros(circ.n_params)
        res = run_vqe(qop, circ, x0, opt)
        warm["params"] = res.params
        return res.energy

    return energy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bond", type=float, default=0.70, help="study geometry, Angstrom")
    ap.add_argument("--deltas", type=float, nargs="+",
                    default=[0.02, 0.01, 0.005, 0.0025])
    args = ap.parse_args()

    energy = make_energy_fn()
    r0 = args.bond
    energy(r0)
    f_ref = -(energy(r0 + 1e-5) - energy(r0 - 1e-5)) / 2e-5
    e0 = energy(r0)
    print(f"reference force at r={r0}: {f_ref:.10f} Hartree/Angstrom")

    print(f"{'delta':>10} {'central_err':>14} {'one_sided_err':>14}")
    cent, ones = [], []
    for d in args.deltas:
        ep, em = energy(r0 + d), energy(r0 - d)
        ec = abs(-(ep - em) / (2 * d) - f_ref)
        ef = abs(-(ep - e0) / d - f_ref)
        cent.append(ec)
        ones.append(ef)
        print(f"{d:>10.4f} {ec:>14.3e} {ef:>14.3e}")

    logd = np.log(args.deltas)
    print(f"central slope:   {np.polyfit(logd, np.log(cent), 1)[0]:.3f} (expect ~2)")
    print(f"one-sided slope: {np.polyfit(logd, np.log(ones), 1)[0]:.3f} (expect ~1)")


if __name__ == "__main__":
    main()
