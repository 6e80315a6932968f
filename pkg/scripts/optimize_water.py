"""Optimize the water geometry with the VQE engine and report the
per-iteration trajectory (energy, force norm, O-H bond, H-O-H angle)."""

import argparse
import pathlib

from vqecalc import Engine, EngineConfig
from vqecalc.chemcore import bond_angle, bond_length, water_geometry
from vqecalc.cli import write_trajectory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--basis", default="sto-3g", choices=["sto-3g", "6-31g", "6-31g*"])
    ap.add_argument("--output", default="water_opt")
    ap.add_argument("--fmax", type=float, default=1e-5)
    args = ap.parse_args()

    cfg = EngineConfig(basis=args.basis, active_electrons=4, active_orbitals=4,
                       mapping="parity", two_qubit_reduction=True, fmax=args.fmax,
                       report_bonds=((0, 1), (0, 2)), report_angles=((1, 0, 2),))
    traj = Engine(cfg).optimize(water_geometry())

    outdir = pathlib.Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_trajectory(traj, cfg, outdir)

    print(f"{'iter':>4} {'energy_hartree':>18} {'fnorm':>12} {'rOH':>10} {'aHOH':>10}")
    for i, s in enumerate(traj.steps):
        print(f"{i:>4} {s.energy:>18.9f} {s.fnorm:>12.3e} "
              f"{s.bonds[(0, 1)]:>10.6f} {s.angles[(1, 0, 2)]:>10.4f}")
    final = traj.final.geometry
    print(f"converged: {traj.converged} after {len(traj.steps) - 1} steps")
    print(f"rOH = {bond_length(final, 0, 1):.8f} A, "
          f"aHOH = {bond_angle(final, 1, 0, 2):.7f} deg, "
          f"E = {traj.final.energy:.9f} Hartree")
    print(f"trajectory written to {outdir}/")


if __name__ == "__main__":
    main()
