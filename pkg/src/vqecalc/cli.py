"""Command-line interface: energy, forces, optimize, spectrum, serve."""

from __future__ import annotations

import argparse
import pathlib
import sys

from .chemcore import parse_xyz, write_xyz
from .engine import Engine, EngineConfig, serve, spectrum


def _load_inputs(args):
    cfg = EngineConfig.from_file(args.config) if args.config else EngineConfig()
    path = pathlib.Path(args.geometry)
    if not path.exists():
        raise FileNotFoundError(f"geometry file not found: {path}")
    return parse_xyz(path.read_text()), cfg


def _cmd_energy(args):
    g, cfg = _load_inputs(args)
    res = Engine(cfg).energy(g)
    print(f"energy_hartree {res.energy:.12f}")
    _print_metadata(res.metadata)
    return 0


def _cmd_forces(args):
    g, cfg = _load_inputs(args)
    res = Engine(cfg).forces(g)
    print(f"energy_hartree {res.energy:.12f}")
    for sym, row in zip(g.symbols, res.forces):
        print(f"force_hartree_per_angstrom {sym} "
              f"{row[0]: .12e} {row[1]: .12e} {row[2]: .12e}")
    _print_metadata(res.metadata)
    return 0


def _cmd_optimize(args):
    g, cfg = _load_inputs(args)
    traj = Engine(cfg).optimize(g)
    outdir = pathlib.Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_trajectory(traj, cfg, outdir)
    final = traj.final
    print(f"converged {str(traj.converged).lower()}")
    print(f"iterations {len(traj.steps) - 1}")
    print(f"energy_hartree {final.energy:.12f}")
    print(f"fmax_hartree_per_angstrom {final.fmax:.3e}")
    for key, val in final.bonds.items():
        print(f"bond_{key[0]}_{key[1]}_angstrom {val:.8f}")
    for key, val in final.angles.items():
        print(f"angle_{key[0]}_{key[1]}_{key[2]}_degrees {val:.6f}")
    print(f"trajectory_xyz {outdir / 'trajectory.xyz'}")
    print(f"trajectory_table {outdir / 'trajectory.dat'}")
    return 0 if traj.converged else 3


def _cmd_spectrum(args):
    g, cfg = _load_inputs(args)
    values = spectrum(g, cfg, k=4)
    for i, v in enumerate(values):
        print(f"eigenvalue_{i}_hartree {v:.12f}")
    return 0


def _print_metadata(meta):
    for key in ("basis", "mapping", "ansatz", "n_qubits", "vqe_evals",
                "vqe_converged", "wall_time_s"):
        val = meta[key]
        print(f"{key} {val:.3f}" if isinstance(val, float) else f"{key} {val}")


def write_trajectory(traj, cfg, outdir: pathlib.Path):
    """Multi-frame XYZ plus a tab-separated table of the per-iteration record."""
    frames = []
    for i, step in enumerate(traj.steps):
        frames.append(write_xyz(step.geometry,
                                comment=f"iter {i} energy_hartree {step.energy:.12f}"))
    (outdir / "trajectory.xyz").write_text("\n".join(frames) + "\n")

    bond_cols = [f"bond_{i}_{j}" for i, j in cfg.report_bonds]
    angle_cols = [f"angle_{i}_{j}_{k}" for i, j, k in cfg.report_angles]
    header = ["iter", "energy_hartree", "fmax", "fnorm"] + bond_cols + angle_cols
    lines = ["\t".join(header)]
    for i, step in enumerate(traj.steps):
        row = [str(i), f"{step.energy:.12f}", f"{step.fmax:.6e}", f"{step.fnorm:.6e}"]
        row += [f"{step.bonds[b]:.10f}" for b in cfg.report_bonds]
        row += [f"{step.angles[a]:.8f}" for a in cfg.report_angles]
        lines.append("\t".join(row))
    (outdir / "trajectory.dat").write_text("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqecalc",
        description="VQE-based molecular energy, force and geometry-optimization engine")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_geometry in (
            ("energy", _cmd_energy, True),
            ("forces", _cmd_forces, True),
            ("optimize", _cmd_optimize, True),
            ("spectrum", _cmd_spectrum, True),
            ("serve", None, False)):
        p = sub.add_parser(name)
        if needs_geometry:
            p.add_argument("--geometry", required=True, help="XYZ file path")
            p.add_argument("--config", default=None, help="YAML key/value config file")
            p.add_argument("--output", default=".", help="output directory")
            p.set_defaults(fn=fn)
        else:
            p.set_defaults(fn=lambda args: serve())
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"vqecalc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
