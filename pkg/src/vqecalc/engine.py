"""Calculator engine: energy, central-difference forces, BFGS geometry
optimization, configuration surface, and the line-delimited JSON serve mode.

Energies are Hartree, forces Hartree/Angstrom, geometry Angstrom.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .chemcore import ATOMIC_NUMBER, Geometry, bond_angle, bond_length, displace
from .hamiltonian import ActiveSpaceSpec, build_full, select_active_space
from .integrals import available_bases, build_basis, compute_integrals
from .meanfield import run_rhf, transform_to_mo
from .qubitmap import MAPPING_KINDS, FermionMapping, map_fermion_hamiltonian
from .statesim import AnsatzSpec, build_ansatz, lowest_eigenvalues
from .vqe import OPTIMIZER_KINDS, OptimizerSpec, default_initial_params, run_vqe

EV_PER_HARTREE = 27.211386245988
BFGS_INIT_HESSIAN = 70.0 / EV_PER_HARTREE  # 70 eV/A^2 in Hartree/A^2
BFGS_MAX_STEP = 0.2                        # Angstrom, per-atom displacement clip

CONFIG_KEYS = {
    "basis": str,
    "active_electrons": int,
    "active_orbitals": int,
    "mapping": str,
    "two_qubit_reduction": bool,
    "ansatz": str,
    "ansatz_layers": int,
    "optimizer": str,
    "vqe_ftol": float,
    "vqe_max_evals": int,
    "fd_step": float,
    "fmax": float,
    "max_opt_steps": int,
    "warm_start": bool,
    "seed": int,
    "report_bonds": list,
    "report_angles": list,
}


class ConfigError(ValueError):
    """Bad configuration content."""


@dataclass(frozen=True)
class EngineConfig:
    basis: str = "sto-3g"
    active_electrons: int | None = None
    active_orbitals: int | None = None
    mapping: str = "jw"
    two_qubit_reduction: bool = False
    ansatz: str = "uccsd"
    ansatz_layers: int = 1
    optimizer: str = "lbfgs_parameter_shift"
    vqe_ftol: float = 1e-9
    vqe_max_evals: int = 5000
    fd_step: float = 1e-3
    fmax: float = 1e-5
    max_opt_steps: int = 100
    warm_start: bool = True
    seed: int = 0
    report_bonds: tuple = ()
    report_angles: tuple = ()

    def __post_init__(self):
        if self.basis.lower() not in available_bases():
            raise ConfigError(
                f"basis {self.basis!r} not available; choose from {available_bases()}")
        if self.fd_step <= 0:
            raise ConfigError("fd_step must be positive")
        if self.fmax <= 0:
            raise ConfigError("fmax must be positive")
        if self.mapping not in MAPPING_KINDS:
            raise ConfigError(f"mapping must be one of {MAPPING_KINDS}")
        if self.optimizer not in OPTIMIZER_KINDS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZER_KINDS}")
        if self.ansatz not in ("uccsd", "hardware_efficient"):
            raise ConfigError("ansatz must be 'uccsd' or 'hardware_efficient'")
        if (self.active_electrons is None) != (self.active_orbitals is None):
            raise ConfigError("active_electrons and active_orbitals must be set together")
        object.__setattr__(self, "report_bonds",
                           tuple(tuple(int(i) for i in b) for b in self.report_bonds))
        object.__setattr__(self, "report_angles",
                           tuple(tuple(int(i) for i in a) for a in self.report_angles))

    @property
    def active_space(self) -> ActiveSpaceSpec | None:
        if self.active_electrons is None:
            return None
        return ActiveSpaceSpec(self.active_electrons, self.active_orbitals)

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "EngineConfig":
        with open(path) as f:
            data = yaml.safe_load(f)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a flat key/value mapping")
        return cls.from_dict(data)


@dataclass(frozen=True)
class CalcResult:
    energy: float
    forces: np.ndarray | None
    metadata: dict

    def __post_init__(self):
        if not np.isfinite(self.energy):
            raise ValueError("non-finite energy")
        if self.forces is not None and not np.all(np.isfinite(self.forces)):
            raise ValueError("non-finite forces")


@dataclass
class OptStep:
    geometry: Geometry
    energy: float
    forces: np.ndarray
    fmax: float
    fnorm: float
    bonds: dict = field(default_factory=dict)
    angles: dict = field(default_factory=dict)


@dataclass
class OptTrajectory:
    steps: list[OptStep]
    converged: bool

    @property
    def final(self) -> OptStep:
        return self.steps[-1]


def _atom_fmax(forces: np.ndarray) -> float:
    return float(np.sqrt((forces ** 2).sum(axis=1)).max())


class Engine:
    """Holds a configuration plus VQE warm-start state across calls."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self._warm_params: np.ndarray | None = None
        self._last_vqe_converged = True

    # -- single-point pipeline -------------------------------------------

    def _hamiltonian(self, g: Geometry):
        cfg = self.cfg
        basis = build_basis(cfg.basis, g)
        ints = compute_integrals(basis, g)
        n_elec = sum(ATOMIC_NUMBER[s] for s in g.symbols)
        scf = run_rhf(ints, n_elec)
        mo = transform_to_mo(ints, scf.C)
        ham = build_full(mo, ints.e_nuc, n_elec)
        if cfg.active_space is not None:
            ham = select_active_space(ham, scf, cfg.active_space)
        mapping = FermionMapping.for_hamiltonian(ham, cfg.mapping, cfg.two_qubit_reduction)
        qop = map_fermion_hamiltonian(ham, mapping)
        return qop, mapping, scf

    def _vqe(self, qop, mapping, init_params=None):
        cfg = self.cfg
        circuit = build_ansatz(AnsatzSpec(cfg.ansatz, cfg.ansatz_layers), mapping)
        if init_params is None or len(init_params) != circuit.n_params:
            init_params = default_initial_params(cfg.ansatz, circuit.n_params, cfg.seed)
        opt = OptimizerSpec(kind=cfg.optimizer, max_evals=cfg.vqe_max_evals,
                            ftol=cfg.vqe_ftol)
        res = run_vqe(qop, circuit, init_params, opt, seed=cfg.seed)
        return res

    def _solve(self, g: Geometry, init_params=None):
        qop, mapping, _scf = self._hamiltonian(g)
        if init_params is None and self.cfg.warm_start:
            init_params = self._warm_params
        res = self._vqe(qop, mapping, init_params)
        if self.cfg.warm_start:
            self._warm_params = res.params
        self._last_vqe_converged = res.converged
        return res, mapping, qop

    def energy(self, g: Geometry) -> CalcResult:
        t0 = time.perf_counter()
        res, mapping, _ = self._solve(g)
        return CalcResult(
            energy=res.energy, forces=None,
            metadata=self._metadata(mapping, res.n_cost_evals, res.converged, t0))

    def forces(self, g: Geometry) -> CalcResult:
        """Central differences of the VQE energy: 6N displaced evaluations.

        Each displaced VQE starts from the center geometry's converged
        parameters (when warm_start is on); the center energy is computed
        once and reused.
        """
        t0 = time.perf_counter()
        cfg = self.cfg
        center, mapping, _ = self._solve(g)
        warm = center.params if cfg.warm_start else None
        evals = center.n_cost_evals
        all_conv = center.converged
        forces = np.zeros((g.n_atoms, 3))
        delta = cfg.fd_step
        for a in range(g.n_atoms):
            for k in range(3):
                e_pm = []
                for sgn in (+1.0, -1.0):
                    try:
                        gd = displace(g, a, k, sgn * delta)
                        qop, mp, _ = self._hamiltonian(gd)
                        r = self._vqe(qop, mp, warm)
                    except Exception as exc:
                        raise RuntimeError(
                            f"energy evaluation failed at displacement "
                            f"(atom {a}, axis {k}, {sgn * delta:+.2e} Angstrom): {exc}"
                        ) from exc
                    e_pm.append(r.energy)
                    evals += r.n_cost_evals
                    all_conv = all_conv and r.converged
                forces[a, k] = -(e_pm[0] - e_pm[1]) / (2.0 * delta)
        meta = self._metadata(mapping, evals, all_conv, t0)
        return CalcResult(energy=center.energy, forces=forces, metadata=meta)

    def optimize(self, g0: Geometry) -> OptTrajectory:
        """BFGS on Cartesian coordinates until max per-atom force <= fmax."""
        cfg = self.cfg
        n3 = 3 * g0.n_atoms
        B = np.eye(n3) * BFGS_INIT_HESSIAN
        g = g0
        steps: list[OptStep] = []
        prev_x = prev_grad = None
        converged = False

        for _ in range(cfg.max_opt_steps + 1):
            result = self.forces(g)
            F = result.forces
            grad = -F.reshape(-1)
            x = g.positions.reshape(-1).copy()
            steps.append(self._record(g, result.energy, F))

            if prev_x is not None:
                s = x - prev_x
                y = grad - prev_grad
                sy = float(s @ y)
                if sy > 1e-12:
                    Bs = B @ s
                    B = B + np.outer(y, y) / sy - np.outer(Bs, Bs) / float(s @ Bs)
            prev_x, prev_grad = x, grad

            if _atom_fmax(F) <= cfg.fmax:
                converged = True
                break
            if len(steps) > cfg.max_opt_steps:
                break

            p = np.linalg.solve(B, -grad)
            step_lengths = np.sqrt((p.reshape(-1, 3) ** 2).sum(axis=1))
            longest = step_lengths.max()
            if longest > BFGS_MAX_STEP:
                p *= BFGS_MAX_STEP / longest
            g = Geometry(g.symbols, (x + p).reshape(-1, 3), comment=g.comment)

        return OptTrajectory(steps=steps, converged=converged)

    # -- bookkeeping -------------------------------------------------------

    def _record(self, g, energy, F):
        return OptStep(
            geometry=g, energy=energy, forces=F,
            fmax=_atom_fmax(F), fnorm=float(np.linalg.norm(F)),
            bonds={b: bond_length(g, *b) for b in self.cfg.report_bonds},
            angles={a: bond_angle(g, *a) for a in self.cfg.report_angles})

    def _metadata(self, mapping, evals, vqe_converged, t0):
        return {
            "basis": self.cfg.basis,
            "mapping": self.cfg.mapping,
            "two_qubit_reduction": self.cfg.two_qubit_reduction,
            "ansatz": self.cfg.ansatz,
            "n_qubits": mapping.n_qubits,
            "vqe_evals": int(evals),
            "vqe_converged": bool(vqe_converged),
            "wall_time_s": time.perf_counter() - t0,
        }


def compute_energy(g: Geometry, cfg: EngineConfig) -> CalcResult:
    return Engine(cfg).energy(g)


def compute_forces(g: Geometry, cfg: EngineConfig) -> CalcResult:
    return Engine(cfg).forces(g)


def optimize_geometry(g0: Geometry, cfg: EngineConfig) -> OptTrajectory:
    return Engine(cfg).optimize(g0)


def spectrum(g: Geometry, cfg: EngineConfig, k: int = 4) -> np.ndarray:
    """Lowest eigenvalues of the mapped Hamiltonian (exact diagonalization)."""
    qop, _, _ = Engine(cfg)._hamiltonian(g)
    return lowest_eigenvalues(qop, k=k)


# ---------------------------------------------------------------------------
# serve mode: line-delimited JSON over stdin/stdout


def _geometry_from_request(payload) -> Geometry:
    try:
        symbols = payload["symbols"]
        positions = payload["positions_angstrom"]
    except (TypeError, KeyError):
        raise ConfigError(
            "geometry must carry 'symbols' and 'positions_angstrom'") from None
    return Geometry(tuple(symbols), np.asarray(positions, dtype=float))


def serve(stdin=None, stdout=None) -> int:
    """Request/response loop; one JSON object per line, responses in order."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    engine: Engine | None = None

    def reply(obj):
        stdout.write(json.dumps(obj) + "\n")
        stdout.flush()

    for line in stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            reply({"ok": False, "error": f"malformed JSON: {exc}"})
            continue
        try:
            op = req.get("op")
            if op == "init":
                data = {k: v for k, v in req.items() if k != "op"}
                engine = Engine(EngineConfig.from_dict(data))
                reply({"ok": True})
            elif op == "shutdown":
                reply({"ok": True})
                return 0
            elif op in ("energy", "forces"):
                if engine is None:
                    reply({"ok": False, "error": "not initialized"})
                    continue
                g = _geometry_from_request(req.get("geometry"))
                if op == "energy":
                    res = engine.energy(g)
                    reply({"ok": True, "energy_hartree": res.energy,
                           "metadata": res.metadata})
                else:
                    res = engine.forces(g)
                    reply({"ok": True, "energy_hartree": res.energy,
                           "forces_hartree_per_angstrom": res.forces.tolist(),
                           "metadata": res.metadata})
            else:
                reply({"ok": False, "error": f"unknown op {op!r}"})
        except Exception as exc:
            reply({"ok": False, "error": f"{type(exc).__name__}: {exc}"})
    return 0
