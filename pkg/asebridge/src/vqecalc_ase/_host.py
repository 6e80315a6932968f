"""Host-framework compatibility layer.

When ASE is installed, the real Calculator base class and optimizer are used.
Otherwise this module supplies minimal protocol-compatible stand-ins (same
calculate/results contract, same BFGS conventions: 70 eV/A^2 initial Hessian,
0.2 A step clip, per-atom fmax) so the bridge and its tests run anywhere.
"""

from __future__ import annotations

import numpy as np

try:
    from ase import Atoms
    from ase.calculators.calculator import (CalculationFailed, Calculator,
                                            all_changes)
    from ase.optimize import BFGS
    HAVE_ASE = True
except ImportError:  # pragma: no cover - exercised when ase is absent
    HAVE_ASE = False
    all_changes = ["positions", "numbers", "cell", "pbc"]

    class CalculationFailed(RuntimeError):
        pass

    class Atoms:
        """Positions-and-symbols container mirroring the host framework API."""

        def __init__(self, symbols, positions):
            if isinstance(symbols, str):
                raise ValueError("pass symbols as a sequence, e.g. ['H', 'H']")
            self._symbols = list(symbols)
            self._positions = np.array(positions, dtype=float)
            self.calc = None

        def __len__(self):
            return len(self._symbols)

        def get_chemical_symbols(self):
            return list(self._symbols)

        def get_positions(self):
            return self._positions.copy()

        def set_positions(self, positions):
            self._positions = np.array(positions, dtype=float)

        def copy(self):
            return Atoms(self._symbols, self._positions)

        def get_potential_energy(self):
            return self.calc.get_property("energy", self)

        def get_forces(self):
            return self.calc.get_property("forces", self)

    class Calculator:
        """Result-caching calculate() protocol of the host framework."""

        implemented_properties: list = []

        def __init__(self, **kwargs):
            self.results = {}
            self.atoms = None

        def calculate(self, atoms=None, properties=("energy",),
                      system_changes=all_changes):
            if atoms is not None:
                self.atoms = atoms.copy()

        def check_state(self, atoms):
            if self.atoms is None:
                return all_changes
            if self.atoms.get_chemical_symbols() != atoms.get_chemical_symbols():
                return ["numbers"]
            if not np.array_equal(self.atoms.get_positions(), atoms.get_positions()):
                return ["positions"]
            return []

        def get_property(self, name, atoms):
            if name not in self.implemented_properties:
                raise CalculationFailed(f"property {name!r} not implemented")
            if self.check_state(atoms) or name not in self.results:
                self.calculate(atoms, properties=[name])
            return self.results[name]

    class BFGS:
        """Cartesian quasi-Newton optimizer with the host conventions."""

        def __init__(self, atoms, maxstep=0.2, alpha=70.0, logfile=None):
            self.atoms = atoms
            self.maxstep = maxstep
            self.alpha = alpha
            self.nsteps = 0

        def run(self, fmax=0.05, steps=100):
            n3 = 3 * len(self.atoms)
            H = np.eye(n3) * self.alpha
            prev_x = prev_g = None
            for self.nsteps in range(steps + 1):
                F = self.atoms.get_forces()
                if np.sqrt((F ** 2).sum(axis=1)).max() <= fmax:
                    return True
                g = -F.reshape(-1)
                x = self.atoms.get_positions().reshape(-1)
                if prev_x is not None:
                    s, y = x - prev_x, g - prev_g
                    sy = float(s @ y)
                    if sy > 1e-12:
                        Hs = H @ s
                        H = H + np.outer(y, y) / sy - np.outer(Hs, Hs) / float(s @ Hs)
                prev_x, prev_g = x, g
                p = np.linalg.solve(H, F.reshape(-1))
                lengths = np.sqrt((p.reshape(-1, 3) ** 2).sum(axis=1))
                if lengths.max() > self.maxstep:
                    p *= self.maxstep / lengths.max()
                self.atoms.set_positions((x + p).reshape(-1, 3))
            return False
