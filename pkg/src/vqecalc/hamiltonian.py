"""Second-quantized molecular Hamiltonian, active-space reduction, FCIDUMP I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .meanfield import MOIntegrals, SCFResult


class ActiveSpaceError(ValueError):
    """Requested active space does not fit the molecule."""


class FCIDumpError(ValueError):
    """Malformed FCIDUMP content."""


@dataclass(frozen=True)
class MolecularHamiltonian:
    """Spatial-orbital electronic Hamiltonian: core constant, h1, (pq|rs)."""

    e_core: float
    h1: np.ndarray
    g2: np.ndarray
    n_orb: int
    n_elec: int

    def __post_init__(self):
        if self.h1.shape != (self.n_orb, self.n_orb):
            raise ValueError("h1 shape does not match n_orb")
        if self.g2.shape != (self.n_orb,) * 4:
            raise ValueError("g2 shape does not match n_orb")
        if not 0 <= self.n_elec <= 2 * self.n_orb:
            raise ValueError(f"{self.n_elec} electrons do not fit in {self.n_orb} orbitals")
        if np.abs(self.h1 - self.h1.T).max() > 1e-10:
            raise ValueError("h1 must be symmetric")
        for axes in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.abs(self.g2 - self.g2.transpose(axes)).max() > 1e-10:
                raise ValueError("g2 must have 8-fold permutational symmetry")


@dataclass(frozen=True)
class ActiveSpaceSpec:
    """Electron/orbital counts of the correlated window around the Fermi level."""

    n_active_electrons: int
    n_active_orbitals: int

    def validate(self, n_elec_total: int, n_mo: int):
        n_frozen2 = n_elec_total - self.n_active_electrons
        if n_frozen2 < 0 or n_frozen2 % 2 != 0:
            raise ActiveSpaceError(
                f"cannot freeze {n_frozen2} electrons (must be even and >= 0)")
        if self.n_active_orbitals < -(-self.n_active_electrons // 2):
            raise ActiveSpaceError(
                f"{self.n_active_electrons} electrons need at least "
                f"{-(-self.n_active_electrons // 2)} orbitals")
        if n_frozen2 // 2 + self.n_active_orbitals > n_mo:
            raise ActiveSpaceError(
                f"active space ({self.n_active_electrons}e, {self.n_active_orbitals}o) "
                f"does not fit in {n_mo} MOs with {n_frozen2 // 2} frozen orbitals")
        return n_frozen2 // 2


def build_full(mo: MOIntegrals, e_nuc: float, n_electrons: int) -> MolecularHamiltonian:
    """Full-space Hamiltonian: all MOs active, e_core = nuclear repulsion."""
    return MolecularHamiltonian(e_core=float(e_nuc), h1=mo.h1.copy(), g2=mo.g2.copy(),
                                n_orb=mo.n_mo, n_elec=n_electrons)


def select_active_space(full: MolecularHamiltonian, scf: SCFResult,
                        spec: ActiveSpaceSpec) -> MolecularHamiltonian:
    """Freeze the lowest orbitals into the core and keep an energy-ordered window.

    Frozen-core constant: 2 sum_i h_ii + sum_ij [2(ii|jj) - (ij|ji)].
    Dressed one-electron term: h_pq + sum_i [2(pq|ii) - (pi|iq)], i frozen.
    """
    n_frozen = spec.validate(full.n_elec, full.n_orb)
    if not np.all(np.diff(scf.eps) >= -1e-12):
        raise ActiveSpaceError("orbital energies must be ascending")
    frozen = list(range(n_frozen))
    active = list(range(n_frozen, n_frozen + spec.n_active_orbitals))

    h1, g2 = full.h1, full.g2
    e_core = full.e_core
    for i in frozen:
        e_core += 2.0 * h1[i, i]
        for j in frozen:
            e_core += 2.0 * g2[i, i, j, j] - g2[i, j, j, i]

    idx = np.ix_(active, active)
    h_act = h1[idx].copy()
    for i in frozen:
        h_act += 2.0 * g2[np.ix_(active, active, [i], [i])][:, :, 0, 0]
        h_act -= g2[np.ix_(active, [i], [i], active)][:, 0, 0, :]
    g_act = g2[np.ix_(active, active, active, active)].copy()

    return MolecularHamiltonian(e_core=float(e_core), h1=h_act, g2=g_act,
                                n_orb=spec.n_active_orbitals,
                                n_elec=spec.n_active_electrons)


def write_fcidump(h: MolecularHamiltonian, path) -> None:
    """Standard FCIDUMP layout: (pq|rs) values, then h_pq, then e_core; 1-based."""
    n = h.n_orb
    with open(path, "w") as f:
        f.write(f"&FCI NORB={n},NELEC={h.n_elec},MS2=0,\n")
        f.write("  ORBSYM=" + "1," * n + "\n")
        f.write("  ISYM=1,\n")
        f.write("&END\n")
        for p in range(n):
            for q in range(p + 1):
                pq = p * (p + 1) // 2 + q
                for r in range(p + 1):
                    for s in range(r + 1):
                        if r * (r + 1) // 2 + s > pq:
                            continue
                        val = h.g2[p, q, r, s]
                        if val != 0.0:
                            f.write(f"{val:23.16e} {p+1:4d} {q+1:4d} {r+1:4d} {s+1:4d}\n")
        for p in range(n):
            for q in range(p + 1):
                val = h.h1[p, q]
                if val != 0.0:
                    f.write(f"{val:23.16e} {p+1:4d} {q+1:4d}    0    0\n")
        f.write(f"{h.e_core:23.16e}    0    0    0    0\n")


def read_fcidump(path) -> MolecularHamiltonian:
    """Parse an FCIDUMP file; integrals are symmetrized to the full 8-fold set."""
    with open(path) as f:
        text = f.read()
    m = re.search(r"&FCI(.*?)(?:&END|/)", text, re.DOTALL | re.IGNORECASE)
    if not m:
        raise FCIDumpError("missing &FCI ... &END header")
    header = m.group(1)
    nm = re.search(r"NORB\s*=\s*(\d+)", header, re.IGNORECASE)
    ne = re.search(r"NELEC\s*=\s*(\d+)", header, re.IGNORECASE)
    if not nm or not ne:
        raise FCIDumpError("header must define NORB and NELEC")
    n, nelec = int(nm.group(1)), int(ne.group(1))

    h1 = np.zeros((n, n))
    g2 = np.zeros((n, n, n, n))
    e_core = 0.0
    body = text[m.end():]
    for line in body.splitlines():
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 5:
            raise FCIDumpError(f"expected 'value p q r s', got: {line!r}")
        try:
            val = float(parts[0])
            p, q, r, s = (int(v) for v in parts[1:])
        except ValueError:
            raise FCIDumpError(f"non-numeric entry in line: {line!r}") from None
        if min(p, q, r, s) < 0 or max(p, q, r, s) > n:
            raise FCIDumpError(f"orbital index out of range in line: {line!r}")
        if p == 0:
            e_core = val
        elif r == 0:
            i, j = p - 1, q - 1
            h1[i, j] = h1[j, i] = val
        else:
            i, j, k, l = p - 1, q - 1, r - 1, s - 1
            for a, b, c, d in ((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                               (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)):
                g2[a, b, c, d] = val
    return MolecularHamiltonian(e_core=e_core, h1=h1, g2=g2, n_orb=n, n_elec=nelec)
