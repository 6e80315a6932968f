"""Pauli-string algebra and fermion-to-qubit encodings.

Pauli strings are stored symplectically as integer bit masks (x, z): bit k of
x set means X or Y on qubit k, bit k of z means Z or Y. The stored operator is
P(x, z) = i^{popcount(x & z)} * X^x * Z^z, which makes every P Hermitian.

Spin orbitals use blocked ordering: alpha spin orbitals 0..n_orb-1 first,
then beta. The parity encoding with two-qubit reduction removes the qubits
at positions n_orb-1 and 2*n_orb-1 (total alpha parity / total parity).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hamiltonian import MolecularHamiltonian

COEFF_PRUNE = 1e-12

MAPPING_KINDS = ("jw", "parity", "bk")


class MappingError(ValueError):
    """Invalid encoding request (kind, sector, or reduction)."""


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis on a fixed-width register."""

    n_qubits: int
    x: int
    z: int

    def __post_init__(self):
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("Pauli mask exceeds register width")

    def label(self) -> str:
        parts = []
        for q in range(self.n_qubits):
            xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
            if xb or zb:
                parts.append(("X" if not zb else "Y" if xb else "Z") + str(q))
        return " ".join(parts) if parts else "I"

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()


def _mul_masks(x1, z1, c1, x2, z2, c2):
    """Product of two stored Pauli terms; returns (x, z, coeff)."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    k = ((x1 & z1).bit_count() + (x2 & z2).bit_count() - (x3 & z3).bit_count()) % 4
    phase = (1.0, 1.0j, -1.0, -1.0j)[k]
    if (z1 & x2).bit_count() & 1:
        phase = -phase
    return x3, z3, c1 * c2 * phase


class QubitOperator:
    """Weighted sum of Pauli strings on a fixed number of qubits."""

    def __init__(self, n_qubits: int, terms: dict | None = None):
        self.n_qubits = n_qubits
        self._terms: dict[tuple[int, int], complex] = dict(terms) if terms else {}

    @classmethod
    def identity(cls, n_qubits: int, coeff=1.0):
        return cls(n_qubits, {(0, 0): complex(coeff)})

    @classmethod
    def from_label(cls, n_qubits: int, label: str, coeff=1.0):
        x = z = 0
        if label.strip() and label.strip() != "I":
            for tok in label.split():
                letter, q = tok[0].upper(), int(tok[1:])
                if q >= n_qubits:
                    raise ValueError(f"qubit {q} outside register of {n_qubits}")
                if letter in ("X", "Y"):
                    x |= 1 << q
                if letter in ("Z", "Y"):
                    z |= 1 << q
                if letter not in ("X", "Y", "Z"):
                    raise ValueError(f"bad Pauli letter in {tok!r}")
        return cls(n_qubits, {(x, z): complex(coeff)})

    # -- container views ----------------------------------------------------

    def items(self):
        """Iterate (x_mask, z_mask, coeff)."""
        for (x, z), c in self._terms.items():
            yield x, z, c

    @property
    def terms(self) -> dict[PauliString, complex]:
        return {PauliString(self.n_qubits, x, z): c for (x, z), c in self._terms.items()}

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def coefficient(self, label: str) -> complex:
        probe = QubitOperator.from_label(self.n_qubits, label)
        (key,) = probe._terms
        return self._terms.get(key, 0.0 + 0.0j)

    # -- algebra ------------------------------------------------------------

    def _check(self, other):
        if self.n_qubits != other.n_qubits:
            raise ValueError(f"qubit-count mismatch: {self.n_qubits} vs {other.n_qubits}")

    def __add__(self, other):
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0.0) + c
        return QubitOperator(self.n_qubits, out)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, factor):
        return QubitOperator(self.n_qubits, {k: c * factor for k, c in self._terms.items()})

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        self._check(other)
        out: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in self._terms.items():
            for (x2, z2), c2 in other._terms.items():
                x3, z3, c3 = _mul_masks(x1, z1, c1, x2, z2, c2)
                key = (x3, z3)
                out[key] = out.get(key, 0.0) + c3
        return QubitOperator(self.n_qubits, out)

    def __rmul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        return NotImplemented

    def simplify(self, threshold: float = COEFF_PRUNE):
        return QubitOperator(
            self.n_qubits,
            {k: c for k, c in self._terms.items() if abs(c) >= threshold})

    def hermiticity_defect(self) -> float:
        """Largest imaginary coefficient magnitude (0 for Hermitian operators)."""
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def real(self):
        """Drop imaginary coefficient parts (valid after a hermiticity check)."""
        return QubitOperator(self.n_qubits, {k: complex(c.real) for k, c in self._terms.items()})

    # -- text form ------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"# n_qubits {self.n_qubits}"]
        for (x, z), c in sorted(self._terms.items()):
            coeff = repr(c.real) if c.imag == 0.0 else repr(complex(c))
            lines.append(f"{coeff}  {PauliString(self.n_qubits, x, z).label()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None):
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "n_qubits":
                    n_qubits = int(parts[1])
                continue
            coeff_str, _, label = line.partition("  ")
            terms.append((complex(coeff_str), label.strip() or "I"))
        if n_qubits is None:
            n_qubits = 1 + max((int(tok[1:]) for coeff, label in terms if label != "I"
                                for tok in label.split()), default=0)
        out = cls(n_qubits)
        for coeff, label in terms:
            out = out + cls.from_label(n_qubits, label, coeff)
        return out

    def __repr__(self):
        return f"QubitOperator(n_qubits={self.n_qubits}, n_terms={self.n_terms})"


# ---------------------------------------------------------------------------
# Fenwick tree for the Bravyi-Kitaev encoding


@lru_cache(maxsize=None)
def _fenwick(n: int):
    """Parent pointers and covered-range starts of the Fenwick tree on n nodes."""
    parent = [-1] * n
    range_start = list(range(n))

    def descend(lo, hi):
        if lo >= hi:
            return
        pivot = (lo + hi) // 2
        parent[pivot] = hi
        range_start[hi] = min(range_start[hi], lo)
        descend(lo, pivot)
        descend(pivot + 1, hi)

    descend(0, n - 1)
    children = [[] for _ in range(n)]
    for node, par in enumerate(parent):
        if par >= 0:
            children[par].append(node)
    return parent, range_start, children


def _bk_sets(j: int, n: int):
    """Update, parity and remainder bit masks for mode j (Fenwick construction)."""
    parent, range_start, children = _fenwick(n)
    update = 0
    k = parent[j]
    while k >= 0:
        update |= 1 << k
        k = parent[k]
    parity = 0
    m = j - 1
    while m >= 0:
        parity |= 1 << m
        m = range_start[m] - 1
    flip = 0
    for c in children[j]:
        flip |= 1 << c
    remainder = parity & ~flip
    return update, parity, remainder


# ---------------------------------------------------------------------------
# encodings


@dataclass(frozen=True)
class FermionMapping:
    """Encoding descriptor: scheme, spin-orbital count and particle sector."""

    kind: str
    n_modes: int
    n_alpha: int
    n_beta: int
    two_qubit_reduction: bool = False

    def __post_init__(self):
        if self.kind not in MAPPING_KINDS:
            raise MappingError(f"unknown mapping {self.kind!r}; choose from {MAPPING_KINDS}")
        if self.n_modes % 2 != 0:
            raise MappingError("blocked spin ordering needs an even spin-orbital count")
        if self.two_qubit_reduction:
            if self.kind != "parity":
                raise MappingError("two-qubit reduction is only defined for the parity mapping")
            if (self.n_alpha + self.n_beta) % 2 != 0:
                raise MappingError("two-qubit reduction needs an even electron count")

    @classmethod
    def for_hamiltonian(cls, h: MolecularHamiltonian, kind: str,
                        reduce_two_qubits: bool = False):
        return cls(kind=kind, n_modes=2 * h.n_orb,
                   n_alpha=(h.n_elec + 1) // 2, n_beta=h.n_elec // 2,
                   two_qubit_reduction=reduce_two_qubits)

    @property
    def n_qubits(self) -> int:
        return self.n_modes - 2 if self.two_qubit_reduction else self.n_modes

    @property
    def reduction_positions(self) -> tuple[int, int]:
        return self.n_modes // 2 - 1, self.n_modes - 1


def _ladder_masks(mapping: FermionMapping, mode: int, dagger: bool):
    """The two stored Pauli terms of a ladder operator on the full register."""
    n = mapping.n_modes
    j_bit = 1 << mode
    sign = -1.0 if dagger else 1.0
    if mapping.kind == "jw":
        prefix = j_bit - 1
        return [(j_bit, prefix, 0.5), (j_bit, prefix | j_bit, sign * 0.5j)]
    if mapping.kind == "parity":
        update = ((1 << n) - 1) & ~((j_bit << 1) - 1)
        zprev = (1 << (mode - 1)) if mode > 0 else 0
        return [(update | j_bit, zprev, 0.5), (update | j_bit, j_bit, sign * 0.5j)]
    update, parity, remainder = _bk_sets(mode, n)
    return [(update | j_bit, parity, 0.5), (update | j_bit, remainder | j_bit, sign * 0.5j)]


def ladder_operator(mapping: FermionMapping, mode: int, dagger: bool) -> QubitOperator:
    """Qubit image of a creation (dagger) or annihilation operator, unreduced."""
    if not 0 <= mode < mapping.n_modes:
        raise MappingError(f"mode {mode} outside 0..{mapping.n_modes - 1}")
    return QubitOperator(mapping.n_modes,
                         {(x, z): complex(c) for x, z, c in _ladder_masks(mapping, mode, dagger)})


def _accumulate_product(acc, factors, scale):
    """Accumulate scale * product(ladder terms) into dict acc."""
    out = [(0, 0, complex(scale))]
    for terms in factors:
        nxt = []
        for x1, z1, c1 in out:
            for x2, z2, c2 in terms:
                nxt.append(_mul_masks(x1, z1, c1, x2, z2, c2))
        out = nxt
    for x, z, c in out:
        key = (x, z)
        acc[key] = acc.get(key, 0.0) + c


def _remove_bit(mask: int, pos: int) -> int:
    low = mask & ((1 << pos) - 1)
    high = mask >> (pos + 1)
    return low | (high << pos)


def _reduce_parity_terms(terms: dict, mapping: FermionMapping) -> dict:
    """Drop the two symmetry qubits, substituting their sector eigenvalues."""
    k1, k2 = mapping.reduction_positions
    s1 = -1.0 if mapping.n_alpha % 2 else 1.0
    s2 = -1.0 if (mapping.n_alpha + mapping.n_beta) % 2 else 1.0
    out: dict[tuple[int, int], complex] = {}
    for (x, z), c in terms.items():
        if (x >> k1) & 1 or (x >> k2) & 1:
            if abs(c) > 1e-10:
                raise MappingError(
                    "operator does not commute with the parity symmetries "
                    f"(X/Y on a reduction qubit with coefficient {c})")
            continue
        if (z >> k1) & 1:
            c = c * s1
        if (z >> k2) & 1:
            c = c * s2
        xr = _remove_bit(_remove_bit(x, k2), k1)
        zr = _remove_bit(_remove_bit(z, k2), k1)
        out[(xr, zr)] = out.get((xr, zr), 0.0) + c
    return out


def map_hamiltonian(h: MolecularHamiltonian, kind: str = "jw",
                    reduce_two_qubits: bool = False) -> QubitOperator:
    """Qubit image of the molecular Hamiltonian under the selected encoding.

    Blocked spin-orbital expansion of the spatial integrals, ladder-operator
    products per scheme, constant e_core on the identity string.
    """
    mapping = FermionMapping.for_hamiltonian(h, kind, reduce_two_qubits)
    return map_fermion_hamiltonian(h, mapping)


def map_fermion_hamiltonian(h: MolecularHamiltonian, mapping: FermionMapping) -> QubitOperator:
    n_orb = h.n_orb
    n_modes = mapping.n_modes
    if n_modes != 2 * n_orb:
        raise MappingError("mapping register does not match the Hamiltonian")

    lad = {(m, d): _ladder_masks(mapping, m, d)
           for m in range(n_modes) for d in (True, False)}
    acc: dict[tuple[int, int], complex] = {(0, 0): complex(h.e_core)}

    for p in range(n_orb):
        for q in range(n_orb):
            hpq = h.h1[p, q]
            if abs(hpq) < 1e-13:
                continue
            for sp in (0, n_orb):
                _accumulate_product(acc, [lad[(p + sp, True)], lad[(q + sp, False)]], hpq)

    for p in range(n_orb):
        for q in range(n_orb):
            for r in range(n_orb):
                for s in range(n_orb):
                    g = h.g2[p, q, r, s]
                    if abs(g) < 1e-13:
                        continue
                    for sp in (0, n_orb):
                        for sq in (0, n_orb):
                            _accumulate_product(
                                acc,
                                [lad[(p + sp, True)], lad[(r + sq, True)],
                                 lad[(s + sq, False)], lad[(q + sp, False)]],
                                0.5 * g)

    if mapping.two_qubit_reduction:
        acc = _reduce_parity_terms(acc, mapping)
    op = QubitOperator(mapping.n_qubits, acc).simplify()
    defect = op.hermiticity_defect()
    if defect > 1e-10:
        raise MappingError(f"mapped Hamiltonian not Hermitian (max |Im| = {defect:.3e})")
    return op.real()


def map_excitation(mapping: FermionMapping, occupied: tuple[int, ...],
                   virtual: tuple[int, ...]) -> QubitOperator:
    """Anti-Hermitian excitation generator T - T^dag in the qubit encoding.

    T promotes the listed occupied spin orbitals into the listed virtuals;
    coefficients of the image are purely imaginary.
    """
    factors = [_ladder_masks(mapping, a, True) for a in virtual]
    factors += [_ladder_masks(mapping, i, False) for i in reversed(occupied)]
    acc: dict[tuple[int, int], complex] = {}
    _accumulate_product(acc, factors, 1.0)
    rev = [_ladder_masks(mapping, i, True) for i in occupied]
    rev += [_ladder_masks(mapping, a, False) for a in reversed(virtual)]
    _accumulate_product(acc, rev, -1.0)
    if mapping.two_qubit_reduction:
        acc = _reduce_parity_terms(acc, mapping)
    op = QubitOperator(mapping.n_qubits, acc).simplify()
    bad = max((abs(c.real) for _, _, c in op.items()), default=0.0)
    if bad > 1e-10:
        raise MappingError(f"excitation generator image not anti-Hermitian (max |Re| {bad:.1e})")
    return op


def occupation_vector(mapping: FermionMapping) -> list[int]:
    """Hartree-Fock occupations in blocked spin-orbital order."""
    n_orb = mapping.n_modes // 2
    occ = [0] * mapping.n_modes
    for i in range(mapping.n_alpha):
        occ[i] = 1
    for i in range(mapping.n_beta):
        occ[n_orb + i] = 1
    return occ


def hartree_fock_bits(mapping: FermionMapping) -> int:
    """Encoded computational-basis bitstring of the Hartree-Fock determinant."""
    occ = occupation_vector(mapping)
    n = mapping.n_modes
    if mapping.kind == "jw":
        bits = [occ[j] for j in range(n)]
    elif mapping.kind == "parity":
        bits = list(np.cumsum(occ) % 2)
    else:
        _, range_start, _ = _fenwick(n)
        bits = [sum(occ[range_start[i]: i + 1]) % 2 for i in range(n)]
    if mapping.two_qubit_reduction:
        k1, k2 = mapping.reduction_positions
        bits = [b for i, b in enumerate(bits) if i not in (k1, k2)]
    return sum(b << i for i, b in enumerate(bits))
