"""Molecular geometry model, element data, XYZ I/O and internal-coordinate measures.

All geometry lives in Angstrom. Conversion to Bohr happens only inside the
integrals module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ANGSTROM_TO_BOHR = 1.8897259886  # CODATA

# Elements H..Ar, enough for the systems this engine targets.
ELEMENTS = [
    "H", "He",
    "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
]
ATOMIC_NUMBER = {sym: z for z, sym in enumerate(ELEMENTS, start=1)}

MIN_NUCLEAR_SEPARATION = 1e-6  # Angstrom


class GeometryError(ValueError):
    """Invalid molecular geometry or malformed geometry input."""


@dataclass(frozen=True)
class Geometry:
    """Ordered collection of atoms: element symbols plus Cartesian positions (Angstrom)."""

    symbols: tuple[str, ...]
    positions: np.ndarray  # (N, 3), Angstrom
    comment: str = field(default="", compare=False)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.symbols) == 0:
            raise GeometryError("geometry needs at least one atom")
        if pos.shape != (len(self.symbols), 3):
            raise GeometryError(f"positions shape {pos.shape} does not match {len(self.symbols)} atoms")
        if not np.all(np.isfinite(pos)):
            raise GeometryError("non-finite coordinate in geometry")
        for sym in self.symbols:
            if sym not in ATOMIC_NUMBER:
                raise GeometryError(f"unknown element symbol {sym!r}")
        n = len(self.symbols)
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(pos[i] - pos[j]) <= MIN_NUCLEAR_SEPARATION:
                    raise GeometryError(f"atoms {i} and {j} are coincident")

    @property
    def atomic_numbers(self) -> tuple[int, ...]:
        return tuple(ATOMIC_NUMBER[s] for s in self.symbols)

    @property
    def n_atoms(self) -> int:
        return len(self.symbols)

    def __eq__(self, other):
        if not isinstance(other, Geometry):
            return NotImplemented
        return self.symbols == other.symbols and np.array_equal(self.positions, other.positions)

    def __hash__(self):
        return hash((self.symbols, self.positions.tobytes()))


def parse_xyz(text: str) -> Geometry:
    """Parse a standard XYZ file: count line, comment line, then 'Symbol x y z' lines."""
    lines = text.splitlines()
    if not lines:
        raise GeometryError("empty XYZ input")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise GeometryError(f"malformed atom count line: {lines[0]!r}") from None
    if n < 1:
        raise GeometryError(f"atom count must be positive, got {n}")
    if len(lines) < n + 2:
        raise GeometryError(f"XYZ declares {n} atoms but only {max(len(lines) - 2, 0)} atom lines present")
    comment = lines[1] if len(lines) > 1 else ""
    symbols = []
    coords = []
    for k in range(n):
        fields = lines[2 + k].split()
        if len(fields) < 4:
            raise GeometryError(f"malformed atom line: {lines[2 + k]!r}")
        sym = fields[0].capitalize()
        if sym not in ATOMIC_NUMBER:
            raise GeometryError(f"unknown element symbol {fields[0]!r}")
        try:
            xyz = [float(v) for v in fields[1:4]]
        except ValueError:
            raise GeometryError(f"non-numeric coordinate in line: {lines[2 + k]!r}") from None
        symbols.append(sym)
        coords.append(xyz)
    return Geometry(tuple(symbols), np.array(coords), comment=comment)


def write_xyz(g: Geometry, comment: str = "") -> str:
    """Serialize to XYZ text; coordinates carry enough digits for a lossless round trip."""
    out = [str(g.n_atoms), comment]
    for sym, (x, y, z) in zip(g.symbols, g.positions):
        out.append(f"{sym} {x:.10f} {y:.10f} {z:.10f}")
    return "\n".join(out)


def displace(g: Geometry, atom_index: int, axis: int, delta: float) -> Geometry:
    """Return a copy of g with position[atom_index][axis] shifted by delta Angstrom."""
    if not 0 <= atom_index < g.n_atoms:
        raise IndexError(f"atom index {atom_index} out of range for {g.n_atoms} atoms")
    if axis not in (0, 1, 2):
        raise IndexError(f"axis must be 0, 1 or 2, got {axis}")
    pos = g.positions.copy()
    pos[atom_index, axis] += delta
    return Geometry(g.symbols, pos, comment=g.comment)


def bond_length(g: Geometry, i: int, j: int) -> float:
    """Euclidean distance between atoms i and j, Angstrom."""
    if i == j:
        raise ValueError("bond_length needs two distinct atoms")
    return float(np.linalg.norm(g.positions[i] - g.positions[j]))


def bond_angle(g: Geometry, i: int, j: int, k: int) -> float:
    """Angle i-j-k (vertex at j) in degrees, in [0, 180]."""
    if len({i, j, k}) != 3:
        raise ValueError("bond_angle needs three distinct atoms")
    u = g.positions[i] - g.positions[j]
    v = g.positions[k] - g.positions[j]
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("zero-length vector in bond_angle")
    c = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(c)))


def water_geometry(r_oh: float = 0.96, theta_deg: float = 104.5) -> Geometry:
    """Water in the yz-plane, O at the origin, symmetric about the z axis."""
    half = np.radians(theta_deg / 2.0)
    y = r_oh * np.sin(half)
    z = r_oh * np.cos(half)
    return Geometry(
        ("O", "H", "H"),
        np.array([[0.0, 0.0, 0.0], [0.0, y, z], [0.0, -y, z]]),
    )
