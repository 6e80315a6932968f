"""Contracted Cartesian Gaussian basis sets and molecular integrals.

One- and two-electron integrals are evaluated with McMurchie-Davidson
Hermite recurrences (Hermite expansion coefficients E, auxiliary table R,
Boys function F_m). Shells up to d (Cartesian, 6 components) are supported.
All values are in atomic units; geometry enters in Angstrom and is converted
to Bohr here and nowhere else.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from itertools import product

import numpy as np

from .chemcore import ANGSTROM_TO_BOHR, ATOMIC_NUMBER, Geometry

SHELL_LETTERS = {"S": 0, "P": 1, "D": 2}
# Cartesian component powers per angular momentum, CCA ordering.
CARTESIAN_POWERS = {
    0: [(0, 0, 0)],
    1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    2: [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)],
}
MAX_L = 2
PRIM_PREFACTOR_CUTOFF = 1e-14

_BASIS_FILES = {
    "sto-3g": "sto-3g.dat",
    "6-31g": "6-31g.dat",
    "6-31g*": "6-31g_star.dat",
}
# recognized names that need shells beyond Cartesian d
_HIGH_L_BASES = {"cc-pvtz": "f"}


class BasisError(ValueError):
    """Unknown basis, missing element, or unsupported shell."""


def available_bases() -> tuple[str, ...]:
    return tuple(sorted(_BASIS_FILES))


class IntegralError(RuntimeError):
    """Numerical problem while building integrals (e.g. linear dependence)."""


@dataclass(frozen=True)
class Shell:
    """One contracted shell: atom index, angular momentum, primitives."""

    center: int
    L: int
    exponents: np.ndarray
    coefficients: np.ndarray  # includes primitive norms once prepared

    def __post_init__(self):
        if self.L > MAX_L:
            raise BasisError(f"unsupported angular momentum L={self.L} (s, p, d only)")
        if len(self.exponents) == 0 or len(self.exponents) != len(self.coefficients):
            raise BasisError("shell needs matching, non-empty exponent/coefficient lists")
        if np.any(np.asarray(self.exponents) <= 0):
            raise BasisError("shell exponents must be positive")

    @property
    def n_components(self) -> int:
        return (self.L + 1) * (self.L + 2) // 2


@dataclass(frozen=True)
class BasisSet:
    """Shells plus the flattened Cartesian AO list with per-AO normalization."""

    name: str
    shells: tuple[Shell, ...]
    ao_shell: tuple[int, ...]      # ao index -> shell index
    ao_powers: tuple[tuple[int, int, int], ...]
    ao_norms: np.ndarray           # per-AO normalization factor

    @property
    def n_ao(self) -> int:
        return len(self.ao_shell)

    def shell_ao_offset(self, shell_index: int) -> int:
        return self.ao_shell.index(shell_index)


class ERITensor:
    """Two-electron integrals (pq|rs), chemist notation, packed 8-fold symmetric."""

    def __init__(self, n_ao: int):
        self.n_ao = n_ao
        n_pair = n_ao * (n_ao + 1) // 2
        self.packed = np.zeros(n_pair * (n_pair + 1) // 2)

    @staticmethod
    def _pair(i, j):
        if i < j:
            i, j = j, i
        return i * (i + 1) // 2 + j

    def index(self, p, q, r, s):
        return self._pair(self._pair(p, q), self._pair(r, s))

    def __getitem__(self, pqrs):
        p, q, r, s = pqrs
        return self.packed[self.index(p, q, r, s)]

    def set(self, p, q, r, s, value):
        self.packed[self.index(p, q, r, s)] = value

    def dense(self) -> np.ndarray:
        n = self.n_ao
        ar = np.arange(n)
        pair = np.where(ar[:, None] >= ar[None, :],
                        ar[:, None] * (ar[:, None] + 1) // 2 + ar[None, :],
                        ar[None, :] * (ar[None, :] + 1) // 2 + ar[:, None])
        pq = pair[:, :, None, None]
        rs = pair[None, None, :, :]
        idx = np.where(pq >= rs, pq * (pq + 1) // 2 + rs, rs * (rs + 1) // 2 + pq)
        return self.packed[idx]


@dataclass(frozen=True)
class IntegralSet:
    """AO-basis integral matrices and the nuclear repulsion constant."""

    S: np.ndarray
    T: np.ndarray
    V: np.ndarray
    eri: ERITensor
    e_nuc: float
    n_ao: int


# ---------------------------------------------------------------------------
# basis data


def _load_basis_table(name: str) -> dict:
    key = name.lower()
    if key in _HIGH_L_BASES:
        raise BasisError(
            f"basis {name} requires {_HIGH_L_BASES[key]} shells: unsupported angular "
            "momentum (s, p and Cartesian d only)")
    if key not in _BASIS_FILES:
        raise BasisError(f"unknown basis {name!r}; available: {sorted(_BASIS_FILES)}")
    text = (importlib.resources.files("vqecalc") / "basisdata" / _BASIS_FILES[key]).read_text()
    table: dict[str, list] = {}
    element = None
    shells: list = []
    rows_left = 0
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if rows_left:
            vals = [float(v) for v in line.split()]
            current[1].append(vals)
            rows_left -= 1
            continue
        if line == "*":
            table[element] = shells
            element, shells = None, []
            continue
        parts = line.split()
        if element is None:
            element = parts[0]
            continue
        letter, count = parts[0].upper(), int(parts[1])
        current = (letter, [])
        shells.append(current)
        rows_left = count
    return table


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def _primitive_norm(a, lx, ly, lz):
    l_tot = lx + ly + lz
    pre = (2.0 * a / np.pi) ** 0.75 * (4.0 * a) ** (l_tot / 2.0)
    return pre / np.sqrt(_double_factorial(2 * lx - 1)
                         * _double_factorial(2 * ly - 1)
                         * _double_factorial(2 * lz - 1))


def _self_overlap(exps, coefs, powers):
    lx, ly, lz = powers
    a = np.asarray(exps)[:, None]
    b = np.asarray(exps)[None, :]
    p = a + b
    val = ((np.pi / p) ** 1.5
           * _double_factorial(2 * lx - 1) / (2 * p) ** lx
           * _double_factorial(2 * ly - 1) / (2 * p) ** ly
           * _double_factorial(2 * lz - 1) / (2 * p) ** lz)
    c = np.asarray(coefs)
    return float(c @ val @ c)


def build_basis(name: str, g: Geometry) -> BasisSet:
    """Place the named basis on every atom of g, normalizing each Cartesian AO."""
    table = _load_basis_table(name)
    shells: list[Shell] = []
    for atom_index, sym in enumerate(g.symbols):
        if sym not in table:
            raise BasisError(f"element {sym} not available in basis {name}")
        for letter, rows in table[sym]:
            arr = np.array(rows)
            exps = arr[:, 0]
            if letter == "SP":
                shells.append(Shell(atom_index, 0, exps, arr[:, 1].copy()))
                shells.append(Shell(atom_index, 1, exps, arr[:, 2].copy()))
            else:
                if letter not in SHELL_LETTERS:
                    raise BasisError(f"unsupported shell letter {letter!r} in basis {name}")
                shells.append(Shell(atom_index, SHELL_LETTERS[letter], exps, arr[:, 1].copy()))

    prepared: list[Shell] = []
    ao_shell: list[int] = []
    ao_powers: list[tuple[int, int, int]] = []
    ao_norms: list[float] = []
    for si, sh in enumerate(shells):
        # fold the (L,0,0)-type primitive norm into the coefficients
        pn = np.array([_primitive_norm(a, sh.L, 0, 0) for a in sh.exponents])
        coefs = sh.coefficients * pn
        prepared.append(Shell(sh.center, sh.L, sh.exponents.copy(), coefs))
        for powers in CARTESIAN_POWERS[sh.L]:
            ao_shell.append(si)
            ao_powers.append(powers)
            ao_norms.append(1.0 / np.sqrt(_self_overlap(sh.exponents, coefs, powers)))
    return BasisSet(name.lower(), tuple(prepared), tuple(ao_shell), tuple(ao_powers),
                    np.array(ao_norms))


# ---------------------------------------------------------------------------
# Boys function

_BOYS_SWITCH = 35.0
_BOYS_SERIES_TERMS = 130


def boys(m_max: int, x: np.ndarray) -> np.ndarray:
    """Boys function F_m(x) for m = 0..m_max; returns shape x.shape + (m_max+1,).

    Series plus downward recursion below x=35, asymptotic plus upward
    recursion above; absolute accuracy ~1e-14.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty((flat.size, m_max + 1))
    ex = np.exp(-flat)

    small = flat < _BOYS_SWITCH
    if np.any(small):
        xs = flat[small]
        term = np.full(xs.shape, 1.0 / (2 * m_max + 1))
        acc = term.copy()
        for k in range(1, _BOYS_SERIES_TERMS):
            term = term * 2.0 * xs / (2 * m_max + 2 * k + 1)
            acc += term
        fm = acc * ex[small]
        out[small, m_max] = fm
        for m in range(m_max - 1, -1, -1):
            fm = (2.0 * xs * fm + ex[small]) / (2 * m + 1)
            out[small, m] = fm

    large = ~small
    if np.any(large):
        xl = flat[large]
        f0 = 0.5 * np.sqrt(np.pi / xl)
        out[large, 0] = f0
        fm = f0
        for m in range(m_max):
            fm = ((2 * m + 1) * fm - ex[large]) / (2.0 * xl)
            out[large, m + 1] = fm

    return out.reshape(x.shape + (m_max + 1,))


# ---------------------------------------------------------------------------
# Hermite machinery


def _hermite_e(l1, l2, a, b, AB):
    """Hermite expansion coefficients for one dimension.

    a, b: (npair,) exponent arrays; AB: scalar separation along the axis.
    Returns array (npair, l1+1, l2+1, l1+l2+1) of E[i, j, t].
    """
    npair = a.size
    p = a + b
    mu = a * b / p
    inv2p = 0.5 / p
    PA = -b * AB / p
    PB = a * AB / p
    tmax = l1 + l2
    E = np.zeros((npair, l1 + 1, l2 + 1, tmax + 3))
    E[:, 0, 0, 0] = np.exp(-mu * AB * AB)
    for i in range(l1):
        for t in range(i + 2):
            E[:, i + 1, 0, t] = (inv2p * E[:, i, 0, t - 1] if t > 0 else 0.0) \
                + PA * E[:, i, 0, t] + (t + 1) * E[:, i, 0, t + 1]
    for j in range(l2):
        for i in range(l1 + 1):
            for t in range(i + j + 2):
                E[:, i, j + 1, t] = (inv2p * E[:, i, j, t - 1] if t > 0 else 0.0) \
                    + PB * E[:, i, j, t] + (t + 1) * E[:, i, j, t + 1]
    return E[:, :, :, : tmax + 1]


def _hermite_r(t_max, u_max, v_max, p, PC, F):
    """Auxiliary Hermite integrals R[t, u, v] from Boys values F.

    p: (...,) combined exponents; PC: (..., 3); F: (..., m_max+1) with
    m_max >= t_max+u_max+v_max. Returns (..., t_max+1, u_max+1, v_max+1).
    """
    m_max = t_max + u_max + v_max
    base = F * ((-2.0 * p)[..., None] ** np.arange(m_max + 1))
    shape = base.shape[:-1]
    R = np.zeros(shape + (m_max + 1, t_max + 1, u_max + 1, v_max + 1))
    R[..., :, 0, 0, 0] = base
    x, y, z = PC[..., 0], PC[..., 1], PC[..., 2]
    for t in range(t_max):
        R[..., : m_max - t, t + 1, 0, 0] = x[..., None] * R[..., 1: m_max - t + 1, t, 0, 0]
        if t > 0:
            R[..., : m_max - t, t + 1, 0, 0] += t * R[..., 1: m_max - t + 1, t - 1, 0, 0]
    for u in range(u_max):
        lim = m_max - t_max - u
        R[..., :lim, :, u + 1, 0] = y[..., None, None] * R[..., 1: lim + 1, :, u, 0]
        if u > 0:
            R[..., :lim, :, u + 1, 0] += u * R[..., 1: lim + 1, :, u - 1, 0]
    for v in range(v_max):
        lim = m_max - t_max - u_max - v
        R[..., :lim, :, :, v + 1] = z[..., None, None, None] * R[..., 1: lim + 1, :, :, v]
        if v > 0:
            R[..., :lim, :, :, v + 1] += v * R[..., 1: lim + 1, :, :, v - 1]
    return R[..., 0, :, :, :]


class _ShellPair:
    """Primitive-pair data for one (shell_a, shell_b) pair, prefactor-screened."""

    def __init__(self, basis, centers, ia, ib):
        sa, sb = basis.shells[ia], basis.shells[ib]
        self.ia, self.ib = ia, ib
        self.La, self.Lb = sa.L, sb.L
        A, B = centers[sa.center], centers[sb.center]
        self.A, self.B = A, B
        a = np.repeat(sa.exponents, len(sb.exponents))
        b = np.tile(sb.exponents, len(sa.exponents))
        cc = np.repeat(sa.coefficients, len(sb.coefficients)) \
            * np.tile(sb.coefficients, len(sa.coefficients))
        AB = A - B
        mu = a * b / (a + b)
        keep = np.abs(cc) * np.exp(-mu * (AB @ AB)) > PRIM_PREFACTOR_CUTOFF
        if not np.any(keep):
            keep = np.zeros_like(keep)
            keep[0] = True  # retain one pair so shapes stay simple; value ~0
        self.a, self.b, self.cc = a[keep], b[keep], cc[keep]
        self.p = self.a + self.b
        self.P = (self.a[:, None] * A + self.b[:, None] * B) / self.p[:, None]
        # E tables carry two extra j-columns for the kinetic-energy formula
        self.E = [_hermite_e(self.La, self.Lb + 2, self.a, self.b, AB[d]) for d in range(3)]
        self.comps_a = CARTESIAN_POWERS[self.La]
        self.comps_b = CARTESIAN_POWERS[self.Lb]
        self._theta = None

    @property
    def theta(self):
        """Hermite products cc * E_x E_y E_z, shape (npair, na*nb, Tx, Ty, Tz)."""
        if self._theta is None:
            T = self.La + self.Lb + 1
            nk = self.p.size
            th = np.empty((nk, len(self.comps_a) * len(self.comps_b), T, T, T))
            for ca, pa in enumerate(self.comps_a):
                for cb, pb in enumerate(self.comps_b):
                    ex = self.E[0][:, pa[0], pb[0], :]
                    ey = self.E[1][:, pa[1], pb[1], :]
                    ez = self.E[2][:, pa[2], pb[2], :]
                    th[:, ca * len(self.comps_b) + cb] = \
                        ex[:, :T, None, None] * ey[:, None, :T, None] * ez[:, None, None, :T]
            self._theta = th * self.cc[:, None, None, None, None]
        return self._theta


def _pair_overlap_kinetic(pair):
    """Contracted overlap and kinetic blocks (na_comp, nb_comp) for one shell pair."""
    na, nb = len(pair.comps_a), len(pair.comps_b)
    S = np.zeros((na, nb))
    K = np.zeros((na, nb))
    pref = (np.pi / pair.p) ** 1.5 * pair.cc
    b = pair.b
    for ca, pa in enumerate(pair.comps_a):
        for cb, pb in enumerate(pair.comps_b):
            s_dim = []
            t_dim = []
            for d in range(3):
                i, j = pa[d], pb[d]
                E = pair.E[d]
                s = E[:, i, j, 0]
                t = -2.0 * b * b * E[:, i, j + 2, 0] + b * (2 * j + 1) * E[:, i, j, 0]
                if j >= 2:
                    t -= 0.5 * j * (j - 1) * E[:, i, j - 2, 0]
                s_dim.append(s)
                t_dim.append(t)
            S[ca, cb] = np.sum(pref * s_dim[0] * s_dim[1] * s_dim[2])
            K[ca, cb] = np.sum(pref * (t_dim[0] * s_dim[1] * s_dim[2]
                                       + s_dim[0] * t_dim[1] * s_dim[2]
                                       + s_dim[0] * s_dim[1] * t_dim[2]))
    return S, K


def _pair_nuclear(pair, charges, centers):
    """Contracted nuclear-attraction block for one shell pair."""
    T = pair.La + pair.Lb + 1
    theta = pair.theta  # (nk, ncomp, T, T, T)
    nk = pair.p.size
    total = np.zeros(theta.shape[1])
    for Z, C in zip(charges, centers):
        PC = pair.P - C
        x = pair.p * np.einsum("ki,ki->k", PC, PC)
        F = boys(3 * (T - 1), x)
        R = _hermite_r(T - 1, T - 1, T - 1, pair.p, PC, F)
        total += -Z * np.einsum("k,kctuv,ktuv->c", 2.0 * np.pi / pair.p, theta, R)
    na, nb = len(pair.comps_a), len(pair.comps_b)
    return total.reshape(na, nb)


def _quartet(bra, ket):
    """ERI block (na*nb, nc*nd) for one shell-pair quartet, chemist (ab|cd)."""
    TA = bra.La + bra.Lb + 1
    TB = ket.La + ket.Lb + 1
    thA = bra.theta
    thB = ket.theta
    pP, qQ = bra.p, ket.p
    alpha = pP[:, None] * qQ[None, :] / (pP[:, None] + qQ[None, :])
    PQ = bra.P[:, None, :] - ket.P[None, :, :]
    x = alpha * np.einsum("pqi,pqi->pq", PQ, PQ)
    F = boys(3 * (TA - 1) + 3 * (TB - 1), x)
    R = _hermite_r(TA + TB - 2, TA + TB - 2, TA + TB - 2, alpha, PQ, F)
    W = 2.0 * np.pi ** 2.5 / (pP[:, None] * qQ[None, :] * np.sqrt(pP[:, None] + qQ[None, :]))

    # fold (-1)^(tau+nu+phi) into the ket Hermite products
    sgn = (-1.0) ** (np.arange(TB)[:, None, None]
                     + np.arange(TB)[None, :, None]
                     + np.arange(TB)[None, None, :])
    thB_s = thB * sgn[None, None]

    out = np.zeros((thA.shape[1], thB.shape[1]))
    for t, u, v in product(range(TA), range(TA), range(TA)):
        Rsub = R[:, :, t: t + TB, u: u + TB, v: v + TB]
        H = np.einsum("pq,pqxyz,qcxyz->pc", W, Rsub, thB_s, optimize=True)
        out += thA[:, :, t, u, v].T @ H
    return out


def nuclear_repulsion(g: Geometry) -> float:
    """Sum of Z_A Z_B / R_AB over nuclear pairs, atomic units."""
    centers = g.positions * ANGSTROM_TO_BOHR
    charges = [ATOMIC_NUMBER[s] for s in g.symbols]
    e = 0.0
    for i in range(g.n_atoms):
        for j in range(i + 1, g.n_atoms):
            e += charges[i] * charges[j] / np.linalg.norm(centers[i] - centers[j])
    return e


def compute_integrals(basis: BasisSet, g: Geometry) -> IntegralSet:
    """Overlap, kinetic, nuclear attraction, ERI tensor and nuclear repulsion."""
    centers = g.positions * ANGSTROM_TO_BOHR
    charges = [ATOMIC_NUMBER[s] for s in g.symbols]
    n = basis.n_ao
    nshell = len(basis.shells)

    offsets = np.zeros(nshell, dtype=int)
    for si in range(1, nshell):
        offsets[si] = offsets[si - 1] + basis.shells[si - 1].n_components

    pairs = {}
    for ia in range(nshell):
        for ib in range(ia + 1):
            pairs[(ia, ib)] = _ShellPair(basis, centers, ia, ib)

    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for (ia, ib), pair in pairs.items():
        sblock, kblock = _pair_overlap_kinetic(pair)
        vblock = _pair_nuclear(pair, charges, centers)
        oa, ob = offsets[ia], offsets[ib]
        na, nb = sblock.shape
        S[oa: oa + na, ob: ob + nb] = sblock
        T[oa: oa + na, ob: ob + nb] = kblock
        V[oa: oa + na, ob: ob + nb] = vblock
    iu = np.triu_indices(n, 1)
    for M in (S, T, V):
        M[iu] = M.T[iu]
    norms = basis.ao_norms
    S *= norms[:, None] * norms[None, :]
    T *= norms[:, None] * norms[None, :]
    V *= norms[:, None] * norms[None, :]

    eri = ERITensor(n)
    pair_list = list(pairs.items())
    for ip, ((ia, ib), bra) in enumerate(pair_list):
        for (ic, id_), ket in pair_list[: ip + 1]:
            block = _quartet(bra, ket)
            oa, ob, oc, od = offsets[ia], offsets[ib], offsets[ic], offsets[id_]
            na, nb = len(bra.comps_a), len(bra.comps_b)
            nc, nd = len(ket.comps_a), len(ket.comps_b)
            block = block.reshape(na, nb, nc, nd)
            for ca, cb, cc_, cd in product(range(na), range(nb), range(nc), range(nd)):
                mu, nu = oa + ca, ob + cb
                lam, sig = oc + cc_, od + cd
                val = block[ca, cb, cc_, cd] * norms[mu] * norms[nu] * norms[lam] * norms[sig]
                eri.set(mu, nu, lam, sig, val)

    smallest = float(np.linalg.eigvalsh(S)[0])
    if smallest < 1e-8:
        raise IntegralError(
            f"linearly dependent basis: smallest overlap eigenvalue {smallest:.3e} < 1e-8")

    return IntegralSet(S=S, T=T, V=V, eri=eri, e_nuc=nuclear_repulsion(g), n_ao=n)
