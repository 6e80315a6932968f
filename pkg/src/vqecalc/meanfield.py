"""Restricted Hartree-Fock with DIIS, and the AO->MO integral transformation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrals import IntegralSet


class SCFError(RuntimeError):
    """SCF failed to converge; carries the last energy and residual."""

    def __init__(self, message, e_total=None, residual=None):
        super().__init__(message)
        self.e_total = e_total
        self.residual = residual


@dataclass(frozen=True)
class SCFResult:
    """Converged RHF solution: total energy, MO coefficients, orbital energies."""

    e_total: float
    C: np.ndarray      # AO x MO
    eps: np.ndarray    # ascending orbital energies
    n_iter: int
    converged: bool


@dataclass(frozen=True)
class MOIntegrals:
    """Spatial MO-basis integrals, chemist (pq|rs) convention."""

    h1: np.ndarray
    g2: np.ndarray
    n_mo: int


DIIS_DEPTH = 8
DAMPING = 0.5
RMS_D_TOL = 1e-8
DE_TOL = 1e-10


def _orthogonalizer(S):
    w, U = np.linalg.eigh(S)
    if w[0] < 1e-8:
        raise SCFError(f"near-singular overlap (smallest eigenvalue {w[0]:.3e})")
    return U @ np.diag(w ** -0.5) @ U.T


def run_rhf(ints: IntegralSet, n_electrons: int, max_iter: int = 200) -> SCFResult:
    """Closed-shell Roothaan SCF from the core-Hamiltonian guess.

    Converges when the RMS density change drops below 1e-8 and the energy
    change below 1e-10. DIIS (depth 8) with plain damping as fallback.
    """
    if n_electrons % 2 != 0 or n_electrons < 2:
        raise ValueError(f"RHF needs a positive even electron count, got {n_electrons}")
    if n_electrons > 2 * ints.n_ao:
        raise ValueError(f"{n_electrons} electrons do not fit in {ints.n_ao} orbitals")
    n_occ = n_electrons // 2

    S, H = ints.S, ints.T + ints.V
    eri = ints.eri.dense()
    X = _orthogonalizer(S)

    def fock(P):
        J = np.einsum("pqrs,rs->pq", eri, P)
        K = np.einsum("prqs,rs->pq", eri, P)
        return H + J - 0.5 * K

    def density(F):
        eps, Cp = np.linalg.eigh(X.T @ F @ X)
        C = X @ Cp
        Cocc = C[:, :n_occ]
        return 2.0 * Cocc @ Cocc.T, C, eps

    P, C, eps = density(H)
    e_old = 0.0
    fock_list, err_list = [], []
    converged = False
    n_iter = 0
    rms = np.inf

    for n_iter in range(1, max_iter + 1):
        F = fock(P)
        e_elec = 0.5 * np.sum(P * (H + F))
        err = X.T @ (F @ P @ S - S @ P @ F) @ X
        fock_list.append(F)
        err_list.append(err)
        if len(fock_list) > DIIS_DEPTH:
            fock_list.pop(0)
            err_list.pop(0)

        F_eff = F
        if len(fock_list) > 1:
            m = len(fock_list)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    B[i, j] = np.sum(err_list[i] * err_list[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                coef = np.linalg.solve(B, rhs)[:m]
                F_eff = sum(c * f for c, f in zip(coef, fock_list))
            except np.linalg.LinAlgError:
                # singular DIIS system: damp instead
                F_eff = DAMPING * F + (1.0 - DAMPING) * fock_list[-2]

        P_new, C, eps = density(F_eff)
        rms = np.sqrt(np.mean((P_new - P) ** 2))
        de = abs(e_elec - e_old)
        P, e_old = P_new, e_elec
        if rms < RMS_D_TOL and de < DE_TOL:
            converged = True
            break

    e_total = e_old + ints.e_nuc
    if not converged:
        raise SCFError(
            f"SCF not converged in {max_iter} iterations (rms dP {rms:.3e})",
            e_total=e_total, residual=rms)
    return SCFResult(e_total=float(e_total), C=C, eps=eps, n_iter=n_iter, converged=True)


def transform_to_mo(ints: IntegralSet, C: np.ndarray) -> MOIntegrals:
    """MO-basis h1 and (pq|rs) via four O(n^5) quarter transformations."""
    if C.shape[0] != ints.n_ao:
        raise ValueError(f"coefficient rows {C.shape[0]} != n_ao {ints.n_ao}")
    ortho = C.T @ ints.S @ C
    if np.abs(ortho - np.eye(C.shape[1])).max() > 1e-6:
        raise ValueError("MO coefficients are not orthonormal under S")
    h1 = C.T @ (ints.T + ints.V) @ C
    g = ints.eri.dense()
    g = np.einsum("pqrs,pi->iqrs", g, C, optimize=True)
    g = np.einsum("iqrs,qj->ijrs", g, C, optimize=True)
    g = np.einsum("ijrs,rk->ijks", g, C, optimize=True)
    g = np.einsum("ijks,sl->ijkl", g, C, optimize=True)
    return MOIntegrals(h1=h1, g2=g, n_mo=C.shape[1])


def rhf_energy_from_mo(mo: MOIntegrals, e_nuc: float, n_electrons: int) -> float:
    """Closed-shell energy reassembled from MO integrals (consistency check)."""
    n_occ = n_electrons // 2
    o = slice(0, n_occ)
    e = 2.0 * np.trace(mo.h1[o, o])
    e += 2.0 * np.einsum("iijj->", mo.g2[o, o, o, o])
    e -= np.einsum("ijji->", mo.g2[o, o, o, o])
    return float(e + e_nuc)
