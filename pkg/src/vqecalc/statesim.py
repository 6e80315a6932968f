"""Noiseless statevector simulation: gates, ansatz circuits, expectation values.

Amplitudes are stored little-endian: qubit 0 is the least significant bit of
the basis-state index. No shot sampling anywhere; everything is exact in
double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .qubitmap import FermionMapping, QubitOperator, hartree_fock_bits, map_excitation

DENSE_DIAG_MAX_QUBITS = 14
_DENSE_EIGH_MAX = 10  # above this, the lowest eigenvalue comes from sparse Lanczos
_PAULI_CACHE_MAX_QUBITS = 11  # cached permutation/phase arrays stay small
_PACKED_EXPECTATION_MAX = 2 ** 22  # terms * dim budget for the stacked fast path


class SimulationError(RuntimeError):
    """Inconsistent circuit/state/operator dimensions or non-Hermitian input."""


# ---------------------------------------------------------------------------
# states


def zero_state(n_qubits: int) -> np.ndarray:
    s = np.zeros(2 ** n_qubits, dtype=complex)
    s[0] = 1.0
    return s


def basis_state(n_qubits: int, bits: int) -> np.ndarray:
    if not 0 <= bits < 2 ** n_qubits:
        raise SimulationError(f"basis state {bits} outside register of {n_qubits} qubits")
    s = np.zeros(2 ** n_qubits, dtype=complex)
    s[bits] = 1.0
    return s


def n_qubits_of(state: np.ndarray) -> int:
    n = int(np.log2(state.size))
    if 2 ** n != state.size:
        raise SimulationError(f"state length {state.size} is not a power of two")
    return n


def prepare_reference(mapping: FermionMapping) -> np.ndarray:
    """Computational basis state encoding the Hartree-Fock occupation vector."""
    if mapping.n_alpha > mapping.n_modes // 2 or mapping.n_beta > mapping.n_modes // 2:
        raise SimulationError("particle sector does not fit the register")
    return basis_state(mapping.n_qubits, hartree_fock_bits(mapping))


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True)
class Gate:
    kind: str                      # x | ry | rz | cnot | paulirot
    qubits: tuple[int, ...]
    param_slot: int | None = None  # None for fixed gates
    coeff: float = 1.0             # angle = coeff * params[param_slot]
    pauli: tuple[int, int] | None = None  # (x_mask, z_mask) for paulirot


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int

    def __post_init__(self):
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise SimulationError(f"gate {g.kind} addresses qubit outside register")
            if g.param_slot is not None and not 0 <= g.param_slot < self.n_params:
                raise SimulationError("parameter slot outside dense range")


@dataclass(frozen=True)
class AnsatzSpec:
    """Trial-state family: layered hardware-efficient or UCCSD excitations."""

    kind: str           # hardware_efficient | uccsd
    layers: int = 1

    def __post_init__(self):
        if self.kind not in ("hardware_efficient", "uccsd"):
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.layers < 1:
            raise ValueError("layer count must be >= 1")


def _apply_1q(state, n, q, m00, m01, m10, m11):
    view = state.reshape(-1, 2, 1 << q)
    a, b = view[:, 0].copy(), view[:, 1].copy()
    view[:, 0] = m00 * a + m01 * b
    view[:, 1] = m10 * a + m11 * b


@lru_cache(maxsize=4096)
def _prepared_pauli(n, x, z):
    """Permutation and phase arrays realizing P(x, z) on an n-qubit register."""
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ x
    signs = 1.0 - 2.0 * (np.bitwise_count((src & z).astype(np.uint64)) & np.uint64(1))
    phase = (1j ** ((x & z).bit_count() % 4)) * signs
    src.setflags(write=False)
    phase.setflags(write=False)
    return src, phase


def _pauli_action(state, n, x, z):
    """P|state> for the stored Pauli (x, z); new array."""
    if n <= _PAULI_CACHE_MAX_QUBITS:
        src, phase = _prepared_pauli(n, x, z)
        return phase * state[src]
    idx = np.arange(state.size, dtype=np.uint64)
    src = idx ^ np.uint64(x)
    signs = 1.0 - 2.0 * (np.bitwise_count(src & np.uint64(z)) & np.uint64(1)).astype(float)
    phase = 1j ** ((x & z).bit_count() % 4)
    return phase * signs * state[src]


def apply_gate(state: np.ndarray, gate: Gate, params, n: int, extra_angle: float = 0.0):
    """Apply one gate in place; params supplies rotation angles."""
    theta = 0.0
    if gate.param_slot is not None:
        theta = gate.coeff * params[gate.param_slot]
    theta += extra_angle
    if gate.kind == "x":
        (q,) = gate.qubits
        view = state.reshape(-1, 2, 1 << q)
        view[:, [0, 1]] = view[:, [1, 0]]
    elif gate.kind == "ry":
        (q,) = gate.qubits
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        _apply_1q(state, n, q, c, -s, s, c)
    elif gate.kind == "rz":
        (q,) = gate.qubits
        _apply_1q(state, n, q, np.exp(-0.5j * theta), 0.0, 0.0, np.exp(0.5j * theta))
    elif gate.kind == "cnot":
        ctrl, tgt = gate.qubits
        idx = np.arange(state.size)
        sel = (idx >> ctrl) & 1 == 1
        state[sel] = state[idx[sel] ^ (1 << tgt)]
    elif gate.kind == "paulirot":
        x, z = gate.pauli
        rotated = _pauli_action(state, n, x, z)
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        state *= c
        state -= 1j * s * rotated
    else:
        raise SimulationError(f"unknown gate kind {gate.kind!r}")
    return state


def apply(circuit: Circuit, params, state: np.ndarray) -> np.ndarray:
    """Run the circuit on a copy of state; the input is left unmodified."""
    params = np.asarray(params, dtype=float)
    if params.size != circuit.n_params:
        raise SimulationError(
            f"expected {circuit.n_params} parameters, got {params.size}")
    n = n_qubits_of(state)
    if n != circuit.n_qubits:
        raise SimulationError("state and circuit register sizes differ")
    out = state.astype(complex, copy=True)
    for gate in circuit.gates:
        apply_gate(out, gate, params, n)
    return out


# ---------------------------------------------------------------------------
# observables


def _packed_terms(op: QubitOperator, n: int):
    """Stacked (coeffs, permutations, phases) arrays, memoized on the operator."""
    packed = getattr(op, "_packed", None)
    if packed is None:
        coeffs, srcs, phases = [], [], []
        for x, z, c in op.items():
            src, phase = _prepared_pauli(n, x, z)
            coeffs.append(c)
            srcs.append(src)
            phases.append(phase)
        packed = (np.array(coeffs), np.array(srcs), np.array(phases))
        op._packed = packed
    return packed


def expectation(state: np.ndarray, op: QubitOperator) -> float:
    """<state|op|state>, term by term; raises if the result is not real."""
    n = n_qubits_of(state)
    if n != op.n_qubits:
        raise SimulationError(f"operator on {op.n_qubits} qubits, state on {n}")
    conj = state.conj()
    if n <= _PAULI_CACHE_MAX_QUBITS and op.n_terms * state.size <= _PACKED_EXPECTATION_MAX:
        coeffs, srcs, phases = _packed_terms(op, n)
        total = complex(coeffs @ ((phases * state[srcs]) @ conj))
    else:
        total = 0.0 + 0.0j
        for x, z, c in op.items():
            total += c * np.dot(conj, _pauli_action(state, n, x, z))
    if abs(total.imag) >= 1e-9:
        raise SimulationError(f"expectation has imaginary residue {total.imag:.3e}")
    return float(total.real)


def operator_matrix(op: QubitOperator) -> np.ndarray:
    """Dense matrix image (column construction from the Pauli masks)."""
    if op.n_qubits > _DENSE_EIGH_MAX + 2:
        raise SimulationError(f"dense image of {op.n_qubits} qubits refused")
    dim = 2 ** op.n_qubits
    H = np.zeros((dim, dim), dtype=complex)
    col = np.arange(dim, dtype=np.uint64)
    for x, z, c in op.items():
        rows = col ^ np.uint64(x)
        signs = 1.0 - 2.0 * (np.bitwise_count(col & np.uint64(z)) & np.uint64(1)).astype(float)
        phase = 1j ** ((x & z).bit_count() % 4)
        H[rows, col] += c * phase * signs
    return H


def _linear_operator(op: QubitOperator):
    n = op.n_qubits
    terms = list(op.items())

    def matvec(v):
        out = np.zeros_like(v, dtype=complex)
        for x, z, c in terms:
            out += c * _pauli_action(v.astype(complex), n, x, z)
        return out

    dim = 2 ** n
    return scipy.sparse.linalg.LinearOperator((dim, dim), matvec=matvec, dtype=complex)


def exact_spectrum(op: QubitOperator) -> np.ndarray:
    """All eigenvalues, ascending (dense; small registers only)."""
    defect = op.hermiticity_defect()
    if defect > 1e-9:
        raise SimulationError(f"operator not Hermitian (max |Im coeff| {defect:.3e})")
    return np.linalg.eigvalsh(operator_matrix(op))


def exact_lowest_eigenvalue(op: QubitOperator) -> float:
    """Smallest eigenvalue of the Hermitian image; capped at 14 qubits."""
    if op.n_qubits > DENSE_DIAG_MAX_QUBITS:
        raise SimulationError(
            f"{op.n_qubits} qubits exceeds the {DENSE_DIAG_MAX_QUBITS}-qubit "
            "exact-diagonalization cap")
    defect = op.hermiticity_defect()
    if defect > 1e-9:
        raise SimulationError(f"operator not Hermitian (max |Im coeff| {defect:.3e})")
    if op.n_qubits <= _DENSE_EIGH_MAX:
        return float(exact_spectrum(op)[0])
    vals = scipy.sparse.linalg.eigsh(_linear_operator(op), k=1, which="SA",
                                     tol=1e-12, maxiter=20000)[0]
    return float(vals[0])


def lowest_eigenvalues(op: QubitOperator, k: int = 4) -> np.ndarray:
    """The k smallest eigenvalues, ascending."""
    if op.n_qubits <= _DENSE_EIGH_MAX:
        return exact_spectrum(op)[:k]
    if op.n_qubits > DENSE_DIAG_MAX_QUBITS:
        raise SimulationError("register too large for exact diagonalization")
    vals = scipy.sparse.linalg.eigsh(_linear_operator(op), k=k, which="SA",
                                     tol=1e-12, maxiter=20000)[0]
    return np.sort(vals)


# ---------------------------------------------------------------------------
# ansatz construction


def generate_excitations(n_elec: int, n_orb: int) -> list[tuple[tuple, tuple]]:
    """Sz-preserving singles and doubles from the closed-shell reference.

    Spin orbitals are blocked (alpha 0..n_orb-1, beta n_orb..2n_orb-1);
    each entry is (occupied_tuple, virtual_tuple).
    """
    n_occ = n_elec // 2
    occ_a = list(range(n_occ))
    vir_a = list(range(n_occ, n_orb))
    occ_b = [n_orb + i for i in occ_a]
    vir_b = [n_orb + a for a in vir_a]
    singles = [((i,), (a,)) for i in occ_a for a in vir_a]
    singles += [((i,), (a,)) for i in occ_b for a in vir_b]

    occ_all = occ_a + occ_b
    vir_all = vir_a + vir_b

    def spin(so):
        return 0 if so < n_orb else 1

    doubles = []
    for ii in range(len(occ_all)):
        for jj in range(ii + 1, len(occ_all)):
            i, j = occ_all[ii], occ_all[jj]
            for aa in range(len(vir_all)):
                for bb in range(aa + 1, len(vir_all)):
                    a, b = vir_all[aa], vir_all[bb]
                    if spin(i) + spin(j) == spin(a) + spin(b):
                        doubles.append(((i, j), (a, b)))
    return singles + doubles


def build_ansatz(spec: AnsatzSpec, mapping: FermionMapping) -> Circuit:
    """Parameterized trial-state circuit for the given encoding and sector."""
    n = mapping.n_qubits
    if spec.kind == "hardware_efficient":
        gates = []
        slot = 0
        for _ in range(spec.layers):
            for q in range(n):
                gates.append(Gate("ry", (q,), param_slot=slot))
                slot += 1
            for q in range(n - 1):
                gates.append(Gate("cnot", (q, q + 1)))
        for q in range(n):
            gates.append(Gate("ry", (q,), param_slot=slot))
            slot += 1
        return Circuit(n, tuple(gates), slot)

    n_orb = mapping.n_modes // 2
    n_elec = mapping.n_alpha + mapping.n_beta
    if n_elec % 2 != 0 or mapping.n_alpha != mapping.n_beta:
        raise SimulationError("uccsd ansatz needs a closed-shell sector")
    excitations = generate_excitations(n_elec, n_orb)
    if not excitations and n_elec not in (0, 2 * n_orb):
        raise SimulationError("no excitations available for this sector")

    gates = []
    bits = hartree_fock_bits(mapping)
    for q in range(n):
        if (bits >> q) & 1:
            gates.append(Gate("x", (q,)))
    for slot, (occ, vir) in enumerate(excitations):
        gen = map_excitation(mapping, occ, vir)
        for x, z, c in sorted(gen.items()):
            if x == 0 and z == 0:
                continue  # identity rotation = global phase
            # exp(theta * c * P) with c purely imaginary -> PauliRot angle -2*Im(c)*theta
            gates.append(Gate("paulirot", (), param_slot=slot,
                              coeff=-2.0 * c.imag, pauli=(x, z)))
    return Circuit(n, tuple(gates), len(excitations))
