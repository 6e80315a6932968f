import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_two_orbital_hamiltonian
from oracles import operator_matrix_kron, pauli_matrix
from vqecalc.qubitmap import FermionMapping, QubitOperator, map_hamiltonian
from vqecalc.statesim import (AnsatzSpec, Circuit, Gate, SimulationError, apply,
                              basis_state, build_ansatz, exact_lowest_eigenvalue,
                              exact_spectrum, expectation, generate_excitations,
                              lowest_eigenvalues, operator_matrix, prepare_reference,
                              zero_state)
from vqecalc.meanfield import run_rhf
from vqecalc.integrals import build_basis, compute_integrals


def test_prepare_reference_jw(h2_full):
    mp = FermionMapping.for_hamiltonian(h2_full, "jw")
    ref = prepare_reference(mp)
    assert ref[0b0101] == 1.0  # qubits 0 and 2 set
    assert np.sum(np.abs(ref)) == 1.0


def test_prepare_reference_zero_electrons():
    mp = FermionMapping("jw", n_modes=4, n_alpha=0, n_beta=0)
    assert prepare_reference(mp)[0] == 1.0


def test_reference_expectation_is_rhf(h2_full, h2_scf):
    for kind in ("jw", "bk", "parity"):
        mp = FermionMapping.for_hamiltonian(h2_full, kind)
        e = expectation(prepare_reference(mp), map_hamiltonian(h2_full, kind))
        assert e == pytest.approx(h2_scf.e_total, abs=1e-8)


def test_ry_pi_flips():
    circ = Circuit(1, (Gate("ry", (0,), param_slot=0),), 1)
    out = apply(circ, [np.pi], zero_state(1))
    fidelity = abs(out[1]) ** 2
    assert fidelity == pytest.approx(1.0, abs=1e-12)


def test_cnot_on_control_set():
    # |q1 q0> = |1 0>: control qubit 0 clear -> no flip; control set -> flip
    circ = Circuit(2, (Gate("cnot", (0, 1)),), 0)
    out = apply(circ, [], basis_state(2, 0b01))
    assert abs(out[0b11]) == pytest.approx(1.0, abs=1e-12)
    out2 = apply(circ, [], basis_state(2, 0b10))
    assert abs(out2[0b10]) == pytest.approx(1.0, abs=1e-12)


def test_paulirot_matches_matrix_exponential():
    rng = np.random.default_rng(8)
    for _ in range(6):
        n = 3
        x, z = int(rng.integers(0, 8)), int(rng.integers(0, 8))
        label = None
        op = QubitOperator(n, {(x, z): 1.0})
        (pstr,) = op.terms
        theta = float(rng.uniform(-3, 3))
        state = rng.normal(size=8) + 1j * rng.normal(size=8)
        state /= np.linalg.norm(state)
        circ = Circuit(n, (Gate("paulirot", (), param_slot=0, pauli=(x, z)),), 1)
        out = apply(circ, [theta], state.copy())
        U = scipy.linalg.expm(-0.5j * theta * pauli_matrix(pstr.label(), n))
        ref = U @ state
        assert np.abs(out - ref).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["ry", "rz", "x", "cnot"]),
                          st.floats(-3, 3)), min_size=1, max_size=12),
       st.integers(0, 2 ** 31 - 1))
def test_norm_preserved(gate_specs, seed):
    n = 3
    rng = np.random.default_rng(seed)
    gates, params = [], []
    for kind, angle in gate_specs:
        if kind == "cnot":
            q = int(rng.integers(0, n - 1))
            gates.append(Gate("cnot", (q, q + 1)))
        elif kind == "x":
            gates.append(Gate("x", (int(rng.integers(0, n)),)))
        else:
            gates.append(Gate(kind, (int(rng.integers(0, n)),), param_slot=len(params)))
            params.append(angle)
    state = rng.normal(size=8) + 1j * rng.normal(size=8)
    state /= np.linalg.norm(state)
    out = apply(Circuit(n, tuple(gates), len(params)), params, state)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-12


def test_apply_leaves_input_unmodified():
    state = zero_state(2)
    circ = Circuit(2, (Gate("x", (0,)),), 0)
    _ = apply(circ, [], state)
    assert state[0] == 1.0


def test_apply_param_count_mismatch():
    circ = Circuit(1, (Gate("ry", (0,), param_slot=0),), 1)
    with pytest.raises(SimulationError, match="parameters"):
        apply(circ, [0.1, 0.2], zero_state(1))


def test_expectation_basics():
    z0 = QubitOperator.from_label(1, "Z0")
    assert expectation(zero_state(1), z0) == pytest.approx(1.0)
    ident = QubitOperator.identity(3, -2.75)
    rng = np.random.default_rng(0)
    s = rng.normal(size=8) + 1j * rng.normal(size=8)
    s /= np.linalg.norm(s)
    assert expectation(s, ident) == pytest.approx(-2.75, abs=1e-12)


def test_expectation_against_dense_oracle():
    rng = np.random.default_rng(4)
    for _ in range(5):
        n = 3
        op = QubitOperator(n)
        for _ in range(6):
            x, z = int(rng.integers(0, 8)), int(rng.integers(0, 8))
            c = complex(rng.normal(), 0.0)
            op = op + QubitOperator(n, {(x, z): c})
        # hermitize: add dagger (real coefficients on Pauli strings are Hermitian)
        s = rng.normal(size=8) + 1j * rng.normal(size=8)
        s /= np.linalg.norm(s)
        val = expectation(s, op)
        ref = np.real(s.conj() @ operator_matrix_kron(op) @ s)
        assert val == pytest.approx(ref, abs=1e-10)


def test_expectation_errors():
    y0 = QubitOperator(1, {(1, 1): 1j})  # i*Y0, anti-Hermitian
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    state = (plus + 0j) * np.exp(0.3j)
    state = np.array([0.6, 0.8j])
    with pytest.raises(SimulationError, match="imaginary"):
        expectation(state, y0)
    with pytest.raises(SimulationError, match="qubits"):
        expectation(zero_state(2), QubitOperator.from_label(3, "Z0"))


def test_exact_lowest_basics(h2_full):
    assert exact_lowest_eigenvalue(QubitOperator.from_label(1, "Z0")) == pytest.approx(-1.0)
    op = map_hamiltonian(h2_full, "jw")
    e = exact_lowest_eigenvalue(op)
    assert e == pytest.approx(-1.137, abs=5e-4)
    shifted = op + QubitOperator.identity(4, 0.625)
    assert exact_lowest_eigenvalue(shifted) == pytest.approx(e + 0.625, abs=1e-12)


def test_exact_spectrum_matches_oracle(h2_full):
    op = map_hamiltonian(h2_full, "bk")
    ours = exact_spectrum(op)
    ref = np.linalg.eigvalsh(operator_matrix_kron(op))
    assert np.abs(ours - ref).max() < 1e-10


def test_operator_matrix_matches_kron_oracle():
    rng = np.random.default_rng(9)
    op = QubitOperator(3)
    for _ in range(5):
        op = op + QubitOperator(3, {(int(rng.integers(0, 8)), int(rng.integers(0, 8))):
                                    complex(rng.normal(), rng.normal())})
    assert np.abs(operator_matrix(op) - operator_matrix_kron(op)).max() < 1e-12


def test_diagonalization_cap():
    big = QubitOperator.identity(15)
    with pytest.raises(SimulationError, match="cap"):
        exact_lowest_eigenvalue(big)


def test_sparse_lowest_matches_dense_on_11_qubits():
    rng = np.random.default_rng(14)
    n = 11
    op = QubitOperator(n)
    mask = (1 << n) - 1
    for _ in range(12):
        x = int(rng.integers(0, mask + 1))
        z = int(rng.integers(0, mask + 1))
        op = op + QubitOperator(n, {(x, z): complex(rng.normal())})
        op = op + QubitOperator(n, {(x, z): complex(rng.normal())})
    op = op.simplify(0.0)
    e_sparse = exact_lowest_eigenvalue(op)
    M = operator_matrix_kron(op)
    e_dense = float(np.linalg.eigvalsh(M)[0])
    assert e_sparse == pytest.approx(e_dense, abs=1e-9)


def test_hardware_efficient_parameter_count():
    mp = FermionMapping("jw", n_modes=4, n_alpha=1, n_beta=1)
    circ = build_ansatz(AnsatzSpec("hardware_efficient", layers=2), mp)
    assert circ.n_params == 12  # n*(layers+1)
    kinds = [g.kind for g in circ.gates]
    assert kinds.count("cnot") == 6


def test_uccsd_h2_parameter_count(h2_full):
    mp = FermionMapping.for_hamiltonian(h2_full, "jw")
    circ = build_ansatz(AnsatzSpec("uccsd"), mp)
    assert circ.n_params == 3

    # brute-force oracle: enumerate all Sz-preserving excitations
    def brute(n_elec, n_orb):
        occ = [0, n_orb]
        vir = [1, 1 + n_orb]
        singles = [(i, a) for i in occ for a in vir
                   if (i < n_orb) == (a < n_orb)]
        doubles = []
        for i in occ:
            for j in occ:
                if j <= i:
                    continue
                for a in vir:
                    for b in vir:
                        if b <= a:
                            continue
                        sz = (i < n_orb) + (j < n_orb)
                        if sz == (a < n_orb) + (b < n_orb):
                            doubles.append((i, j, a, b))
        return len(singles) + len(doubles)

    assert brute(2, 2) == 3
    assert len(generate_excitations(2, 2)) == 3


def test_uccsd_zero_params_is_reference(h2_full):
    for kind in ("jw", "parity", "bk"):
        mp = FermionMapping.for_hamiltonian(h2_full, kind)
        circ = build_ansatz(AnsatzSpec("uccsd"), mp)
        out = apply(circ, np.zeros(circ.n_params), zero_state(mp.n_qubits))
        ref = prepare_reference(mp)
        assert np.abs(out - ref).max() < 1e-12


def test_uccsd_zero_params_reduced(h2_full):
    mp = FermionMapping.for_hamiltonian(h2_full, "parity", reduce_two_qubits=True)
    circ = build_ansatz(AnsatzSpec("uccsd"), mp)
    out = apply(circ, np.zeros(circ.n_params), zero_state(mp.n_qubits))
    assert np.abs(out - prepare_reference(mp)).max() < 1e-12


def test_lowest_eigenvalues_sorted(h2_full):
    vals = lowest_eigenvalues(map_hamiltonian(h2_full, "jw"), k=4)
    assert len(vals) == 4
    assert np.all(np.diff(vals) >= -1e-12)


def test_ansatz_spec_validation():
    with pytest.raises(ValueError):
        AnsatzSpec("foo")
    with pytest.raises(ValueError):
        AnsatzSpec("uccsd", layers=0)
