import numpy as np
import pytest

from conftest import h2_hamiltonian, random_two_orbital_hamiltonian
from vqecalc.qubitmap import FermionMapping, QubitOperator, map_hamiltonian
from vqecalc.statesim import (AnsatzSpec, Circuit, Gate, build_ansatz,
                              exact_lowest_eigenvalue, zero_state)
from vqecalc.vqe import (OptimizerSpec, VQEResult, default_initial_params,
                         parameter_shift_gradient, run_vqe)


def _ry_toy():
    return (QubitOperator.from_label(1, "Z0"),
            Circuit(1, (Gate("ry", (0,), param_slot=0),), 1))


@pytest.mark.parametrize("kind", ["nelder_mead", "lbfgs_parameter_shift"])
def test_toy_minimum(kind):
    H, circ = _ry_toy()
    res = run_vqe(H, circ, [0.1], OptimizerSpec(kind=kind))
    assert res.energy == pytest.approx(-1.0, abs=1e-9)
    assert res.params[0] == pytest.approx(np.pi, abs=1e-3)
    assert res.converged


@pytest.fixture(scope="module")
def h2_vqe_setup():
    full, _ = h2_hamiltonian()
    mp = FermionMapping.for_hamiltonian(full, "jw")
    return map_hamiltonian(full, "jw"), build_ansatz(AnsatzSpec("uccsd"), mp)


@pytest.mark.parametrize("kind", ["nelder_mead", "lbfgs_parameter_shift"])
def test_h2_uccsd_reaches_exact(h2_vqe_setup, kind):
    qop, circ = h2_vqe_setup
    res = run_vqe(qop, circ, np.zeros(circ.n_params), OptimizerSpec(kind=kind))
    exact = exact_lowest_eigenvalue(qop)
    assert res.energy == pytest.approx(exact, abs=1e-6)


def test_restart_from_optimum_is_cheap(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    first = run_vqe(qop, circ, np.zeros(circ.n_params))
    second = run_vqe(qop, circ, first.params)
    assert second.converged
    assert abs(second.energy - first.energy) <= 1e-9
    assert second.n_cost_evals < first.n_cost_evals


def test_parameter_shift_matches_finite_differences(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    rng = np.random.default_rng(17)
    ref = zero_state(circ.n_qubits)
    from vqecalc.statesim import apply, expectation

    def cost(theta):
        return expectation(apply(circ, theta, ref), qop)

    for _ in range(3):
        theta = rng.uniform(-0.5, 0.5, size=circ.n_params)
        grad = parameter_shift_gradient(qop, circ, theta)
        step = 1e-5
        for k in range(circ.n_params):
            e = np.zeros(circ.n_params)
            e[k] = step
            fd = (cost(theta + e) - cost(theta - e)) / (2 * step)
            assert grad[k] == pytest.approx(fd, abs=1e-6)


def test_parameter_shift_hardware_efficient():
    rng = np.random.default_rng(23)
    mp = FermionMapping("jw", n_modes=4, n_alpha=1, n_beta=1)
    circ = build_ansatz(AnsatzSpec("hardware_efficient", layers=1), mp)
    full, _ = h2_hamiltonian()
    qop = map_hamiltonian(full, "jw")
    from vqecalc.statesim import apply, expectation
    theta = rng.uniform(-1, 1, size=circ.n_params)
    grad = parameter_shift_gradient(qop, circ, theta)
    ref = zero_state(4)
    for k in range(circ.n_params):
        e = np.zeros(circ.n_params)
        e[k] = 1e-5
        fd = (expectation(apply(circ, theta + e, ref), qop)
              - expectation(apply(circ, theta - e, ref), qop)) / 2e-5
        assert grad[k] == pytest.approx(fd, abs=1e-6)


def test_variational_bound(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    exact = exact_lowest_eigenvalue(qop)
    for seed in (0, 1):
        res = run_vqe(qop, circ, default_initial_params("uccsd", circ.n_params, seed))
        assert res.energy >= exact - 1e-9

    rng = np.random.default_rng(3)
    for _ in range(2):
        h = random_two_orbital_hamiltonian(rng)
        op = map_hamiltonian(h, "jw")
        mp = FermionMapping.for_hamiltonian(h, "jw")
        c = build_ansatz(AnsatzSpec("uccsd"), mp)
        r = run_vqe(op, c, np.zeros(c.n_params))
        assert r.energy >= exact_lowest_eigenvalue(op) - 1e-9


def test_determinism(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    a = run_vqe(qop, circ, np.zeros(circ.n_params), seed=5)
    b = run_vqe(qop, circ, np.zeros(circ.n_params), seed=5)
    assert a.energy == b.energy
    assert a.n_cost_evals == b.n_cost_evals
    assert len(a.history) == len(b.history)
    for (ia, ea), (ib, eb) in zip(a.history, b.history):
        assert ia == ib and ea == eb


def test_determinism_hardware_efficient():
    full, _ = h2_hamiltonian()
    qop = map_hamiltonian(full, "jw")
    mp = FermionMapping.for_hamiltonian(full, "jw")
    circ = build_ansatz(AnsatzSpec("hardware_efficient", layers=1), mp)
    runs = [run_vqe(qop, circ, default_initial_params("hardware_efficient",
                                                      circ.n_params, seed=9),
                    OptimizerSpec(kind="nelder_mead", max_evals=400))
            for _ in range(2)]
    assert runs[0].energy == runs[1].energy
    assert runs[0].history == runs[1].history


def test_warm_start_dominance():
    rng = np.random.default_rng(31)
    base, _ = h2_hamiltonian(0.74)
    mp = FermionMapping.for_hamiltonian(base, "jw")
    circ = build_ansatz(AnsatzSpec("uccsd"), mp)
    cold_res = run_vqe(map_hamiltonian(base, "jw"), circ, np.zeros(circ.n_params))
    wins = 0
    n_trials = 10
    for _ in range(n_trials):
        # "slightly displaced": the finite-difference-step scale at which
        # warm starting is actually used by the force engine
        r = 0.74 + rng.uniform(-0.01, 0.01)
        h, _ = h2_hamiltonian(r)
        op = map_hamiltonian(h, "jw")
        warm = run_vqe(op, circ, cold_res.params)
        cold = run_vqe(op, circ, np.zeros(circ.n_params))
        if warm.n_cost_evals < cold.n_cost_evals:
            wins += 1
    assert wins >= 0.9 * n_trials


def test_eval_budget_respected(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    res = run_vqe(qop, circ, np.zeros(circ.n_params),
                  OptimizerSpec(kind="nelder_mead", max_evals=3))
    assert res.n_cost_evals <= 3
    assert not res.converged


def test_history_contract(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    res = run_vqe(qop, circ, np.zeros(circ.n_params))
    energies = [e for _, e in res.history]
    best = np.minimum.accumulate(energies)
    assert np.all(np.diff(best) <= 0.0)
    assert res.energy == pytest.approx(min(energies), abs=1e-12)
    indices = [i for i, _ in res.history]
    assert indices == sorted(indices)


def test_input_validation(h2_vqe_setup):
    qop, circ = h2_vqe_setup
    with pytest.raises(ValueError, match="parameters"):
        run_vqe(qop, circ, np.zeros(7))
    bad = QubitOperator(4, {(1, 1): 1j})
    with pytest.raises(ValueError, match="Hermitian"):
        run_vqe(bad, circ, np.zeros(circ.n_params))
    with pytest.raises(ValueError):
        OptimizerSpec(kind="adam")
    with pytest.raises(ValueError):
        OptimizerSpec(ftol=-1.0)


def test_default_init_params():
    assert np.all(default_initial_params("uccsd", 5, 3) == 0.0)
    a = default_initial_params("hardware_efficient", 5, 3)
    b = default_initial_params("hardware_efficient", 5, 3)
    assert np.array_equal(a, b)
    assert np.all(np.abs(a) <= 0.01) and np.any(a != 0.0)
