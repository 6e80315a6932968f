"""VQE driver: classical optimization of ansatz parameters against the
expectation-value cost, with exact parameter-shift gradients for the
gradient-based path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .qubitmap import QubitOperator
from .statesim import Circuit, apply_gate, expectation, n_qubits_of, zero_state

OPTIMIZER_KINDS = ("nelder_mead", "lbfgs_parameter_shift")


@dataclass(frozen=True)
class OptimizerSpec:
    """Classical optimizer selection and termination thresholds."""

    kind: str = "lbfgs_parameter_shift"
    max_evals: int = 5000
    ftol: float = 1e-9   # energy-change tolerance, Hartree
    gtol: float = 1e-7   # gradient-norm tolerance (lbfgs only)

    def __post_init__(self):
        if self.kind not in OPTIMIZER_KINDS:
            raise ValueError(f"unknown optimizer {self.kind!r}; choose from {OPTIMIZER_KINDS}")
        if self.ftol <= 0 or self.gtol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")


@dataclass
class VQEResult:
    energy: float
    params: np.ndarray
    n_cost_evals: int
    history: list = field(default_factory=list)  # (eval index, energy)
    converged: bool = False


class _Budget(Exception):
    pass


class _CostModel:
    """Caches forward states per evaluation; counts every expectation call."""

    def __init__(self, op, circuit, reference):
        self.op = op
        self.circuit = circuit
        self.reference = reference
        self.n = circuit.n_qubits
        self.n_evals = 0
        self.history = []
        self.best_energy = np.inf
        self.best_params = None
        self.max_evals = None

    def _bump(self):
        self.n_evals += 1
        if self.max_evals is not None and self.n_evals > self.max_evals:
            raise _Budget()

    def energy(self, params):
        self._bump()
        state = self.reference.astype(complex, copy=True)
        for gate in self.circuit.gates:
            apply_gate(state, gate, params, self.n)
        e = expectation(state, self.op)
        self.history.append((self.n_evals, e))
        if e < self.best_energy:
            self.best_energy = e
            self.best_params = np.array(params, dtype=float)
        return e

    def gradient(self, params):
        """Exact gradient: +-pi/2 shift applied gate by gate, chain-ruled
        onto shared parameter slots; prefix states are cached."""
        params = np.asarray(params, dtype=float)
        grad = np.zeros(self.circuit.n_params)
        gates = self.circuit.gates
        prefix = self.reference.astype(complex, copy=True)
        for gi, gate in enumerate(gates):
            if gate.param_slot is not None:
                for shift, sign in ((0.5 * np.pi, 1.0), (-0.5 * np.pi, -1.0)):
                    self._bump()
                    state = prefix.copy()
                    apply_gate(state, gate, params, self.n, extra_angle=shift)
                    for later in gates[gi + 1:]:
                        apply_gate(state, later, params, self.n)
                    grad[gate.param_slot] += \
                        sign * 0.5 * gate.coeff * expectation(state, self.op)
            apply_gate(prefix, gate, params, self.n)
        return grad


def parameter_shift_gradient(op: QubitOperator, circuit: Circuit, params,
                             reference=None) -> np.ndarray:
    """Gradient of <ref|U(params)^dag op U(params)|ref> by the shift rule."""
    ref = zero_state(circuit.n_qubits) if reference is None else reference
    return _CostModel(op, circuit, ref).gradient(np.asarray(params, dtype=float))


def default_initial_params(ansatz_kind: str, n_params: int, seed: int) -> np.ndarray:
    """Zeros for uccsd (Hartree-Fock start); seeded small random for
    hardware-efficient circuits, which have stationary gradients at zero."""
    if ansatz_kind == "uccsd":
        return np.zeros(n_params)
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.01, 0.01, size=n_params)


def run_vqe(op: QubitOperator, circuit: Circuit, init_params,
            opt: OptimizerSpec = OptimizerSpec(), seed: int = 0,
            reference=None) -> VQEResult:
    """Minimize the expectation value of op over the circuit parameters.

    Deterministic for fixed inputs and seed. The reference defaults to
    |0...0>; ansatz circuits that prepare their own reference (uccsd) rely
    on that default.
    """
    if op.hermiticity_defect() > 1e-9:
        raise ValueError("cost operator must be Hermitian")
    ref = zero_state(circuit.n_qubits) if reference is None else reference
    if n_qubits_of(ref) != circuit.n_qubits or op.n_qubits != circuit.n_qubits:
        raise ValueError("operator, circuit and reference sizes disagree")
    x0 = np.asarray(init_params, dtype=float)
    if x0.size != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {x0.size}")

    model = _CostModel(op, circuit, ref)
    model.max_evals = opt.max_evals

    if circuit.n_params == 0:
        e = model.energy(x0)
        return VQEResult(energy=e, params=x0, n_cost_evals=model.n_evals,
                         history=model.history, converged=True)

    converged = False
    try:
        if opt.kind == "nelder_mead":
            res = scipy.optimize.minimize(
                model.energy, x0, method="Nelder-Mead",
                options=dict(fatol=opt.ftol, xatol=1e-6,
                             maxfev=opt.max_evals, maxiter=opt.max_evals))
            converged = bool(res.success)
        else:
            res = scipy.optimize.minimize(
                model.energy, x0, jac=model.gradient, method="L-BFGS-B",
                options=dict(ftol=opt.ftol, gtol=opt.gtol,
                             maxfun=opt.max_evals, maxiter=opt.max_evals))
            converged = bool(res.success)
    except _Budget:
        converged = False

    # evaluate once at the optimizer's final point in case it improved on
    # the recorded best (scipy may return an extrapolated point)
    if not isinstance(model.best_params, np.ndarray):
        raise RuntimeError("optimizer made no cost evaluations")
    return VQEResult(energy=model.best_energy,
                     params=model.best_params,
                     n_cost_evals=model.n_evals,
                     history=model.history,
                     converged=converged)
