"""Block encoding of the arrowhead Hamiltonian and the qubitized simulation circuit.

Encoding: U = U_row^dagger U_col acting on registers a (4 qubits) and s = (r, v).
Column preparation for a data index k (r=0, v=k)::

    a0 <- R(c)                      diagonal branch (a0=0) / border branch (a0=1)
    a1 <- R(d_k)                    variable on v
    a2 <- R(b_k)   if a0 = 1        variable on v

and for the field index (r=1, v=0): a0 <- 1, v <- uniform superposition.
Row preparation is the same with R(conj d_j) on a3 instead of a1, R(conj b_j)
on a2, followed by r ^= a0 so that the border amplitudes of rows and columns
meet in the a0=1 sector with opposite r. Unused indices (r=1, v != 0) are
flagged on a1 by both preparations, so the top-left block is H' (+) identity.

Simulation: the b-controlled walk W = (2 Pi - 1) U_h, where
U_h = |0><1|_q U + |1><0|_q U^dagger is a Hermitian unitary with
<+,0|U_h|+,0> = beta H, is interleaved with single-qubit phase programs on b
(see :mod:`vlasim.phases`). Every W costs two queries.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import phases as ph
from .oracle import eigendecompose, exact_evolve
from .plasma import (
    ArrowheadHamiltonian,
    EncodingParams,
    LandauConfig,
    build_hamiltonian,
    compute_encoding,
    initial_state,
)
from .statevector import (
    GateOp,
    RegisterLayout,
    StateVector,
    apply_sequence,
    controlled,
    dagger,
    global_phase,
    hadamard,
    pauli_x,
    phase_shift,
    reflect_zero,
    rotation,
    variable_rotation,
)


class GoodSubspaceError(ValueError):
    pass


def layout_for(enc_or_n) -> RegisterLayout:
    n = enc_or_n.n_points if isinstance(enc_or_n, EncodingParams) else int(enc_or_n)
    return RegisterLayout(n.bit_length() - 1)


def _flag_unused(layout: RegisterLayout) -> list:
    r = layout.qubit("r")
    flag = layout.qubit("a", 1)
    at_zero = {q: 0 for q in layout.qubits("v")}
    return [pauli_x(flag).controlled({r: 1}), pauli_x(flag).controlled({r: 1, **at_zero})]


def _spread_field(layout: RegisterLayout) -> list:
    r = layout.qubit("r")
    ctrl = {r: 1, layout.qubit("a", 1): 0}
    ops = [pauli_x(layout.qubit("a", 0)).controlled(ctrl)]
    ops += [hadamard(q).controlled(ctrl) for q in layout.qubits("v")]
    return ops


def build_u_col(enc: EncodingParams, layout: Optional[RegisterLayout] = None) -> list:
    layout = layout or layout_for(enc)
    r, v = layout.qubit("r"), layout.qubits("v")
    a0, a1, a2 = (layout.qubit("a", i) for i in range(3))
    ops = _flag_unused(layout) + _spread_field(layout)
    ops += [
        rotation(a0, enc.c).controlled({r: 0}),
        variable_rotation(a1, v, enc.d).controlled({r: 0}),
        variable_rotation(a2, v, enc.b).controlled({r: 0, a0: 1}),
    ]
    return ops


def build_u_row(enc: EncodingParams, layout: Optional[RegisterLayout] = None) -> list:
    layout = layout or layout_for(enc)
    r, v = layout.qubit("r"), layout.qubits("v")
    a0, a2, a3 = (layout.qubit("a", i) for i in (0, 2, 3))
    ops = _flag_unused(layout) + _spread_field(layout)
    ops += [
        rotation(a0, enc.c).controlled({r: 0}),
        variable_rotation(a3, v, np.conj(enc.d)).controlled({r: 0}),
        variable_rotation(a2, v, np.conj(enc.b)).controlled({r: 0, a0: 1}),
        pauli_x(r).controlled({a0: 1}),
    ]
    return ops


def block_encoding(enc: EncodingParams, layout: Optional[RegisterLayout] = None) -> list:
    """Gate list for U = U_row^dagger U_col (application order)."""
    layout = layout or layout_for(enc)
    return build_u_col(enc, layout) + dagger(build_u_row(enc, layout))


def extract_block(ops: list, layout: RegisterLayout) -> np.ndarray:
    """<0|_a <j|_s U |0>_a |k>_s over all 2 N_v values of s."""
    n = layout.n_velocity
    s_idx = [layout.index(r=i // n, v=i % n) for i in range(2 * n)]
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    for col, idx in enumerate(s_idx):
        out = apply_sequence(StateVector.basis(layout, idx), ops)
        block[:, col] = out.amplitudes[s_idx]
    return block


def dense_block_encoding(h: ArrowheadHamiltonian, beta: float) -> np.ndarray:
    """Reference unitary on (ancilla qubit) x (s) with top-left block beta*H (+) 1.

    Standard dilation [[A, sqrt(1-A^2)], [sqrt(1-A^2), -A]]; used for
    differential checks of the circuit encoding.
    """
    n = h.dimension - 1
    a = np.eye(2 * n, dtype=complex)
    a[: n + 1, : n + 1] = beta * h.matrix()
    lam, vec = np.linalg.eigh(a)
    root = (vec * np.sqrt(np.clip(1 - lam**2, 0, None))) @ vec.conj().T
    return np.block([[a, root], [root, -a]])


@dataclass(frozen=True)
class EncodingCheck:
    deviation: float
    leakage: float
    unused_block_deviation: float


def verify_encoding(ops: list, h: ArrowheadHamiltonian, beta: float,
                    layout: Optional[RegisterLayout] = None) -> float:
    """max_{j,k <= N_v} |<0,j|U|0,k> - beta H_jk|; asserts D touches unused indices only."""
    check = encoding_report(ops, h, beta, layout)
    if ops and check.leakage > 1e-10:
        raise AssertionError(f"residual block couples data and unused indices ({check.leakage:.2e})")
    return check.deviation


def encoding_report(ops: list, h: ArrowheadHamiltonian, beta: float,
                    layout: Optional[RegisterLayout] = None) -> EncodingCheck:
    n = h.dimension - 1
    layout = layout or layout_for(n)
    block = extract_block(ops, layout)
    dev = float(np.max(np.abs(block[: n + 1, : n + 1] - beta * h.matrix())))
    leak = float(max(np.max(np.abs(block[: n + 1, n + 1 :]), initial=0),
                     np.max(np.abs(block[n + 1 :, : n + 1]), initial=0)))
    rest = block[n + 1 :, n + 1 :]
    unused = float(np.max(np.abs(rest - rest.conj().T), initial=0))
    return EncodingCheck(dev, leak, unused)


def hermitian_encoding(u_ops: list, layout: RegisterLayout) -> list:
    """U_h = X_q [ |1><1|_q U + |0><0|_q U^dagger ]."""
    q = layout.qubit("q")
    return controlled(dagger(u_ops), {q: 0}) + controlled(u_ops, {q: 1}) + [pauli_x(q)]


def walk_operator(u_ops: list, layout: RegisterLayout) -> list:
    """W = (2 Pi - 1) U_h with Pi = |+><+|_q (x) |0><0|_a."""
    q = layout.qubit("q")
    reflect = [hadamard(q), reflect_zero([q] + layout.qubits("a")), hadamard(q)]
    return hermitian_encoding(u_ops, layout) + reflect


def simulation_circuit(u_ops: list, schedule: ph.PhaseSchedule, layout: RegisterLayout) -> list:
    """Gate list for C = H_bq (phase programs and controlled walks) H_bq."""
    b, q = layout.qubit("b"), layout.qubit("q")
    walk = walk_operator(u_ops, layout)
    forward = controlled(walk, {b: 0})
    backward = controlled(dagger(walk), {b: 1})
    ops = [hadamard(b), hadamard(q)]
    for i, (alpha, beta_, delta) in enumerate(schedule.angles):
        if i > 0:
            ops += forward if i % 2 else backward
        ops += [phase_shift(b, delta), hadamard(b), phase_shift(b, beta_), hadamard(b),
                phase_shift(b, alpha)]
    ops += [global_phase(schedule.global_phase), hadamard(b), hadamard(q)]
    return ops


def circuit_queries(schedule: ph.PhaseSchedule) -> int:
    """Two queries (controlled U and controlled U^dagger) per walk step."""
    return 2 * (len(schedule.angles) - 1)


@dataclass
class SimulationReport:
    final_state: StateVector
    query_count: int
    epsilon_bound: float
    epsilon_actual: Optional[float]
    failure_probability: float
    schedule: Optional[ph.PhaseSchedule] = None
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "query_count": self.query_count,
            "epsilon_bound": self.epsilon_bound,
            "epsilon_actual": self.epsilon_actual,
            "failure_probability": self.failure_probability,
        }


def compute_phase_schedule(t_prime: float, epsilon: float, **kw) -> ph.PhaseSchedule:
    return ph.compute_phase_schedule(t_prime, epsilon, **kw)


def query_bound(t_prime: float, epsilon: float) -> int:
    return ph.query_bound(t_prime, epsilon)


def run_simulation(
    cfg: LandauConfig,
    input_state: Optional[StateVector] = None,
    schedule: Optional[ph.PhaseSchedule] = None,
    compare: bool = True,
) -> SimulationReport:
    """Run C on a good-subspace input and account queries, bound and actual error."""
    start = time.perf_counter()
    enc = compute_encoding(cfg)
    layout = layout_for(enc)
    if input_state is None:
        input_state = StateVector.from_data(layout, initial_state(cfg).vector())
    if input_state.layout != layout:
        raise ValueError("input state layout does not match configuration")
    amps = input_state.amplitudes
    if np.linalg.norm(amps[~input_state.good_mask()]) > 1e-12:
        raise GoodSubspaceError("input has weight outside the good subspace")
    n = layout.n_velocity
    s = layout.s_index(np.arange(layout.dim))
    if np.linalg.norm(amps[input_state.good_mask() & (s > n)]) > 1e-12:
        raise GoodSubspaceError("input has weight on unused s indices")
    t_prime = cfg.t / enc.beta
    schedule = schedule or ph.compute_phase_schedule(t_prime, cfg.epsilon)
    if abs(schedule.t_prime - t_prime) > 1e-9 * max(1.0, t_prime):
        raise ValueError("schedule was computed for a different t'")
    ops = simulation_circuit(block_encoding(enc, layout), schedule, layout)
    out = apply_sequence(input_state, ops)
    good = out.good_mask()
    p_good = float(np.sum(np.abs(out.amplitudes[good]) ** 2))
    failure = max(0.0, 1.0 - p_good / input_state.norm() ** 2)
    eps_actual = None
    if compare:
        h = build_hamiltonian(cfg)
        exact = exact_evolve(h, input_state.data(), cfg.t)
        projected = np.where(good, out.amplitudes, 0)
        target = StateVector.from_data(layout, exact).amplitudes
        eps_actual = float(np.linalg.norm(projected - target))
    return SimulationReport(out, circuit_queries(schedule), schedule.bound, eps_actual, failure,
                            schedule, time.perf_counter() - start)
