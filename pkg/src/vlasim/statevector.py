"""Dense statevector simulator over the b, q, r, a, v register layout.

Qubits are addressed by bit position in the basis-state index (bit 0 is least
significant). Registers are stacked b, q, r, a, v from most to least
significant, and each register is little-endian: its offset 0 qubit is its
lowest bit. Extra registers (e.g. a phase-retrieval qubit) sit above b.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

_SQ2 = 1 / math.sqrt(2)
HADAMARD = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class RegisterLayout:
    n_v: int
    extra: tuple = ()  # ((name, size), ...) placed above b, innermost last

    @property
    def sizes(self) -> dict:
        base = {"v": self.n_v, "a": 4, "r": 1, "q": 1, "b": 1}
        for name, size in reversed(self.extra):
            base[name] = size
        return base

    @property
    def offsets(self) -> dict:
        out, pos = {}, 0
        for name, size in self.sizes.items():
            out[name] = pos
            pos += size
        return out

    @property
    def n_qubits(self) -> int:
        return sum(self.sizes.values())

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def n_velocity(self) -> int:
        return 1 << self.n_v

    def qubit(self, register: str, offset: int = 0) -> int:
        size = self.sizes[register]
        if not 0 <= offset < size:
            raise IndexError(f"offset {offset} outside register {register!r}")
        return self.offsets[register] + offset

    def qubits(self, register: str) -> list:
        return [self.offsets[register] + i for i in range(self.sizes[register])]

    def index(self, **values: int) -> int:
        """Basis index for the given register values (unspecified registers are 0)."""
        idx = 0
        for name, val in values.items():
            if not 0 <= val < (1 << self.sizes[name]):
                raise ValueError(f"value {val} does not fit register {name!r}")
            idx |= int(val) << self.offsets[name]
        return idx

    def decode(self, indices) -> dict:
        indices = np.asarray(indices)
        return {
            name: (indices >> self.offsets[name]) & ((1 << size) - 1)
            for name, size in self.sizes.items()
        }

    def with_extra(self, name: str, size: int = 1) -> "RegisterLayout":
        return replace(self, extra=((name, size),) + tuple(self.extra))

    def ancilla_names(self) -> list:
        return [n for n in self.sizes if n not in ("r", "v")]

    def s_index(self, indices):
        """Index into the combined r,v data register: r*N_v + v."""
        d = self.decode(indices)
        return d["r"] * self.n_velocity + d["v"]


@dataclass
class StateVector:
    amplitudes: np.ndarray
    layout: RegisterLayout

    @classmethod
    def zero(cls, layout: RegisterLayout) -> "StateVector":
        amps = np.zeros(layout.dim, dtype=complex)
        amps[0] = 1
        return cls(amps, layout)

    @classmethod
    def basis(cls, layout: RegisterLayout, index: int) -> "StateVector":
        amps = np.zeros(layout.dim, dtype=complex)
        amps[index] = 1
        return cls(amps, layout)

    @classmethod
    def from_data(cls, layout: RegisterLayout, data: Sequence[complex]) -> "StateVector":
        """Embed an (N_v+1)-vector (F'_0..F'_{N-1}, E) in the good subspace."""
        data = np.asarray(data, dtype=complex)
        n = layout.n_velocity
        if data.shape != (n + 1,):
            raise ValueError(f"expected {n + 1} data amplitudes, got {data.shape}")
        amps = np.zeros(layout.dim, dtype=complex)
        amps[[layout.index(v=j) for j in range(n)]] = data[:n]
        amps[layout.index(r=1)] = data[n]
        return cls(amps, layout)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.layout)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def good_mask(self) -> np.ndarray:
        d = self.layout.decode(np.arange(self.layout.dim))
        mask = np.ones(self.layout.dim, dtype=bool)
        for name in self.layout.ancilla_names():
            mask &= d[name] == 0
        return mask

    def data(self) -> np.ndarray:
        """Good-subspace amplitudes at s indices 0..N_v (F' entries then E)."""
        n = self.layout.n_velocity
        idx = [self.layout.index(v=j) for j in range(n)] + [self.layout.index(r=1)]
        return self.amplitudes[idx].copy()

    def to_csv(self, path, tol: float = 0.0) -> None:
        names = list(self.layout.sizes)[::-1]
        decoded = self.layout.decode(np.arange(self.layout.dim))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", *names, "real", "imag"])
            for i, amp in enumerate(self.amplitudes):
                if abs(amp) <= tol and tol > 0:
                    continue
                w.writerow([i, *(int(decoded[n][i]) for n in names), repr(float(amp.real)), repr(float(amp.imag))])


@dataclass(frozen=True)
class GateOp:
    """One gate: kind in {matrix, hadamard, x, phase_shift, rotation,
    variable_rotation, reflect_zero, global_phase}.

    ``controls`` maps bit position -> required value. Variable rotations carry
    a (N, 2, 2) table indexed by the value of ``index_qubits`` (LSB first).
    """

    kind: str
    targets: tuple = ()
    matrix: Optional[np.ndarray] = None
    table: Optional[np.ndarray] = None
    index_qubits: tuple = ()
    phase: float = 0.0
    controls: Mapping = field(default_factory=dict)

    def dagger(self) -> "GateOp":
        if self.kind in ("hadamard", "x", "reflect_zero"):
            return self
        if self.kind == "global_phase":
            return replace(self, phase=-self.phase)
        if self.kind == "variable_rotation":
            return replace(self, table=np.conj(np.swapaxes(self.table, 1, 2)))
        return replace(self, matrix=self.matrix.conj().T)

    def controlled(self, controls: Mapping) -> "GateOp":
        merged = dict(self.controls)
        for q, val in controls.items():
            if q in merged and merged[q] != val:
                raise ValueError(f"conflicting control on qubit {q}")
            merged[q] = val
        return replace(self, controls=merged)


def rotation_matrix(rho: complex) -> np.ndarray:
    """SU(2) rotation with first column (rho, sqrt(1-|rho|^2)).

    Real rho: exp(-i sigma_y arccos rho). Imaginary rho:
    exp(-i sigma_x arccos Im rho) exp(i sigma_z pi/2).
    """
    rho = complex(rho)
    if abs(rho) > 1 + 1e-12:
        raise ValueError(f"|rho| = {abs(rho)} exceeds 1")
    if rho.real != 0 and rho.imag != 0:
        raise ValueError(f"rho must be purely real or purely imaginary, got {rho}")
    if rho.imag == 0:
        a = math.acos(max(-1.0, min(1.0, rho.real)))
        return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]], dtype=complex)
    a = math.acos(max(-1.0, min(1.0, rho.imag)))
    rx = np.array([[math.cos(a), -1j * math.sin(a)], [-1j * math.sin(a), math.cos(a)]])
    return rx @ np.diag([1j, -1j])


def phase_shift_matrix(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


def _check_unitary(m: np.ndarray) -> None:
    if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > UNITARY_TOL:
        raise ValueError("gate matrix is not unitary")


def hadamard(q: int) -> GateOp:
    return GateOp("hadamard", (q,), HADAMARD)


def pauli_x(q: int) -> GateOp:
    return GateOp("x", (q,), PAULI_X)


def phase_shift(q: int, phi: float) -> GateOp:
    return GateOp("phase_shift", (q,), phase_shift_matrix(phi))


def rotation(q: int, rho: complex) -> GateOp:
    return GateOp("rotation", (q,), rotation_matrix(rho))


def unitary(q: int, m: np.ndarray) -> GateOp:
    m = np.asarray(m, dtype=complex)
    _check_unitary(m)
    return GateOp("matrix", (q,), m)


def variable_rotation(q: int, index_qubits: Sequence[int], rhos: Sequence[complex]) -> GateOp:
    table = np.array([rotation_matrix(r) for r in rhos])
    if len(table) != 1 << len(index_qubits):
        raise ValueError("rotation table length must be 2**len(index_qubits)")
    return GateOp("variable_rotation", (q,), table=table, index_qubits=tuple(index_qubits))


def reflect_zero(qubits: Sequence[int]) -> GateOp:
    """2|0><0| - 1 on the listed qubits."""
    return GateOp("reflect_zero", tuple(qubits))


def global_phase(phi: float) -> GateOp:
    return GateOp("global_phase", phase=float(phi))


def _apply_inplace(psi: np.ndarray, op: GateOp) -> None:
    n = psi.ndim
    used = set(op.targets) | set(op.index_qubits) | set(op.controls)
    if any(not 0 <= q < n for q in used):
        raise IndexError(f"gate touches qubit outside 0..{n - 1}")
    idx = [slice(None)] * n
    for q, val in op.controls.items():
        idx[n - 1 - q] = int(val)
    sub = psi[tuple(idx)]
    free = sorted(n - 1 - q for q in range(n) if q not in op.controls)

    def ax(q):
        return free.index(n - 1 - q)

    kind = op.kind
    if kind == "global_phase":
        sub *= np.exp(1j * op.phase)
    elif kind == "reflect_zero":
        zidx = [slice(None)] * sub.ndim
        for q in op.targets:
            zidx[ax(q)] = 0
        sub *= -1
        sub[tuple(zidx)] *= -1
    elif kind == "variable_rotation":
        src = [ax(op.targets[0])] + [ax(q) for q in reversed(op.index_qubits)]
        k = len(src)
        dst = list(range(sub.ndim - k, sub.ndim))
        view = np.moveaxis(sub, src, dst)
        shape = view.shape
        arr = view.reshape(-1, 2, 1 << (k - 1))
        new = np.einsum("vij,rjv->riv", op.table, arr)
        view[...] = new.reshape(shape)
    else:
        m = op.matrix
        a = ax(op.targets[0])
        i0 = [slice(None)] * sub.ndim
        i1 = list(i0)
        i0[a], i1[a] = 0, 1
        x0 = sub[tuple(i0)].copy()
        x1 = sub[tuple(i1)]
        if kind == "x":
            sub[tuple(i0)] = x1
            sub[tuple(i1)] = x0
        else:
            y0 = m[0, 0] * x0 + m[0, 1] * x1
            sub[tuple(i1)] = m[1, 0] * x0 + m[1, 1] * x1
            sub[tuple(i0)] = y0


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    return apply_sequence(state, [gate])


def apply_sequence(state: StateVector, gates: Iterable[GateOp], inplace: bool = False) -> StateVector:
    out = state if inplace else state.copy()
    n = out.layout.n_qubits
    psi = out.amplitudes.reshape((2,) * n)
    for g in gates:
        _apply_inplace(psi, g)
    return out


def dagger(gates: Sequence[GateOp]) -> list:
    return [g.dagger() for g in reversed(gates)]


def controlled(gates: Iterable[GateOp], controls: Mapping) -> list:
    return [g.controlled(controls) for g in gates]


def sequence_matrix(gates: Sequence[GateOp], n_qubits: int) -> np.ndarray:
    """Dense unitary of a gate list (column i is the image of basis state i)."""
    gates = list(gates)
    dim = 1 << n_qubits
    out = np.eye(dim, dtype=complex)
    for i in range(dim):
        psi = out[:, i].copy().reshape((2,) * n_qubits)
        for g in gates:
            _apply_inplace(psi, g)
        out[:, i] = psi.reshape(-1)
    return out


Predicate = Union[Mapping[str, int], Callable[[dict], np.ndarray]]


def subspace_probability(state: StateVector, predicate: Predicate) -> float:
    """Total probability of basis states selected by a register filter.

    ``predicate`` is either a mapping {register: value} or a callable that takes
    the decoded register arrays and returns a boolean mask.
    """
    decoded = state.layout.decode(np.arange(state.layout.dim))
    if callable(predicate):
        mask = np.asarray(predicate(decoded), dtype=bool)
    else:
        mask = np.ones(state.layout.dim, dtype=bool)
        for name, val in predicate.items():
            mask &= decoded[name] == val
    p = float(np.sum(np.abs(state.amplitudes[mask]) ** 2))
    return min(max(p, 0.0), 1.0)
