"""Exact reference evolution exp(-iHt) by dense symmetric eigendecomposition."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .plasma import ArrowheadHamiltonian, InitialState


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruction_error(self, h: np.ndarray) -> float:
        v, lam = self.eigenvectors, self.eigenvalues
        return float(np.max(np.abs((v * lam) @ v.T - h)))


@dataclass
class TimeSeries:
    times: np.ndarray
    e_field: np.ndarray
    f_prime: Optional[np.ndarray] = None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re_E", "im_E", "abs_E"])
            for t, e in zip(self.times, self.e_field):
                w.writerow([repr(float(x)) for x in (t, e.real, e.imag, abs(e))])

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        times, field = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                times.append(float(row["t"]))
                field.append(complex(float(row["re_E"]), float(row["im_E"])))
        return cls(np.array(times), np.array(field))


class EigenSolverError(RuntimeError):
    pass


def eigendecompose(h: Union[ArrowheadHamiltonian, np.ndarray]) -> EigenDecomposition:
    mat = h.matrix() if isinstance(h, ArrowheadHamiltonian) else np.asarray(h)
    if not np.allclose(mat, mat.conj().T, atol=1e-14):
        raise ValueError("Hamiltonian is not Hermitian")
    try:
        lam, vec = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    return EigenDecomposition(lam, vec)


def _as_vector(x0) -> np.ndarray:
    if isinstance(x0, InitialState):
        return x0.vector()
    return np.asarray(x0, dtype=complex)


def exact_evolve(h, x0, t: float, eig: Optional[EigenDecomposition] = None) -> np.ndarray:
    """x(t) = V exp(-i Lambda t) V^dagger x0."""
    eig = eig or eigendecompose(h)
    v = eig.eigenvectors
    x = _as_vector(x0)
    return v @ (np.exp(-1j * eig.eigenvalues * t) * (v.conj().T @ x))


def evolve_series(h, x0, times: Sequence[float], keep_f: bool = False) -> TimeSeries:
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted and nonnegative")
    eig = eigendecompose(h)
    v = eig.eigenvectors
    coeff = v.conj().T @ _as_vector(x0)
    phases = np.exp(-1j * np.outer(times, eig.eigenvalues))
    states = (phases * coeff) @ v.T
    return TimeSeries(times, states[:, -1].copy(), states[:, :-1].copy() if keep_f else None)


def sample_times(t_end: float, dt: float = 0.05, t_start: float = 0.0) -> np.ndarray:
    n = int(np.floor((t_end - t_start) / dt + 1e-9))
    return t_start + dt * np.arange(n + 1)
