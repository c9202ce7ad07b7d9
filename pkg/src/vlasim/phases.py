"""Phase schedules for qubitized simulation of exp(-i H t').

The walk operator W built from a block encoding has eigenphases +-arccos(lam)
for each eigenvalue lam of the encoded matrix. A Laurent polynomial in W with
symmetric coefficients therefore acts as a function of lam, and the truncated
Jacobi-Anger series

    exp(-i t' cos(theta)) ~ sum_{|k| <= m} (-i)^k J_k(t') e^{i k theta}

gives the time evolution. The signal-processing qubit b carries a sequence of
single-qubit unitaries interleaved with b-controlled W (and W^dagger) so that
<0|_b (...) |0>_b = W^{-m} P(W) with P(z) = s * z^m * sum_k c_k z^k.

Angles are found by completing P with a Q satisfying |P|^2 + |Q|^2 = 1 on the
unit circle (outer-function construction via FFT) and stripping one layer per
degree.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import gammaln, jv

from .statevector import HADAMARD, phase_shift_matrix

DEFAULT_ORDER_CAP = 20000


class ScheduleError(ValueError):
    pass


def log_error_bound(n: int, t_prime: float) -> float:
    """ln b(n) with b(n) = 32 (t'/2)^n / n!."""
    if t_prime == 0:
        return -math.inf
    return math.log(32) + n * math.log(t_prime / 2) - float(gammaln(n + 1))


def error_bound(n: int, t_prime: float) -> float:
    return math.exp(log_error_bound(n, t_prime))


def truncation_order(t_prime: float, epsilon: float, cap: int = DEFAULT_ORDER_CAP) -> int:
    """Smallest n >= 1 with b(n) <= epsilon."""
    if t_prime < 0:
        raise ValueError("t_prime must be nonnegative")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    target = math.log(epsilon)
    n = 1
    while log_error_bound(n, t_prime) > target:
        n += 1
        if n > cap:
            raise ScheduleError(f"truncation order exceeds cap {cap} (t'={t_prime}, eps={epsilon})")
    return n


def query_bound(t_prime: float, epsilon: float) -> int:
    """Closed-form ceiling 2 e t' + 4 ln(1/eps) + 6."""
    if t_prime < 0 or not 0 < epsilon <= 1:
        raise ValueError("need t_prime >= 0 and 0 < epsilon <= 1")
    return math.ceil(2 * math.e * t_prime + 4 * math.log(1 / epsilon) + 6 - 1e-12)


def jacobi_anger(t_prime: float, m: int) -> np.ndarray:
    """Coefficients c_k = (-i)^k J_k(t') for k = -m..m."""
    k = np.arange(-m, m + 1)
    return (-1j) ** k * jv(k, t_prime)


def _fft_size(degree: int, minimum: int = 1024) -> int:
    n = minimum
    while n < 32 * (degree + 1):
        n *= 2
    return n


def target_polynomial(t_prime: float, m: int, margin: float) -> tuple[np.ndarray, float]:
    """Coefficients of P(z) = s z^m F(z) (ascending powers) and the scale s.

    s keeps max |P| <= 1 - margin on the unit circle.
    """
    coeffs = jacobi_anger(t_prime, m)
    nfft = _fft_size(2 * m)
    vals = np.fft.ifft(coeffs, nfft) * nfft
    peak = float(np.max(np.abs(vals)))
    scale = (1 - margin) / max(peak, 1.0)
    return coeffs * scale, scale


def complementary_polynomial(p: np.ndarray, nfft: Optional[int] = None) -> np.ndarray:
    """Q with |P|^2 + |Q|^2 = 1 on |z| = 1, deg Q <= deg P, all roots outside the disk."""
    d = len(p) - 1
    nfft = nfft or _fft_size(d)
    pv = np.fft.ifft(p, nfft) * nfft
    g = 1 - np.abs(pv) ** 2
    if np.max(g) <= 1e-15:
        return np.zeros_like(p)
    if np.min(g) <= 0:
        raise ScheduleError("|P| reaches 1 on the unit circle; no complement")
    logg = np.fft.fft(np.log(g)) / nfft
    analytic = np.zeros(nfft, dtype=complex)
    analytic[0] = logg[0] / 2
    analytic[1 : nfft // 2] = logg[1 : nfft // 2]
    qv = np.exp(np.fft.ifft(analytic) * nfft)
    q = np.fft.fft(qv) / nfft
    return q[: d + 1]


def layer_strip(p: np.ndarray, q: np.ndarray) -> list:
    """Unitaries R_0..R_d with R_d S R_{d-1} ... S R_0 |0> = (P(z), Q(z)), S = diag(z, 1)."""
    p = np.array(p, dtype=complex)
    q = np.array(q, dtype=complex)
    d = len(p) - 1
    rots = [None] * (d + 1)
    for k in range(d, 0, -1):
        low = np.array([p[0], q[0]])
        high = np.array([p[k], q[k]])
        if np.linalg.norm(high) >= np.linalg.norm(low):
            r2 = np.array([high[1], -high[0]]) / np.linalg.norm(high)
            r1 = np.array([-np.conj(r2[1]), np.conj(r2[0])])
        else:
            r1 = np.array([low[1], -low[0]]) / np.linalg.norm(low)
            r2 = np.array([-np.conj(r1[1]), np.conj(r1[0])])
        rdag = np.array([r1, r2])
        top = rdag[0, 0] * p + rdag[0, 1] * q
        bot = rdag[1, 0] * p + rdag[1, 1] * q
        p, q = top[1:], bot[:-1]
        rots[k] = rdag.conj().T
    a, b = complex(p[0]), complex(q[0])
    nrm = math.hypot(abs(a), abs(b))
    a, b = a / nrm, b / nrm
    rots[0] = np.array([[a, -np.conj(b)], [b, np.conj(a)]])
    return rots


def euler_phases(u: np.ndarray) -> tuple[float, float, float, float]:
    """(gamma, alpha, beta, delta) with u = e^{i gamma} B(alpha) H B(beta) H B(delta).

    B(x) = diag(1, e^{ix}) is the phase-shift gate.
    """
    c, s = abs(u[0, 0]), abs(u[1, 0])
    beta = 2 * math.atan2(s, c)
    if s < 1e-14:
        g = np.angle(u[0, 0])
        alpha = 0.0
        delta = float(np.angle(u[1, 1]) - g)
    elif c < 1e-14:
        alpha = 0.0
        g = float(np.angle(u[1, 0]) + math.pi / 2)
        delta = float(np.angle(u[0, 1]) - g + math.pi / 2)
    else:
        g = float(np.angle(u[0, 0]))
        alpha = float(np.angle(u[1, 0]) - g + math.pi / 2)
        delta = float(np.angle(u[0, 1]) - g + math.pi / 2)
    return float(g - beta / 2), alpha, beta, delta


def euler_matrix(gamma: float, alpha: float, beta: float, delta: float) -> np.ndarray:
    return (
        np.exp(1j * gamma)
        * phase_shift_matrix(alpha)
        @ HADAMARD
        @ phase_shift_matrix(beta)
        @ HADAMARD
        @ phase_shift_matrix(delta)
    )


@dataclass
class PhaseSchedule:
    """Signal-processing program for one (t', epsilon) pair.

    ``phi`` is the flat phase vector [global_phase, a_0, b_0, d_0, a_1, ...];
    rotation k on the b qubit is B(a_k) H B(b_k) H B(d_k). The first and last
    rotations already absorb the outer Hadamard on b.
    """

    n: int
    t_prime: float
    epsilon: float
    phi: np.ndarray
    scale: float = 1.0
    margin: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.n - 1

    @property
    def length(self) -> int:
        return 2 * (self.n - 1)

    @property
    def query_count(self) -> int:
        return 4 * (self.n - 1)

    @property
    def bound(self) -> float:
        return error_bound(self.n, self.t_prime)

    @property
    def global_phase(self) -> float:
        return float(self.phi[0])

    @property
    def angles(self) -> np.ndarray:
        return np.asarray(self.phi[1:]).reshape(-1, 3)

    def rotations(self) -> list:
        return [euler_matrix(0.0, *tri) for tri in self.angles]

    def to_json(self, path) -> None:
        payload = {
            "n": self.n,
            "t_prime": self.t_prime,
            "epsilon": self.epsilon,
            "phi": [float(x) for x in self.phi],
        }
        Path(path).write_text(json.dumps(payload, indent=1))

    @classmethod
    def from_json(cls, path) -> "PhaseSchedule":
        data = json.loads(Path(path).read_text())
        phi = np.asarray(data["phi"], dtype=float)
        n = int(data["n"])
        if len(phi) != 1 + 3 * (2 * (n - 1) + 1):
            raise ScheduleError("phase vector length does not match n")
        return cls(n, float(data["t_prime"]), float(data["epsilon"]), phi)


def realized_polynomial(rotations: list, z: np.ndarray) -> np.ndarray:
    """<0| R_d S(z) ... S(z) R_0 |0> evaluated pointwise (S = diag(z, 1))."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    vec = np.zeros((len(z), 2), dtype=complex)
    vec[:, 0] = rotations[0][0, 0]
    vec[:, 1] = rotations[0][1, 0]
    for r in rotations[1:]:
        vec[:, 0] *= z
        vec = vec @ r.T
    return vec[:, 0]


def compute_phase_schedule(
    t_prime: float,
    epsilon: float,
    cap: int = DEFAULT_ORDER_CAP,
    n: Optional[int] = None,
) -> PhaseSchedule:
    """Order n from b(n) <= epsilon, then angles for the degree-(n-1) Jacobi-Anger series."""
    if n is None:
        n = truncation_order(t_prime, epsilon, cap)
    m = n - 1
    bound = error_bound(n, t_prime)
    margin = min(bound / 8, 1e-3) if bound > 0 else 0.0
    p, scale = target_polynomial(t_prime, m, margin)
    q = complementary_polynomial(p)
    rots = layer_strip(p, q)
    # absorb the Hadamard that opens and closes the b register
    rots[0] = rots[0] @ HADAMARD
    rots[-1] = HADAMARD @ rots[-1]
    phi = [0.0]
    for r in rots:
        g, a, b, d = euler_phases(r)
        phi[0] += g
        phi.extend([a, b, d])
    phi[0] = math.remainder(phi[0], 2 * math.pi)
    return PhaseSchedule(n, float(t_prime), float(epsilon), np.array(phi), scale, margin)
