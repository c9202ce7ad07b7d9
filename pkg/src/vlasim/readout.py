"""Input/output boundary: state preparation, amplitude estimation model,
three-phase complex readout, damped-sinusoid fitting and the E_rms observable."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from .oracle import TimeSeries
from .plasma import InitialState
from .statevector import (
    RegisterLayout,
    StateVector,
    apply_sequence,
    controlled,
    hadamard,
    pauli_x,
    phase_shift,
    rotation,
    variable_rotation,
)


@dataclass
class PrepReport:
    prepared_state: StateVector
    success_probability: float
    expected_repetitions: float
    velocity_branch_probability: float
    predicted_probability: float
    ops: list = field(default_factory=list, repr=False)


def preparation_circuit(x0: InitialState, layout: RegisterLayout) -> list:
    """Split weight between the field (r=1) and velocity (r=0) branches, spread v,
    then rotate the flag qubit a0 by h_j = F'_j / max|F'|."""
    f = np.asarray(x0.f_prime, dtype=complex)
    n = layout.n_velocity
    if f.shape != (n,):
        raise ValueError("initial state does not match layout")
    fmax = float(np.max(np.abs(f)))
    if fmax == 0 and x0.e_field == 0:
        raise ValueError("cannot prepare an all-zero state")
    r, flag, v = layout.qubit("r"), layout.qubit("a", 0), layout.qubits("v")
    kappa = 1 / math.sqrt(n * fmax**2 + abs(x0.e_field) ** 2)
    ops = [rotation(r, kappa * fmax * math.sqrt(n))]
    if x0.e_field != 0:
        ops.append(phase_shift(r, float(np.angle(x0.e_field))))
    if fmax > 0:
        h = f / fmax
        h = np.where(np.abs(h.real) < 1e-15 * np.abs(h), 1j * h.imag, h)
        h = np.where(np.abs(h.imag) < 1e-15 * np.abs(h), h.real + 0j, h)
        ops += [hadamard(q).controlled({r: 0}) for q in v]
        ops.append(variable_rotation(flag, v, h).controlled({r: 0}))
    return ops


def prepare_state(x0: InitialState, layout: RegisterLayout) -> PrepReport:
    ops = preparation_circuit(x0, layout)
    out = apply_sequence(StateVector.zero(layout), ops)
    decoded = layout.decode(np.arange(layout.dim))
    ok = decoded["a"] == 0
    p = float(np.sum(np.abs(out.amplitudes[ok]) ** 2))
    post = np.where(ok, out.amplitudes, 0) / math.sqrt(p)
    f = np.asarray(x0.f_prime)
    fmax = float(np.max(np.abs(f)))
    n = layout.n_velocity
    mean_h2 = float(np.mean(np.abs(f / fmax) ** 2)) if fmax > 0 else 1.0
    e2 = abs(x0.e_field) ** 2
    predicted = (n * mean_h2 * fmax**2 + e2) / (n * fmax**2 + e2)
    return PrepReport(StateVector(post, layout), p, 1 / p, mean_h2, predicted, ops)


@dataclass(frozen=True)
class AmplitudeEstimate:
    p_true: float
    M: int
    delta_bound: float
    estimate: Optional[float] = None

    @property
    def cost_multiplier(self) -> int:
        return 2 * self.M


def ae_error_bound(p: float, M: int) -> float:
    """2 pi sqrt(p(1-p))/M + pi^2/M^2."""
    if not 0 <= p <= 1 or M < 1:
        raise ValueError("need p in [0, 1] and M >= 1")
    return 2 * math.pi * math.sqrt(p * (1 - p)) / M + math.pi**2 / M**2


def iterations_for_precision(p: float, delta: float) -> int:
    """Smallest M whose amplitude-estimation bound is <= delta."""
    a = 2 * math.pi * math.sqrt(p * (1 - p))
    m = math.ceil((a + math.sqrt(a * a + 4 * delta * math.pi**2)) / (2 * delta))
    while m > 1 and ae_error_bound(p, m - 1) <= delta:
        m -= 1
    while ae_error_bound(p, m) > delta:
        m += 1
    return m


def shots_for_precision(p: float, delta: float, z: float = 2.0) -> int:
    """Direct-sampling shots for a z-sigma half-width of delta."""
    return math.ceil(z * z * p * (1 - p) / delta**2)


def sampling_comparator(p: float, shots: int, seed=None) -> float:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    return float(rng.binomial(shots, p)) / shots


def amplitude_estimate(p: float, M: int, seed=None, shots: Optional[int] = None) -> AmplitudeEstimate:
    est = sampling_comparator(p, shots, seed) if shots else None
    return AmplitudeEstimate(p, M, ae_error_bound(p, M), est)


ZETAS = (0.0, 2 * math.pi / 3, -2 * math.pi / 3)


def phase_retrieval(ops: Sequence, layout: RegisterLayout, target: int, zeta: float) -> float:
    """|<0|_c <target| ext |0>| for the extension H_c B_c(zeta) X^t_c A_c H_c.

    ``ops`` is the unitary algorithm A acting from |0...0>; the returned value
    is |nu + e^{i zeta}| / 2 with nu = <target|A|0>.
    """
    if not 0 <= target < layout.dim:
        raise IndexError("target outside the state space")
    ext = layout.with_extra("c")
    c = ext.qubit("c")
    flips = [pauli_x(q).controlled({c: 1}) for q in range(layout.n_qubits) if target >> q & 1]
    circuit = [hadamard(c)] + controlled(ops, {c: 0}) + flips + [phase_shift(c, zeta), hadamard(c)]
    out = apply_sequence(StateVector.zero(ext), circuit)
    return float(abs(out.amplitudes[target]))


def retrieval_magnitudes(ops: Sequence, layout: RegisterLayout, target: int) -> Tuple[float, float, float]:
    return tuple(phase_retrieval(ops, layout, target, z) for z in ZETAS)


def reconstruct_nu(d0: float, d_plus: float, d_minus: float) -> complex:
    """Invert d_zeta = |nu + e^{i zeta}|/2 for zeta in {0, +2pi/3, -2pi/3}."""
    re = 2 / 3 * (2 * d0**2 - d_plus**2 - d_minus**2)
    im = 2 / math.sqrt(3) * (d_plus**2 - d_minus**2)
    return complex(re, im)


def reconstruct_from_squares(s0: float, s_plus: float, s_minus: float) -> complex:
    """Same as :func:`reconstruct_nu` but from measured squared magnitudes."""
    return complex(2 / 3 * (2 * s0 - s_plus - s_minus), 2 / math.sqrt(3) * (s_plus - s_minus))


@dataclass
class ComplexReadout:
    d0: float
    d_plus: float
    d_minus: float
    nu: complex


@dataclass
class FitResult:
    amplitude: float
    gamma: float
    omega: float
    rho: float
    residual: float
    window: Tuple[float, float] = (0.0, 0.0)
    component: str = "imag"

    def model(self, t):
        return self.amplitude * np.exp(-self.gamma * t) * np.cos(self.omega * t - self.rho)

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


class FitError(RuntimeError):
    pass


def find_extrema(t: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Local extrema refined by a parabola through the neighbouring samples."""
    dy = np.diff(y)
    idx = np.nonzero(np.sign(dy[:-1]) * np.sign(dy[1:]) < 0)[0] + 1
    te, ye = [], []
    for i in idx:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        h = t[i + 1] - t[i]
        den = y0 - 2 * y1 + y2
        off = 0.5 * (y0 - y2) / den if den != 0 else 0.0
        te.append(t[i] + off * h)
        ye.append(y1 - 0.25 * (y0 - y2) * off)
    return np.array(te), np.array(ye)


def _pick_component(e: np.ndarray, component: str) -> Tuple[np.ndarray, str]:
    if component == "auto":
        component = "imag" if np.sum(e.imag**2) >= np.sum(e.real**2) else "real"
    return (e.imag if component == "imag" else e.real), component


def fit_damped_sinusoid(
    series: TimeSeries,
    window: Tuple[float, float] = (2 * math.pi, 8 * math.pi),
    component: str = "auto",
    min_extrema: int = 4,
    max_nfev: int = 200,
) -> FitResult:
    """Fit A exp(-gamma t) cos(omega t - rho) to one component of E(t) in ``window``."""
    t_all = np.asarray(series.times, dtype=float)
    sel = (t_all >= window[0] - 1e-12) & (t_all <= window[1] + 1e-12)
    t = t_all[sel]
    y, component = _pick_component(np.asarray(series.e_field)[sel], component)
    te, ye = find_extrema(t, y)
    if len(te) < min_extrema:
        raise FitError(f"only {len(te)} extrema in window {window}; need {min_extrema}")
    omega0 = math.pi / float(np.mean(np.diff(te)))
    slope, intercept = np.polyfit(te, np.log(np.abs(ye)), 1)
    gamma0, amp0 = -slope, math.exp(intercept)
    rho0 = omega0 * te[0] - (0.0 if ye[0] > 0 else math.pi)

    def resid(p):
        a, g, w, r = p
        return a * np.exp(-g * t) * np.cos(w * t - r) - y

    sol = least_squares(resid, [amp0, gamma0, omega0, rho0], method="lm", max_nfev=max_nfev,
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if sol.status <= 0:
        raise FitError(f"least squares did not converge: {sol.message}")
    a, g, w, r = sol.x
    if a < 0:
        a, r = -a, r + math.pi
    r = math.remainder(r, 2 * math.pi)
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    return FitResult(float(a), float(g), float(w), float(r), rms, tuple(window), component)


def e_rms(series: TimeSeries) -> float:
    e = np.asarray(series.e_field)
    if e.size == 0:
        raise ValueError("empty series")
    return float(np.sqrt(np.mean(np.abs(e) ** 2)))
