"""Discretized 1D electrostatic Vlasov-Poisson problem.

All quantities are dimensionless: velocities in units of the electron thermal
speed (lambda_De * omega_pe), times in 1/omega_pe, wavenumbers in 1/lambda_De.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import wofz


@dataclass(frozen=True)
class VelocityGrid:
    n_points: int
    v_max: float
    dv: float
    velocities: np.ndarray

    @property
    def n_qubits(self) -> int:
        return int(self.n_points).bit_length() - 1


@dataclass(frozen=True)
class BackgroundDistribution:
    weights: np.ndarray
    kind: str = "maxwellian"


@dataclass(frozen=True)
class LandauConfig:
    k: float
    grid: VelocityGrid
    background: BackgroundDistribution
    t: float = 8 * math.pi
    epsilon: float = 1e-3

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k must be strictly positive, got {self.k}")
        if self.t < 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if len(self.background.weights) != self.grid.n_points:
            raise ValueError("background length does not match grid")


@dataclass(frozen=True)
class ArrowheadHamiltonian:
    diag: np.ndarray
    border: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.diag) + 1

    def matrix(self) -> np.ndarray:
        n = len(self.diag)
        h = np.zeros((n + 1, n + 1))
        h[np.arange(n), np.arange(n)] = self.diag
        h[:n, n] = self.border
        h[n, :n] = self.border
        return h


@dataclass(frozen=True)
class EncodingParams:
    g_max: float
    gamma_cap: float
    c_sq: float
    beta: float
    lambda_bound: float
    lambda_prime: float
    d: np.ndarray
    b: np.ndarray
    n_points: int = field(default=0)

    @property
    def c(self) -> float:
        return math.sqrt(self.c_sq)


@dataclass(frozen=True)
class InitialState:
    f_prime: np.ndarray
    e_field: complex
    eta: float

    def vector(self) -> np.ndarray:
        """Normalized data vector (F'_0, ..., F'_{N-1}, E)."""
        return self.eta * np.append(self.f_prime, self.e_field).astype(complex)


@dataclass(frozen=True)
class DispersionRoot:
    omega: float
    gamma: float
    residual: float
    iterations: int = 0


class DispersionError(RuntimeError):
    def __init__(self, message: str, last_iterate: complex):
        super().__init__(message)
        self.last_iterate = last_iterate


def build_grid(n_points: int, v_max: float) -> VelocityGrid:
    """Uniform grid with endpoints at +-v_max; no v = 0 point for even sizes."""
    n_points = int(n_points)
    if n_points < 2 or n_points & (n_points - 1):
        raise ValueError(f"n_points must be a power of two >= 2, got {n_points}")
    if not v_max > 0:
        raise ValueError(f"v_max must be positive, got {v_max}")
    dv = 2.0 * v_max / (n_points - 1)
    velocities = -v_max + dv * np.arange(n_points)
    # exact parity symmetry
    velocities = 0.5 * (velocities - velocities[::-1])
    return VelocityGrid(n_points, float(v_max), dv, velocities)


def maxwellian_background(grid: VelocityGrid) -> BackgroundDistribution:
    w = np.exp(-0.5 * grid.velocities**2) / math.sqrt(2 * math.pi)
    return BackgroundDistribution(w, "maxwellian")


def custom_background(grid: VelocityGrid, weights: Sequence[float]) -> BackgroundDistribution:
    w = np.asarray(weights, dtype=float)
    if w.shape != (grid.n_points,):
        raise ValueError("weights must have one entry per grid point")
    if np.any(w < 0):
        raise ValueError("background weights must be nonnegative (unitarity)")
    return BackgroundDistribution(w, "custom")


def default_config(**overrides) -> LandauConfig:
    """The k=0.4, v_max=4.5, N_v=32, t=8*pi Landau damping test case."""
    n_points = overrides.pop("n_points", 32)
    v_max = overrides.pop("v_max", 4.5)
    grid = build_grid(n_points, v_max)
    params = dict(k=0.4, t=8 * math.pi, epsilon=1e-3)
    params.update(overrides)
    return LandauConfig(grid=grid, background=maxwellian_background(grid), **params)


def _check_background(cfg: LandauConfig) -> np.ndarray:
    g = np.asarray(cfg.background.weights, dtype=float)
    if np.any(g < 0):
        raise ValueError("background weights must be nonnegative (unitarity)")
    return g


def build_hamiltonian(cfg: LandauConfig, k: Optional[float] = None) -> ArrowheadHamiltonian:
    """Arrowhead matrix: k*v_j on the diagonal, alpha_j*v_j on the border.

    ``k`` overrides ``cfg.k`` (used to inspect the k = 0 coupling-only matrix).
    """
    g = _check_background(cfg)
    k = cfg.k if k is None else k
    v = cfg.grid.velocities
    alpha = np.sqrt(cfg.grid.dv * g)
    return ArrowheadHamiltonian(k * v, alpha * v)


def compute_encoding(cfg: LandauConfig) -> EncodingParams:
    g = _check_background(cfg)
    grid = cfg.grid
    if cfg.k <= 0:
        raise ValueError("compute_encoding requires k > 0")
    v = grid.velocities
    g_max = float(np.max(np.abs(v * g)))
    if g_max == 0:
        raise ValueError("degenerate background: max |v_j G_j| = 0")
    n = grid.n_points
    k = cfg.k
    gamma_cap = k**2 * grid.v_max / (grid.dv * n * g_max)
    # (G/2)(sqrt(1+4/G) - 1) rewritten without cancellation for large G
    c_sq = 2 / (1 + math.sqrt(1 + 4 / gamma_cap))
    beta = c_sq / (k * grid.v_max)
    lam = k * grid.v_max + math.sqrt(grid.dv * n * grid.v_max * g_max)
    lam_prime = k * grid.v_max + math.sqrt(float(np.sum(v**2 * g * grid.dv)))
    d = np.sqrt((v / grid.v_max).astype(complex))
    b = np.sqrt((v * g / g_max).astype(complex))
    # principal root of a negative real gives +i*sqrt(|x|); strip roundoff parts
    d = np.where(v < 0, 1j * d.imag, d.real + 0j)
    b = np.where(v < 0, 1j * b.imag, b.real + 0j)
    return EncodingParams(g_max, gamma_cap, c_sq, beta, lam, lam_prime, d, b, n)


def initial_state(cfg: LandauConfig, f_tilde: Optional[Sequence[complex]] = None) -> InitialState:
    """Rescaled initial data; by default F_j(0) = G_j with E from Poisson's equation."""
    g = _check_background(cfg)
    dv = cfg.grid.dv
    f = g.astype(complex) if f_tilde is None else np.asarray(f_tilde, dtype=complex)
    if f.shape != g.shape:
        raise ValueError("f_tilde must have one entry per grid point")
    bad = (g == 0) & (f != 0)
    if np.any(bad):
        raise ValueError("cannot rescale: G_j = 0 where F_j != 0")
    safe_g = np.where(g == 0, 1.0, g)
    f_prime = np.where(g == 0, 0, 1j * np.sqrt(dv / safe_g) * f)
    e_field = complex(1j / cfg.k * np.sum(f) * dv)
    norm_sq = abs(e_field) ** 2 + float(np.sum(np.abs(f_prime) ** 2))
    if norm_sq == 0:
        raise ValueError("initial data is identically zero; eta undefined")
    return InitialState(f_prime, e_field, 1.0 / math.sqrt(norm_sq))


def theory_estimates(k: float) -> tuple[float, float]:
    """Bohm-Gross frequency and weak-damping Landau rate."""
    omega = 1 + 1.5 * k**2
    gamma = math.sqrt(math.pi / 8) * omega / k**3 * math.exp(-(omega**2) / (2 * k**2))
    return omega, gamma


def plasma_z(zeta):
    return 1j * math.sqrt(math.pi) * wofz(zeta)


def dispersion_function(omega_complex: complex, k: float) -> complex:
    """1 + (1 + zeta Z(zeta))/k^2 with zeta = omega/(sqrt(2) k), Landau continued."""
    zeta = omega_complex / (math.sqrt(2) * k)
    return 1 + (1 + zeta * plasma_z(zeta)) / k**2


def dispersion_solve(k: float, max_iter: int = 100, tol: float = 1e-12) -> DispersionRoot:
    """Newton iteration on the Maxwellian dispersion relation seeded at Bohm-Gross."""
    if not k > 0:
        raise ValueError("k must be positive")
    omega0, gamma0 = theory_estimates(k)
    s2k = math.sqrt(2) * k
    zeta = complex(omega0, -gamma0) / s2k
    for it in range(1, max_iter + 1):
        z = plasma_z(zeta)
        f = 1 + (1 + zeta * z) / k**2
        zp = -2 * (1 + zeta * z)
        df = (z + zeta * zp) / k**2
        step = f / df
        zeta = zeta - step
        if abs(step) < tol * max(1.0, abs(zeta)):
            res = abs(dispersion_function(zeta * s2k, k))
            if res <= 1e-10:
                w = zeta * s2k
                return DispersionRoot(w.real, -w.imag, res, it)
    raise DispersionError(f"dispersion root not converged for k={k}", zeta * s2k)
