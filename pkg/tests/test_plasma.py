import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlasim import plasma


def _mp_root(k):
    """Independent root of the Landau-continued dispersion function with mpmath."""
    s2k = mpmath.sqrt(2) * k

    def d(w):
        z = w / s2k
        zfun = 1j * mpmath.sqrt(mpmath.pi) * mpmath.exp(-z * z) * mpmath.erfc(-1j * z)
        return 1 + (1 + z * zfun) / k**2

    return complex(mpmath.findroot(d, mpmath.mpc(1.28, -0.066)))


# frozen from _mp_root(0.4)
OMEGA_04 = 1.2850569696537464
GAMMA_04 = 0.06612795869074918


def test_grid_symmetric_and_spacing():
    g = plasma.build_grid(32, 4.5)
    assert g.velocities[0] == -4.5 and g.velocities[-1] == 4.5
    assert g.dv == pytest.approx(9 / 31, rel=1e-15)
    np.testing.assert_allclose(g.velocities, -g.velocities[::-1], atol=1e-15)
    assert g.n_qubits == 5


@pytest.mark.parametrize("n", [0, 3, 12])
def test_grid_rejects_non_power_of_two(n):
    with pytest.raises(ValueError):
        plasma.build_grid(n, 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        plasma.default_config(k=0.0)
    with pytest.raises(ValueError):
        plasma.default_config(t=-1.0)
    with pytest.raises(ValueError):
        plasma.default_config(epsilon=0.0)


def test_hamiltonian_structure():
    cfg = plasma.default_config()
    h = plasma.build_hamiltonian(cfg)
    m = h.matrix()
    v, dv = cfg.grid.velocities, cfg.grid.dv
    g = np.exp(-v**2 / 2) / math.sqrt(2 * math.pi)
    assert m.shape == (33, 33)
    np.testing.assert_allclose(np.diag(m)[:32], 0.4 * v, atol=1e-15)
    np.testing.assert_allclose(m[:32, 32], np.sqrt(dv * g) * v, atol=1e-15)
    np.testing.assert_allclose(m, m.T, atol=0)
    off = m[:32, :32] - np.diag(np.diag(m[:32, :32]))
    assert np.all(off == 0) and m[32, 32] == 0


def test_k_zero_two_level_block():
    # for k = 0 the matrix is a star graph: eigenvalues 0 (N-1 times) and +-||alpha v||
    cfg = plasma.default_config(n_points=8, v_max=2.0)
    h = plasma.build_hamiltonian(cfg, k=0.0).matrix()
    lam = np.linalg.eigvalsh(h)
    border = np.linalg.norm(h[:8, 8])
    np.testing.assert_allclose(lam[[0, -1]], [-border, border], atol=1e-14)
    np.testing.assert_allclose(lam[1:-1], 0, atol=1e-14)


def test_encoding_parameters_default():
    cfg = plasma.default_config()
    enc = plasma.compute_encoding(cfg)
    dv, vmax, k, n = 9 / 31, 4.5, 0.4, 32
    v = cfg.grid.velocities
    gmax = max(np.abs(v * np.exp(-v**2 / 2))) / math.sqrt(2 * math.pi)
    gam = k * k * vmax / (dv * n * gmax)
    c2 = gam / 2 * (math.sqrt(1 + 4 / gam) - 1)
    assert enc.gamma_cap == pytest.approx(gam, rel=1e-13)
    assert enc.c_sq == pytest.approx(c2, rel=1e-13)
    assert enc.beta == pytest.approx(c2 / (k * vmax), rel=1e-13)
    # frozen values
    assert enc.gamma_cap == pytest.approx(0.32037, abs=1e-5)
    assert enc.beta == pytest.approx(0.23781, abs=1e-5)
    assert cfg.t / enc.beta == pytest.approx(105.684, abs=1e-3)
    assert enc.lambda_bound == pytest.approx(k * vmax + math.sqrt(dv * n * vmax * gmax), rel=1e-13)


def test_encoding_amplitudes_principal_roots():
    enc = plasma.compute_encoding(plasma.default_config(n_points=8, v_max=2.0))
    v = plasma.build_grid(8, 2.0).velocities
    neg = v < 0
    assert np.all(np.abs(enc.d[neg].real) < 1e-15) and np.all(enc.d[neg].imag > 0)
    assert np.all(enc.d[~neg].imag == 0)
    np.testing.assert_allclose(np.abs(enc.d) ** 2, np.abs(v) / 2.0, atol=1e-15)
    assert np.max(np.abs(enc.b)) <= 1 + 1e-15


@settings(max_examples=100, deadline=None)
@given(
    k=st.floats(0.05, 2.0),
    vmax=st.floats(1.0, 10.0),
    nq=st.integers(1, 6),
)
def test_lambda_sandwich(k, vmax, nq):
    cfg = plasma.default_config(k=k, v_max=vmax, n_points=2**nq)
    enc = plasma.compute_encoding(cfg)
    assert 0.8 * enc.lambda_bound - 1e-12 <= 1 / enc.beta <= enc.lambda_bound + 1e-12
    assert enc.lambda_prime <= enc.lambda_bound + 1e-12


def test_initial_state_normalized_and_symmetric():
    cfg = plasma.default_config()
    x0 = plasma.initial_state(cfg)
    assert np.linalg.norm(x0.vector()) == pytest.approx(1.0, abs=1e-14)
    assert x0.e_field.real == 0
    assert x0.eta * abs(x0.e_field) == pytest.approx(0.928, abs=5e-3)


def test_initial_state_rejects_zero():
    cfg = plasma.default_config(n_points=4)
    with pytest.raises(ValueError):
        plasma.initial_state(cfg, f_tilde=np.zeros(4))


def test_dispersion_root_matches_independent_solver():
    root = plasma.dispersion_solve(0.4)
    ref = _mp_root(0.4)
    assert root.omega == pytest.approx(ref.real, abs=1e-10)
    assert root.gamma == pytest.approx(-ref.imag, abs=1e-10)
    assert root.omega == pytest.approx(OMEGA_04, abs=1e-12)
    assert root.gamma == pytest.approx(GAMMA_04, abs=1e-12)
    assert root.residual <= 1e-10


@pytest.mark.parametrize("k", [0.3, 0.5])
def test_dispersion_other_k(k):
    root = plasma.dispersion_solve(k)
    ref = _mp_root(k) if k != 0.3 else None
    assert abs(plasma.dispersion_function(complex(root.omega, -root.gamma), k)) < 1e-10
    if ref is not None:
        assert root.omega == pytest.approx(ref.real, abs=1e-9)


def test_dispersion_failure_reports_last_iterate():
    with pytest.raises(plasma.DispersionError) as info:
        plasma.dispersion_solve(0.4, max_iter=1)
    assert isinstance(info.value.last_iterate, complex)


def test_theory_estimates():
    w, g = plasma.theory_estimates(0.4)
    assert w == pytest.approx(1.24, abs=5e-3)
    assert g == pytest.approx(0.099, abs=5e-3)


def test_default_rescaled_profile_is_half_gaussian():
    # F'_j proportional to F_j / sqrt(G_j) with F = G gives exp(-v^2/4)
    cfg = plasma.default_config()
    x0 = plasma.initial_state(cfg)
    v = cfg.grid.velocities
    ratio = x0.f_prime / np.exp(-v**2 / 4)
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)
    assert ratio[0].real == 0
