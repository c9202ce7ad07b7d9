import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlasim import phases as ph
from vlasim.statevector import HADAMARD

T_PRIME = 105.6838  # default config, t / beta


def _undo_absorption(sched):
    rots = sched.rotations()
    rots[0] = rots[0] @ HADAMARD
    rots[-1] = HADAMARD @ rots[-1]
    rots[0] = np.exp(1j * sched.global_phase) * rots[0]
    return rots


@pytest.mark.parametrize("n,tp", [(1, 1.0), (5, 2.0), (20, 7.5), (30, 0.1)])
def test_error_bound_closed_form(n, tp):
    assert ph.error_bound(n, tp) == pytest.approx(32 * (tp / 2) ** n / math.factorial(n), rel=1e-12)


def test_error_bound_large_order_no_overflow():
    # log domain: (t'/2)^n and n! both overflow a double here
    val = ph.error_bound(400, 105.7)
    assert 0 < val < 1e-30


@settings(max_examples=80, deadline=None)
@given(tp=st.floats(0.01, 300), eps=st.floats(1e-12, 1.0))
def test_truncation_order_is_minimal(tp, eps):
    n = ph.truncation_order(tp, eps)
    assert ph.error_bound(n, tp) <= eps
    if n > 1:
        assert ph.error_bound(n - 1, tp) > eps


def test_truncation_order_cap():
    with pytest.raises(ph.ScheduleError):
        ph.truncation_order(1e5, 1e-3, cap=100)


def test_truncation_order_rejects_bad_input():
    with pytest.raises(ValueError):
        ph.truncation_order(1.0, 0.0)
    with pytest.raises(ValueError):
        ph.truncation_order(-1.0, 0.1)


@settings(max_examples=40, deadline=None)
@given(tp=st.floats(0.1, 60), eps=st.floats(1e-10, 0.5))
def test_jacobi_anger_truncation_within_bound(tp, eps):
    n = ph.truncation_order(tp, eps)
    c = ph.jacobi_anger(tp, n - 1)
    theta = np.linspace(0, 2 * np.pi, 257)
    k = np.arange(-(n - 1), n)
    approx = np.exp(1j * np.outer(theta, k)) @ c
    err = np.max(np.abs(approx - np.exp(-1j * tp * np.cos(theta))))
    assert err <= ph.error_bound(n, tp) + 1e-12


def test_query_counts_default():
    s = ph.compute_phase_schedule(T_PRIME, 1e-2)
    assert s.query_count == 4 * (s.n - 1)
    assert 560 <= s.query_count <= 640
    assert s.query_count <= ph.query_bound(T_PRIME, 1e-2)
    assert s.length == 2 * (s.n - 1)
    assert s.angles.shape == (2 * (s.n - 1) + 1, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_euler_round_trip(seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    u = q * (np.diag(r) / np.abs(np.diag(r)))
    np.testing.assert_allclose(ph.euler_matrix(*ph.euler_phases(u)), u, atol=1e-12)


@pytest.mark.parametrize("u", [np.eye(2), np.array([[0, 1], [1, 0]]), np.diag([1j, -1j]),
                               np.array([[0, 1j], [1j, 0]]), HADAMARD])
def test_euler_degenerate_cases(u):
    u = np.asarray(u, dtype=complex)
    np.testing.assert_allclose(ph.euler_matrix(*ph.euler_phases(u)), u, atol=1e-14)


@pytest.mark.parametrize("tp,m", [(3.0, 8), (20.0, 40)])
def test_complement_and_layer_strip(tp, m):
    p, scale = ph.target_polynomial(tp, m, 1e-3)
    q = ph.complementary_polynomial(p)
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 301))
    pv, qv = np.polyval(p[::-1], z), np.polyval(q[::-1], z)
    np.testing.assert_allclose(np.abs(pv) ** 2 + np.abs(qv) ** 2, 1, atol=1e-10)
    rots = ph.layer_strip(p, q)
    for r in rots:
        np.testing.assert_allclose(r.conj().T @ r, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(ph.realized_polynomial(rots, z), pv, atol=1e-10)


@pytest.mark.parametrize("eps", [1e-2, 1e-6])
def test_schedule_realizes_evolution(eps):
    tp = 30.0
    s = ph.compute_phase_schedule(tp, eps)
    theta = np.linspace(0, np.pi, 200)
    z = np.exp(1j * theta)
    p = ph.realized_polynomial(_undo_absorption(s), z)
    f = p * z ** (-s.m)
    assert np.max(np.abs(f - np.exp(-1j * tp * np.cos(theta)))) <= s.bound


def test_zero_time_is_identity():
    s = ph.compute_phase_schedule(0.0, 1e-3)
    assert s.n == 1 and s.query_count == 0
    p = ph.realized_polynomial(_undo_absorption(s), np.array([1.0, 1j]))
    np.testing.assert_allclose(p, 1, atol=1e-14)


def test_schedule_json_round_trip(tmp_path):
    s = ph.compute_phase_schedule(12.0, 1e-4)
    path = tmp_path / "schedule.json"
    s.to_json(path)
    back = ph.PhaseSchedule.from_json(path)
    assert (back.n, back.t_prime, back.epsilon) == (s.n, s.t_prime, s.epsilon)
    np.testing.assert_array_equal(back.phi, s.phi)


def test_schedule_json_length_check(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 4, "t_prime": 1.0, "epsilon": 0.1, "phi": [0.0, 1.0]}')
    with pytest.raises(ph.ScheduleError):
        ph.PhaseSchedule.from_json(path)


def test_query_bound_formula():
    assert ph.query_bound(T_PRIME, 1e-2) == math.ceil(2 * math.e * T_PRIME + 4 * math.log(100) + 6)
    for eps in (1e-1, 1e-3, 1e-6, 1e-8):
        assert ph.compute_phase_schedule(T_PRIME, eps).query_count <= ph.query_bound(T_PRIME, eps)
