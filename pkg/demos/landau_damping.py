"""
Linear Landau damping with the exact oracle
===========================================

Evolve the default k = 0.4 perturbation, fit the electric field and compare
with the complex root of the dispersion function.
"""
import math

from vlasim import oracle, plasma, readout

cfg = plasma.default_config()
h = plasma.build_hamiltonian(cfg)
x0 = plasma.initial_state(cfg)
print(f"grid: {cfg.grid.n_points} points on [-{cfg.grid.v_max}, {cfg.grid.v_max}], dv = {cfg.grid.dv:.4f}")
print(f"initial field weight eta|E0| = {x0.eta * abs(x0.e_field):.4f}")

# sample E(t) on [0, 8 pi]; the state vector stores eta * E
ts = oracle.evolve_series(h, x0, oracle.sample_times(cfg.t, 0.05))
ts = oracle.TimeSeries(ts.times, ts.e_field / x0.eta)
print(f"max |Re E| = {abs(ts.e_field.real).max():.1e} (symmetric background keeps E imaginary)")

# fit past the initial transient
fit = readout.fit_damped_sinusoid(ts, (2 * math.pi, 8 * math.pi))
root = plasma.dispersion_solve(cfg.k)
bg = plasma.theory_estimates(cfg.k)
print(f"fit        omega = {fit.omega:.5f}  gamma = {fit.gamma:.5f}")
print(f"dispersion omega = {root.omega:.5f}  gamma = {root.gamma:.5f}")
print(f"estimates  omega = {bg[0]:.5f}  gamma = {bg[1]:.5f}")
