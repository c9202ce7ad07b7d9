"""
Qubitized time evolution and its error budget
=============================================

Run the full signal-processing circuit for the default problem at several
tolerances and compare with the exact evolution.
"""
import time

from vlasim import plasma
from vlasim import qubitization as qz
from vlasim.phases import query_bound

cfg = plasma.default_config()
enc = plasma.compute_encoding(cfg)
t_prime = cfg.t / enc.beta
print(f"t' = t / beta = {t_prime:.3f}")

# one row per tolerance: queries, the analytic bound b(n) and the measured error
print(f"{'eps':>8} {'Q':>5} {'Q bound':>8} {'b(n)':>10} {'actual':>10} {'failure':>10} {'sec':>5}")
for eps in (1e-1, 1e-2, 1e-4, 1e-6, 1e-8):
    start = time.perf_counter()
    rep = qz.run_simulation(plasma.default_config(epsilon=eps))
    print(f"{eps:8.0e} {rep.query_count:5d} {query_bound(t_prime, eps):8d} {rep.epsilon_bound:10.2e} "
          f"{rep.epsilon_actual:10.2e} {rep.failure_probability:10.2e} {time.perf_counter() - start:5.2f}")
