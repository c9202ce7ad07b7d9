"""
Getting numbers in and out
==========================

Prepare the initial state by repeat-until-success, recover a complex amplitude
from three interference magnitudes, and compare amplitude estimation with
plain sampling.
"""
import numpy as np

from vlasim import oracle, plasma, readout
from vlasim import qubitization as qz

cfg = plasma.default_config()
x0 = plasma.initial_state(cfg)
layout = qz.layout_for(cfg.grid.n_points)

# state preparation: success rate and the matching prediction
prep = readout.prepare_state(x0, layout)
print(f"success probability {prep.success_probability:.6f} (predicted {prep.predicted_probability:.6f}), "
      f"expected repetitions {prep.expected_repetitions:.3f}")
print(f"velocity branch <|h|^2> = {prep.velocity_branch_probability:.4f}")

# the final field amplitude, read back through three phase-shifted interferences
nu = complex(oracle.exact_evolve(plasma.build_hamiltonian(cfg), x0, cfg.t)[-1])
mags = [abs(nu + np.exp(1j * z)) / 2 for z in readout.ZETAS]
print(f"nu = {nu:.6f}, reconstructed = {readout.reconstruct_nu(*mags):.6f}")

# precision delta on |nu|^2: coherent iterations versus shots
p = abs(nu) ** 2
for delta in (1e-2, 1e-3):
    m = readout.iterations_for_precision(p, delta)
    shots = readout.shots_for_precision(p, delta)
    print(f"delta={delta:.0e}: amplitude estimation M={m} (cost {2 * m} walks), sampling {shots} shots")
