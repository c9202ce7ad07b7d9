"""
Block encoding of the arrowhead Hamiltonian
===========================================

Build U = U_row^dagger U_col as a gate list, read back its top-left block and
compare with beta * H. Then look at how 1/beta sits between 4 Lambda / 5 and Lambda.
"""
import numpy as np

from vlasim import plasma
from vlasim import qubitization as qz

for n in (2, 4, 8):
    cfg = plasma.default_config(n_points=n)
    enc = plasma.compute_encoding(cfg)
    layout = qz.layout_for(enc)
    ops = qz.block_encoding(enc, layout)
    rep = qz.encoding_report(ops, plasma.build_hamiltonian(cfg), enc.beta, layout)
    print(f"N_v={n}: {layout.n_qubits} qubits, {len(ops)} gates, "
          f"deviation {rep.deviation:.1e}, leakage {rep.leakage:.1e}")

# the normalization for the default problem
enc = plasma.compute_encoding(plasma.default_config())
print(f"beta = {enc.beta:.5f}, 1/beta = {1 / enc.beta:.4f}")
print(f"Lambda = {enc.lambda_bound:.4f}, Lambda' = {enc.lambda_prime:.4f}, ||H|| = "
      f"{np.linalg.norm(plasma.build_hamiltonian(plasma.default_config()).matrix(), 2):.4f}")
