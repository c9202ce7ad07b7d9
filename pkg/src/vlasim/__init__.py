"""Classical emulation of a qubitization-based quantum algorithm for linear Landau damping."""
from .plasma import (
    build_grid,
    build_hamiltonian,
    compute_encoding,
    default_config,
    dispersion_solve,
    initial_state,
    theory_estimates,
)
from .qubitization import block_encoding, run_simulation, verify_encoding
from .phases import compute_phase_schedule, query_bound

__version__ = "0.1.0"
