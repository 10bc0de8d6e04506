"""Feedback-based ergotropy estimation on a dense density-matrix simulator."""
from .feedback import (
    ErrorModel,
    FQErgoConfig,
    IterationRecord,
    Trajectory,
    detect_convergence,
    detect_saturation,
    estimate_ergotropy,
    fqergo_step,
    inject_unitary_error,
    lyapunov_coefficient,
    run_fqergo,
)
from .hamiltonians import (
    DriveSet,
    DriveTerm,
    Hamiltonian,
    drive_set_global,
    drive_set_local,
    energy,
    pauli_op,
    single_qubit_h0,
    two_qubit_h0,
    z_delta,
)
from .oracle import (
    OracleReport,
    exact_ergotropy,
    exact_ergotropy_gap,
    exact_local_ergotropy_opt,
    exact_local_ergotropy_sum,
    oracle_report,
    passive_state,
)
from .states import (
    DensityMatrix,
    bell_phi_plus,
    density_from_bloch,
    entanglement_entropy,
    overlap_fidelity,
    partial_trace,
    random_density,
    random_pure,
    validate_density,
)

__version__ = "0.1.0"
