"""
Single-qubit ergotropy by feedback
==================================

Twenty random pure states of a qubit with levels (0, 1) are driven
towards their passive state.  The drop in energy is compared with the
exact ergotropy from the spectral construction.
"""

import numpy as np

from fqergo.experiments import single_qubit_suite
from fqergo.hamiltonians import single_qubit_h0
from fqergo.feedback import FQErgoConfig, run_fqergo
from fqergo.states import density_from_bloch

# One state first: half-mixed, tilted 2 rad away from the ground state
h0 = single_qubit_h0(1.0)
rho = density_from_bloch(2.0, 0.4, 0.5)
traj = run_fqergo(rho, h0, FQErgoConfig(tau=0.8))
print("energy per iteration:", np.round(traj.energies[:8], 5))
print("betas of iteration 1:", traj.records[0].betas)

# The whole suite, without and with 5 degree rotation errors
for error_on in (False, True):
    res = single_qubit_suite(n_states=20, error_on=error_on, seed=0)
    dev = res.deviations()
    print(f"errors={error_on}: max |est - exact| = {np.max(np.abs(dev)):.2e}, "
          f"largest overestimate = {np.max(dev):.2e}")
