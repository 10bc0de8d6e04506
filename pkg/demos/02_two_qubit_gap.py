"""
Local and global ergotropy of two coupled qubits
================================================

30 iterations with local drives only, then 30 more with the XY drive and
the tilted phase gate switched on.  The two plateaus give the local and
global ergotropy, their difference the ergotropy gap.
"""

import numpy as np

from fqergo.experiments import two_qubit_suite
from fqergo.feedback import FQErgoConfig, run_fqergo
from fqergo.hamiltonians import two_qubit_h0
from fqergo.oracle import oracle_report
from fqergo.states import bell_phi_plus

h0 = two_qubit_h0(1.0, 0.01)
cfg = FQErgoConfig(phases=(("local", 30), ("global", 30)))

# A Bell state stores all of its ergotropy in correlations
bell = bell_phi_plus()
traj = run_fqergo(bell, h0, cfg)
rep = oracle_report(bell, h0)
print(f"Bell: local est {traj.estimated_ergotropy_local:.4f}, global est {traj.estimated_ergotropy_global:.4f}")
print(f"      exact global {rep.ergotropy:.4f}, local sum {rep.local_sum_ergotropy:.4f}, "
      f"local opt {rep.local_opt_ergotropy:.4f}, gap {rep.gap:.4f}")

# Random states, clean and with a 2 degree random-Hamiltonian error each iteration
for error_on in (False, True):
    res = two_qubit_suite(n_states=20, error_on=error_on, seed=0, local_opt=False)
    print(f"errors={error_on}: global RMS {res.rms('ergotropy'):.3e}, gap RMS {res.rms('gap'):.3e}")
