"""
Reading expectations through an ancilla probe
=============================================

A probe qubit in |+> controls exp(-i alpha A) on the system; its
<sigma_y> is -<sin(alpha A)>.  The small-angle bias shrinks as alpha^2.
"""

import numpy as np

from fqergo.feedback import FQErgoConfig, run_fqergo
from fqergo.hamiltonians import two_qubit_h0
from fqergo.probe import probe_expect_hermitian
from fqergo.states import random_pure

h0 = two_qubit_h0(1.0, 0.01)
rho = random_pure(2, 3)
exact = np.trace(h0.matrix @ rho.matrix).real
for alpha in (0.2, 0.1, 0.05, 0.01):
    est = probe_expect_hermitian(rho, h0.matrix, alpha)
    print(f"alpha={alpha:<5} <H0> estimate {est:.8f}  bias {est - exact:+.2e}")

# The full loop with probe readings instead of exact traces
cfg = FQErgoConfig(phases=(("local", 30), ("global", 30)))
e_exact = run_fqergo(rho, h0, cfg).energies
e_probe = run_fqergo(rho, h0, cfg.with_(measurement="probe", alpha=0.01)).energies
print("largest per-iteration energy difference:", np.max(np.abs(e_exact - e_probe)))
