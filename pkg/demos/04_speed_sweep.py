"""
How many iterations, as a function of the time step
===================================================

Iterations n until the energy stays within 1e-3 of the passive energy
for three consecutive iterations, over a grid of omega0*tau.
"""

import numpy as np

from fqergo.experiments import speed_sweep

grid = np.linspace(0.1, 4.0, 40)
for system in ("1q", "2q"):
    res = speed_sweep(system, grid, n_states=10, seed=0)
    print(system)
    for row in res.summary()[::3]:
        print(f"  omega0*tau={row['omega0_tau']:.1f}  converged {row['converged']:2d}/10  "
              f"n min/median/max = {row['min']}/{row['median']}/{row['max']}")
