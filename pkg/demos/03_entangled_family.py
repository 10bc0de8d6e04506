"""
Ergotropy gap versus entanglement
=================================

States U_G|00> with a Hadamard and a controlled x-rotation by nu.  The
gap grows with the entanglement entropy of either qubit.
"""

import numpy as np

from fqergo.experiments import entangled_family

rows = entangled_family(np.linspace(0, np.pi, 7))
print(" nu     S(bits)  est gap  exact gap")
for r in rows:
    t, o = r["trajectory"], r["oracle"]
    print(f"{r['nu']:5.3f}  {r['entropy_bits']:7.4f}  {t.estimated_gap:7.4f}  {o.gap:9.4f}")
