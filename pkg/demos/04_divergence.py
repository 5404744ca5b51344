"""
The weight cannot be improved
=============================

For f = D_{M_{2n+1}} - D_{M_{2n}} the Fejer mean at q_n, divided by a weight
that grows slower than (n+1)^(1/p-2), gets large in weak L_p relative to the
H_p norm of f.
"""

from vilenkin import experiments as ex
from vilenkin.group import walsh

g = walsh(12)
p = 1 / 3

for phi in ("powerlog", "power"):
    rep = ex.divergence_sweep(g, p, phi, [3, 4, 5])
    print(f"phi = {phi}")
    for case in rep.cases:
        print(f"  n_k = {case['n_k']}  q = {case['q']:6d}  R = {case['ratio']:.4g}")
    print("  checks pass:", rep.passed)
