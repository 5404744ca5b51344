"""
Atoms and the weighted maximal operator
=======================================

Fejer means of a p-atom vanish up to n = M_N. Outside the support cylinder
we track the p-th power integral of the weighted maximal function as the
atom shrinks.
"""

from vilenkin import Point
from vilenkin import experiments as ex
from vilenkin.group import walsh

g = walsh(9)
p = 1 / 3

###############################################################################
# One seeded atom per level; J is the integral over the complement of I_N.
for N in (3, 4, 5, 6):
    a = ex.theorem1_atoms(g, p, N, 1)[0]
    J, low = ex.atom_integral(a, Point.zero(N), p, g.M[N + 3])
    print(f"N = {N}: J = {J:.4f}   max |sigma_n a| for n <= M_N: {low:.1e}")

###############################################################################
# J still climbs with N at this scale. Its increments shrink, and the
# geometric rate below is the one a uniform bound would predict.
print("rate 2^-(1-2p) =", 2 ** -(1 - 2 * p))
