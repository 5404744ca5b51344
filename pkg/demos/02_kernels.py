"""
Dirichlet and Fejer kernels
===========================

The Dirichlet kernel at M_n is a scaled cylinder indicator, and the Fejer
kernels have uniformly bounded L1 norms.
"""

import numpy as np

from vilenkin import Convention, Point, dirichlet, fejer_kernel, fejer_MA_closed, kernel_l1_norm, walsh

g = walsh(9)

###############################################################################
# D_8 takes the value 8 on I_3 and vanishes elsewhere.
D8 = dirichlet(g, 8, 4)
print("D_8 values:", np.unique(D8.values.real))

###############################################################################
# K_{M_A} has a closed form off I_A.
K = fejer_kernel(g, 16, 5)
z = Point((0, 1, 0, 0, 0))
print("K_16 at", z.digits, "=", K.at(z).real, "closed form", fejer_MA_closed(g, 4, z))

###############################################################################
# L1 norms for every n up to 512 under both summation conventions.
for conv in Convention:
    norms = [kernel_l1_norm(g, n, 9, conv) for n in range(1, 513)]
    print(f"{conv.value:9s} sup ||K_n||_1 = {max(norms):.5f} at n = {int(np.argmax(norms)) + 1}")
