"""
Characters and the fast transform
=================================

Step functions on a truncated Vilenkin group, their coefficients, and the
round trip back.
"""

import numpy as np

from vilenkin import Point, StepFunction, character, forward, forward_naive, inverse, make_group

###############################################################################
# A group with alternating generators 2, 3. ``M`` holds the cylinder counts.
g = make_group([2, 3], 6)
print("m =", g.m)
print("M =", g.M)

###############################################################################
# psi_5 has digits (1, 2); at the point (1, 1) it is exp(2 pi i 7/6).
psi5 = character(g, 5, 2)
print("psi_5 at (1, 1):", psi5.at(Point((1, 1))))

###############################################################################
# Coefficients of a random step function. The fast route does one small DFT
# per digit; the naive route builds the whole character table.
rng = np.random.default_rng(0)
f = StepFunction(g, 6, rng.standard_normal(g.M[6]))
s = forward(f)
print("fast vs naive:", np.max(np.abs(s.coeffs - forward_naive(f).coeffs)))
print("round trip:   ", np.max(np.abs(inverse(s).values - f.values)))
print("Parseval:     ", s.energy(), np.mean(f.values ** 2))
