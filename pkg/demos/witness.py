"""Near-fixed points from the product-space construction.

Given displacement vectors v_i of T_1..T_m, the map x -> v + T(R x) on X^m
has approximate fixed points, and the last part of such a tuple nearly
satisfies |x - T_m...T_1 x| <= eps + sum |v_i|.

Run: python3 demos/witness.py
"""

import numpy as np

from displab import Translation, cyclic_shift, synthesize_near_fixed_point
from displab.experiments import depierro_sets

print("cyclic shift of (1,2,3):", cyclic_shift(np.array([[1.0], [2.0], [3.0]])).ravel())

x, cert = synthesize_near_fixed_point([Translation([1.0]), Translation([2.0])], [[1.0], [2.0]], 1e-2)
print("translations:", cert.to_dict())

x, cert = synthesize_near_fixed_point(list(depierro_sets()), np.zeros((3, 2)), 1e-2)
print("three sets: x0 =", cert.x0, "residual", cert.composite_residual, "<=", cert.bound_rhs)
