"""Resolvents of monotone operators and the shift identity.

Shifting A to A~ = -v + A(. - v) shifts its resolvent by v:
J_{A~} = v + J_A.  The check compares that formula with a direct inversion.

Run: python3 demos/resolvent_shift.py
"""

import numpy as np

from displab import (ConstantMap, NormalConeBox, PsdLinear, SubdiffAbs, block_resolvent,
                     resolvent, shift_operator, verify_resolvent_shift)

print("J for A = Id at 4:", resolvent(PsdLinear([[1.0]]))([4.0]))
print("J for normal cone of [0,1] at 2.5:", resolvent(NormalConeBox([0.0], [1.0]))([2.5]))
print("shifted |.| resolvent, v = 2, at x = 2:", resolvent(shift_operator(SubdiffAbs(1.0, 1), [2.0]))([2.0]))

rng = np.random.default_rng(0)
for spec in (ConstantMap([1.0, -1.0]), PsdLinear([[2.0, 1.0], [-1.0, 1.0]]),
             SubdiffAbs(0.5, 2), NormalConeBox([0.0, 0.0], [1.0, 2.0])):
    err = max(verify_resolvent_shift(spec, rng.uniform(-2, 2, 2), seed=k)["max_abs_error"]
              for k in range(10))
    print(f"{type(spec).__name__:14s} max shift-identity error {err:.1e}")

blocks = block_resolvent([ConstantMap([1.0]), PsdLinear([[1.0]])])
print("block resolvent at (0, 4):", blocks([0.0, 4.0]))
