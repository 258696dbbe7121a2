"""Building firmly nonexpansive operators and checking their defining inequalities.

Run: python3 demos/operators_tour.py
"""

import numpy as np

from displab import (AffineScale, ProjBall, ProjHyperbolaEpi, ProjHyperplane, Translation,
                     check_averaged, check_firm_nonexpansive, compose, convex_combination)

# Leaves: a translation, two projectors and a contraction.
t = Translation([1.0, 0.0])
line = ProjHyperplane([0.0, 1.0], 0.0)
ball = ProjBall([0.0, 0.0], 1.0)
hyp = ProjHyperbolaEpi()
print("T(0,0)            =", t([0.0, 0.0]))
print("P_line(3,5)       =", line([3.0, 5.0]))
print("P_ball(3,4)       =", ball([3.0, 4.0]))
print("P_hyperbola(2,.1) =", hyp([2.0, 0.1]))

# A composition of m firmly nonexpansive maps is m/(m+1)-averaged, and the
# library tracks that constant through the expression tree.
c = compose([line, ball, hyp])
print("compose averaged constant:", c.averaged_constant)
print("violations of 3/4-averagedness:", check_averaged(c, 0.75, 5000).violations)

# Convex combinations of firmly nonexpansive maps stay firmly nonexpansive.
combo = convex_combination([0.5, 0.5], [Translation([1.0]), AffineScale(0.5, [0.0])])
print("combo fixed point check, T(-2) =", combo([-2.0]))
print("firm-NE violations:", check_firm_nonexpansive(combo, 5000).violations)
