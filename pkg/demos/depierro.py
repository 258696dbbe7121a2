"""Cyclic projections onto a line, a parallel line and a hyperbola epigraph.

Sets: C1 = R x {0}, C2 = R x {1}, C3 = {y >= 1/x > 0}.  C2 meets C3, so
P3 P2 P1 has fixed points and the orbit settles on the line y = 1.  C1 and C3
do not meet, yet their gap is zero: P3 P1 P2 has zero displacement vector but
no fixed point, and its orbit creeps to the right like (4n)^(1/4).

Writes depierro_cyclic.svg / .csv into the current directory.

Run: python3 demos/depierro.py
"""

import numpy as np

from displab import EstimatorConfig, compose, diagnose_attainment, emit_trace, estimate_displacement
from displab.experiments import DEPIERRO_X0, depierro_sets

p1, p2, p3 = depierro_sets()
cyclic, noncyclic = compose([p1, p2, p3]), compose([p2, p1, p3])

est = estimate_displacement(cyclic, EstimatorConfig(x0=DEPIERRO_X0))
print("cyclic: |v| <=", est.upper_bound, "limit", est.final_iterate, "after", est.iterations)

emit_trace(cyclic, DEPIERRO_X0, 30, "depierro_cyclic.csv", "depierro_cyclic.svg")

for n in (1_000, 10_000, 50_000):
    diag = diagnose_attainment(noncyclic, np.zeros(2), EstimatorConfig(x0=DEPIERRO_X0, max_iter=n))
    x = diag["final_iterate"][0]
    print(f"noncyclic after {n:6d} steps: x = {x:8.4f}, x^4 / n = {x ** 4 / n:.3f}, "
          f"residual = {diag['fixed_point_residual']:.2e}")
