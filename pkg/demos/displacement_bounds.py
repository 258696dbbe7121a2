"""Minimal displacement vectors of compositions and convex combinations.

The norm of the displacement vector of a composition is at most the sum of
the individual norms; for a convex combination it is at most the norm of the
weighted sum.  Translations show both bounds can be tight or strict.

Run: python3 demos/displacement_bounds.py
"""

from displab import (AffineScale, ProjHalfspace, Translation, check_composition_bound,
                     check_convex_combo_bound, compare_cyclic_rotations, estimate_displacement)

for a2 in (2.0, -2.0):
    r = check_composition_bound([Translation([1.0]), Translation([a2])])
    print(f"a = (1, {a2:+}): |v_comp| = {r['lhs']:.12f}, |v1| + |v2| = {r['rhs']}")

r = check_convex_combo_bound([0.5, 0.5], [Translation([1.0]), AffineScale(0.5, [0.0])])
print(f"strict convex case: |v_bar| = {r['lhs']:.2e} < |sum lambda_i v_i| = {r['rhs']}")

# Rotating the factors of a composition leaves the displacement vector unchanged.
ops = [ProjHalfspace([1.0, 1.0], 0.0), Translation([1.0, -2.0]), ProjHalfspace([0.0, 1.0], 3.0)]
cmp = compare_cyclic_rotations(ops)
print("rotation estimates:", [[round(t, 6) for t in e] for e in cmp["estimates"]])
print("max pairwise gap:", cmp["max_pairwise_gap"])

est = estimate_displacement(Translation([3.0, -1.0]))
print("estimate for a translation:", est.v_hat, "iterations:", est.iterations)
