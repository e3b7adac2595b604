"""Three routes to one polynomial.

The deformed character of a finite type A weight can be computed by summing
over interlacing triangles with t-weights, by symmetrizing over the Weyl
group, or by adding up vertex-cone transforms of the associated polytope.
This script walks a small example through all three and shows the classical
specializations at t = 0 and t = 1.
"""

from hlbrion.finite_hl import (
    FiniteWeight, enumerate_gt, hl_def, hl_gt, mu_exponent, orbit_sum, p_of,
    schur_bialternant, subs_t, verify_contribfin,
)

weight = FiniteWeight(3, [1, 1])      # lam = (2, 1, 0)
print("weight:", weight, "parts:", weight.parts)

print("\nthe interlacing triangles and their weights:")
for pat in enumerate_gt(weight):
    print("  ", pat, "->", mu_exponent(pat), "with", p_of(pat))

gt = hl_gt(weight)
print("\ncombinatorial route:  ", gt.to_text())
print("symmetrization route: ", hl_def(weight).to_text())
assert gt == hl_def(weight)

print("\nat t=0 (alternant ratio):", schur_bialternant(weight).to_text())
assert subs_t(gt, 0) == schur_bialternant(weight)
print("at t=1 (orbit sum):      ", orbit_sum(weight).to_text())
assert subs_t(gt, 1) == orbit_sum(weight)

report = verify_contribfin(weight)
print("\nvertex route:", report["n_relevant"], "relevant vertices out of",
      report["n_vertices"], "->", "consistent" if report["ok"] else "BROKEN")
