"""Radial symmetrization can only increase the pairing with P.

For a random non-radial, sign-changing triple (f, g, h) the pairing
|int f P(g, h)| is compared with the pairing of the symmetrized functions,
and the same pairs are pushed through the weighted bound on P.
"""
import numpy as np

from boltzgain import (AngularKernel, ExponentTriple, NuMeasure, QuadratureSpec, RotationSampler,
                       VelocityFunction, lemma22_check, random_test_triple, symmetrize, theorem1_check)

kern = AngularKernel.constant(1.0)
quad = QuadratureSpec(sphere_order=10, radial_order=16)

f, g, h = random_test_triple(3, seed=5)
print("triple:", f.label, "|", g.label, "|", h.label)

sampler = RotationSampler(4096, seed=5)
fs = symmetrize(f, 3, sampler)
for r in (0.0, 0.4, 0.8, 1.2):
    x = np.array([r, 0.0, 0.0])
    print(f"  |x|={r:.1f}  f(x)={float(f(x)):+.4f}  f*(x)={float(fs(x)):.4f}")

for p, q, r in ((3, 3, 3), (2, 4, 4), (6, 3, 2)):
    rep = lemma22_check(f, g, h, p, q, r, kern, 10, sampler, quad)
    print(f"(p,q,r)=({p},{q},{r})  |<f,P(g,h)>|={rep.lhs:.6f}  symmetrized={rep.rhs:.6f}"
          f"  ratio={rep.ratio:.4f}  MC margin={rep.mc_margin:.1e}  {rep.status}")

print("\nweighted bound on P(g, h)")
for alpha in (-1.0, 0.0):
    rep = theorem1_check(g, h, ExponentTriple.holder(2, 2), NuMeasure(3, alpha), kern, 10, quad)
    print(f"  alpha={alpha:g}: ||P(g,h)||_1={rep.lhs:.6f} <= {rep.constant:.4f} * "
          f"{rep.norms[0][1]:.4f} * {rep.norms[1][1]:.4f}  (ratio {rep.ratio:.4f})")
