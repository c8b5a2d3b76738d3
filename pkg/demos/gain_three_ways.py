"""One gain term, three independent routes.

Q+(g, h)(v) is evaluated by direct integration over relative velocity and
scattering direction, by the point/hyperplane form, and (for f = g = h and
Maxwellian molecules) through the Fourier side on a grid. A Maxwellian is
then checked to be an equilibrium: gain equals loss pointwise.
"""
import time

import numpy as np

from boltzgain import (AngularKernel, CollisionKernel, GridFunction, QuadratureSpec,
                       VelocityFunction, q0_plus_bobylev, q_minus, q_plus_carleman, q_plus_direct)

quad = QuadratureSpec(sphere_order=10, radial_order=16)
g = VelocityFunction.bump(3, 1.2).shifted([0.2, -0.1, 0.0])
h = VelocityFunction.gaussian(3, 1.5).shifted([-0.3, 0.0, 0.1])
v = np.array([0.1, 0.2, -0.3])

print("non-radial pair, mild angular singularity (1-s)^(-1/4)")
for lam in (0.0, 1.0):
    ck = CollisionKernel(lam, AngularKernel.power(1.0, 0.25))
    t0 = time.perf_counter()
    d = q_plus_direct(g, h, v, ck, 12, quad)
    t1 = time.perf_counter()
    c = q_plus_carleman(g, h, v, ck, QuadratureSpec(sphere_order=16, radial_order=32))
    t2 = time.perf_counter()
    print(f"  lambda={lam:g}: direct {d:.10f} ({t1 - t0:.1f}s)  carleman {c:.10f} ({t2 - t1:.1f}s)"
          f"  rel diff {abs(c - d) / d:.1e}")

print("\nMaxwellian a exp(-c|v - v0|^2): gain against loss")
M = VelocityFunction.gaussian(3, 1.3, 0.5).shifted([0.4, 0.0, -0.2])
ck = CollisionKernel(1.0, AngularKernel.constant(1.0))
for w in np.random.default_rng(1).uniform(-1, 1, size=(4, 3)):
    gain, loss = q_plus_carleman(M, M, w, ck, quad), q_minus(M, M, w, ck, quad)
    print(f"  v={np.array2string(w, precision=2)}  Q+={gain:.12f}  Q-={loss:.12f}")

print("\nFourier route on a 32^3 grid, f = exp(-|v|^2), lambda = 0")
f = VelocityFunction.gaussian(3)
t0 = time.perf_counter()
Q = q0_plus_bobylev(GridFunction.sample(f, 32, 6.0), AngularKernel.constant(1.0), 12, oversample=4)
print(f"  grid evaluation took {time.perf_counter() - t0:.1f}s")
ck0 = CollisionKernel(0.0, AngularKernel.constant(1.0))
pts = Q.points()
for idx in [(16, 16, 16), (18, 15, 17), (20, 16, 16)]:
    ref = q_plus_direct(f, f, pts[idx], ck0, 10, quad)
    print(f"  v={pts[idx]}  grid {Q.values[idx]:.8f}  direct {ref:.8f}  rel diff {abs(Q.values[idx] / ref - 1):.1e}")
