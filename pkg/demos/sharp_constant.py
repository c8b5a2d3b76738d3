"""How close the power-law pairs get to the sharp constant of B.

The pair g_eps, h_eps has unit norm for every eps, and the norm of B(g_eps,
h_eps) is squeezed between beta_eps and beta_eps * 2**(eps/r). As eps shrinks
the ratio to the sharp constant climbs to 1.
"""
import math

from boltzgain import AngularKernel, ExponentTriple, SigmaMeasure, XiMeasure, sharpness_study

n, alpha = 3, 0.0
e = ExponentTriple.holder(2, 2)
m = XiMeasure(AngularKernel.constant(1.0), n)
study = sharpness_study(e, m, SigmaMeasure(n, alpha), eps_list=[1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4])

print(f"sharp constant     {study.constant:.10f}")
print(f"Gamma(1/4)^2/sqrt(pi) {math.gamma(0.25) ** 2 / math.sqrt(math.pi):.10f}")
print()
print(f"{'eps':>8} {'||B||_1':>12} {'beta_eps':>12} {'ratio':>10} {'tail part':>11}  sandwich")
for row in study:
    print(f"{row.eps:8.0e} {row.norm:12.8f} {row.beta_eps:12.8f} {row.ratio:10.6f} "
          f"{row.part_II:11.3e}  {'ok' if row.sandwich_ok else 'VIOLATED'}")

# first-order convergence: the gap shrinks about as fast as eps
rows = study.rows
print()
for a, b in zip(rows, rows[1:]):
    print(f"gap ratio {a.eps:.0e} -> {b.eps:.0e}: {(1 - a.ratio) / (1 - b.ratio):.2f}"
          f" (eps ratio {a.eps / b.eps:.2f})")
