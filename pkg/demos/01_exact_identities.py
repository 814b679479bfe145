"""Exact construction of the double transform, checked with no tolerances.

Run: python demos/01_exact_identities.py
"""
from moutard2d import trigring as tr
from moutard2d.helmholtz import builtin_omega1, builtin_omega2
from moutard2d.moutard import identity_suite, builtin_example, theta_exact

w1, w2 = builtin_omega1(), builtin_omega2()
print("omega1 =", w1)
print("omega2 =", w2)

# both solve Lap w + w = 0, decided exactly by the normal form
print("Lap w1 + w1 is zero:", tr.is_zero(w1.laplacian() + w1))

# the ring reduces products to single frequencies
print("sin^2 x =", tr.sin_x() * tr.sin_x())

# Q = omega1 * theta1 for C = -2; Q(0, 0) = 4C + 1
sol = theta_exact(w1, w2, kappa=4 * -2 + 1)
print("\nQ =", sol.Q)
print("terms in Q:", len(sol.Q), " Q(0,0) =", sol.Q.value_at_origin())

pkg = builtin_example(C=-2)
print("\nleading part of P:", pkg.P.leading_terms())
print("P has", len(pkg.P), "terms of total degree <=", pkg.P.total_degree)

for name, ok in identity_suite(pkg):
    print(f"  {'ok  ' if ok else 'FAIL'} {name}")
