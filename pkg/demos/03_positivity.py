"""Where Q stops having zeros, with a certificate for each verdict.

Run: python demos/03_positivity.py
"""
from moutard2d.moutard import builtin_example
from moutard2d.positivity import certify, outer_bound, random_probe, threshold_C

# C = 0: Q(0,0) = 1 while Q -> -inf, so a zero exists
cert = certify(builtin_example(0).Q, 0)
print("C = 0:", cert.verdict, "witness", cert.witness, "Q =", round(cert.witness_value, 4))

# outside [-R0, R0]^2 the quartic wins; the radius shrinks as C decreases
for C in (-10, -100, -1000):
    R0, margin = outer_bound(builtin_example(C).Q)
    print(f"C = {C:>5}: R0 = {R0:<8} outer margin {margin:.3g}")

# Q depends on C only through the constant 4C + 1
base = builtin_example(0).Q
res = threshold_C(lambda c: base + 4 * c)
print("\nsearch path:", res.path)
print("C* =", res.C_star)
good = res.certified
print(f"cells {len(good.leaves)}, finest side {good.spacing:.4g}, inner margin {good.inner_margin:.3g}")
print("revalidated margin:", good.revalidate(base + 4 * res.C_star))
print("max of Q over 10^6 random points:", random_probe(base + 4 * res.C_star, 1.5 * good.R0))
