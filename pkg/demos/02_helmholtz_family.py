"""The plane-wave family and where the two builtin solutions sit inside it.

Run: python demos/02_helmholtz_family.py
"""
import cmath

import numpy as np

from moutard2d.helmholtz import (FamilyParams, builtin_omega1, builtin_omega2,
                                 family_exact, family_numeric,
                                 find_family_representation, list_family,
                                 verify_helmholtz)

for row in list_family(1):
    print(f"lambda={row['lambda']:>2} m={row['m']} {row['part']:4}  {row['element']}")

# both builtins are rational combinations of members with m <= 2
for name, w in (("omega1", builtin_omega1()), ("omega2", builtin_omega2())):
    rep = find_family_representation(w, max_m=2)
    terms = ", ".join(f"{c} * [{p.lam}, m={p.m}, {p.part}]" for c, p in rep)
    print(f"\n{name} = {terms}")

# off the quarter turns only the numeric oracle is available
lam = cmath.exp(1j * np.pi / 5)
sol = family_numeric(FamilyParams(k=1.0, lam=lam, m=2))
print("\nsup |Lap f + f| on a 41x41 grid, lambda = e^{i pi/5}, m = 2:",
      verify_helmholtz(sol).sup_residual)

x = np.linspace(-3, 3, 5)
print("exact vs numeric, lambda = i, m = 3:",
      np.max(np.abs(family_exact(1, 1j, 3).evaluator()(x, x)
                    - family_numeric(FamilyParams(1.0, 1j, 3))(x, x))))
