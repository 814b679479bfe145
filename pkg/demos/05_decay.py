"""Decay of U_hat, psi1 and psi2 along large circles, and L2 tails.

Run: python demos/05_decay.py
"""
import numpy as np

from moutard2d.moutard import builtin_example
from moutard2d.spectral import decay_report, gram_matrix, l2_tail

pkg = builtin_example(C=-12)
table = decay_report(pkg, radii=(50, 100, 200, 400))
print("r    " + "  ".join(f"{n:>8}" for n in table.rows))
for i, r in enumerate(table.radii):
    print(f"{r:<5.0f}" + "  ".join(f"{v[i]:8.3f}" for _, v in table.rows.values()))

# annulus masses R <= r <= 2R; r^-2 decay gives ratio 1/4
for name, psi in (("psi1", pkg.psi1), ("psi2", pkg.psi2)):
    masses, ratios = l2_tail(psi, [25, 50, 100])
    print(name, "annulus ratios", np.round(ratios, 4))

G, Gn = gram_matrix(pkg.psi1, pkg.psi2, 50)
print("normalized Gram determinant on [-50, 50]^2:", round(float(np.linalg.det(Gn)), 6))
