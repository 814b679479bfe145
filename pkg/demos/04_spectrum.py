"""The eigenvalue E = 1 on a truncated box.

E = 1 sits in the continuous spectrum, so the box has many modes near 1.
The analytic pair is found by the angle between span{psi1, psi2} and the
eigenvectors of a window, not by eigenvalue position.

Run: python demos/04_spectrum.py      (about ten seconds)
"""
import numpy as np

from moutard2d.moutard import builtin_example
from moutard2d.positivity import certify
from moutard2d.spectral import GridSpec, eigen_solve, residual_orders

pkg = builtin_example(C=-12)
cert = certify(pkg.Q, pkg.C)
print("certificate:", cert.verdict)

res, orders = residual_orders(pkg, 20, [0.2, 0.1, 0.05], cert)
print("discrete residuals", np.round(res, 5), "orders", np.round(orders, 3))

r = eigen_solve(pkg, GridSpec(20, 0.1), window=(0.95, 1.05), certificate=cert)
print(f"\n{r.count} eigenvalues in (0.95, 1.05), max residual {r.residuals.max():.1e}")
print(f"angle to span(psi1, psi2): {r.angle:.2f} deg")
print("Rayleigh-Ritz values of the projected pair:", np.round(r.ritz_values, 5))

free = eigen_solve(pkg, GridSpec(20, 0.1), window=(0.9, 1.1), free=True)
print(f"\nwithout the potential: {free.count} box modes, angle {free.angle:.1f} deg")
