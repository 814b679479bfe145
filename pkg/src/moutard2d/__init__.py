"""Two-dimensional Schrodinger potentials with a double embedded eigenvalue.

The potentials come from two Moutard transformations of ``-Lap - k**2``.
Exact constructions live in :mod:`moutard2d.trigring`,
:mod:`moutard2d.helmholtz` and :mod:`moutard2d.moutard`; the zero-freeness
certificate in :mod:`moutard2d.positivity`; numerical checks in
:mod:`moutard2d.spectral`.
"""
from .helmholtz import (FamilyParams, NumericSolution, builtin_omega1,
                        builtin_omega2, family_exact, family_numeric,
                        linear_combination, verify_helmholtz)
from .moutard import (PotentialPackage, closedness_residual, double_potential,
                      builtin_example, single_moutard_potential, theta_exact,
                      theta_numeric, verify_eigen_identity)
from .positivity import PositivityCertificate, certify, threshold_C
from .trigring import (X, Y, RationalField, RingElement, cos_x, cos_y,
                       envelope, is_zero, sin_x, sin_y)

__version__ = "0.1.0"
