"""Moutard transformations of ``H = -Lap + U`` and their double iteration.

For zero modes ``omega``, ``phi`` of ``H`` the function ``Q = omega * theta``
is fixed up to an additive constant by

    Q_x = -(omega phi_y - phi omega_y),     Q_y = omega phi_x - phi omega_x.

The one-form on the right is closed exactly when
``omega Lap(phi) - phi Lap(omega) = 0``.  ``Q`` is built along the hook
``(0, 0) -> (x, 0) -> (x, y)``, so ``Q(0, 0)`` equals the additive constant
``kappa``.  Twice-transformed potentials are carried as the exact pair
``(P, Q)`` with ``U_hat = P / Q**2 = -2 Lap(log Q)``.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import ConsistencyError, PathDependenceError, QuadratureError
from .helmholtz import NumericSolution, builtin_omega1, builtin_omega2
from .trigring import RationalField, RingElement

QUAD_TOL = 1e-10
PATH_TOL = 1e-8


def kappa_from_C(C):
    """Additive constant of Q matching the printed ``... + 4C + 1``."""
    return 4 * Fraction(C) + 1


def C_from_kappa(kappa):
    return (Fraction(kappa) - 1) / 4


def one_form(omega: RingElement, phi: RingElement):
    """Exact components ``(Q_x, Q_y)`` of the transport one-form."""
    qx = -(omega * phi.diff_y() - phi * omega.diff_y())
    qy = omega * phi.diff_x() - phi * omega.diff_x()
    return qx, qy


def closedness_residual(omega, phi, grid=None):
    """``omega Lap(phi) - phi Lap(omega)``: exact element, or its sup on ``grid``.

    For numeric solutions ``grid`` is a pair of coordinate arrays; when
    omitted a 41x41 grid on [-10, 10]^2 is used.
    """
    if isinstance(omega, RingElement) and isinstance(phi, RingElement):
        return omega * phi.laplacian() - phi * omega.laplacian()
    if grid is None:
        g = np.linspace(-10, 10, 41)
        grid = np.meshgrid(g, g)
    gx, gy = grid
    w, p = omega.derivatives(gx, gy), phi.derivatives(gx, gy)
    res = w[0] * (p[3] + p[5]) - p[0] * (w[3] + w[5])
    return float(np.max(np.abs(res)))


@dataclass
class ThetaSolution:
    """``Q = omega * theta`` for one choice of the integration constant."""

    Q: RingElement
    omega: RingElement
    phi: RingElement
    kappa: Fraction

    @property
    def theta(self) -> RationalField:
        return RationalField(self.Q, self.omega)

    def check(self):
        qx, qy = one_form(self.omega, self.phi)
        return (self.Q.diff_x() - qx).is_zero() and (self.Q.diff_y() - qy).is_zero()


def theta_exact(omega: RingElement, phi: RingElement, kappa=0) -> ThetaSolution:
    """Solve the transport system exactly, with ``Q(0, 0) = kappa``.

    Raises
    ------
    ConsistencyError
        If the one-form is not closed (``omega`` and ``phi`` are not zero
        modes of a common operator).
    """
    if not closedness_residual(omega, phi).is_zero():
        raise ConsistencyError("omega*Lap(phi) - phi*Lap(omega) is not identically zero")
    qx, qy = one_form(omega, phi)
    Q = qx.at_y0().integrate_x() + qy.integrate_y() + Fraction(kappa)
    sol = ThetaSolution(Q, omega, phi, Fraction(kappa))
    if not sol.check():
        raise ConsistencyError("integrated Q does not reproduce the one-form")
    return sol


def _quad(f, a, b):
    """Adaptive Gauss-Kronrod; the absolute target is scaled by the integrand's
    L1 size, since 1e-10 absolute is below roundoff for large integrands."""
    if a == b:
        return 0.0
    val, err = integrate.quad(f, a, b, epsabs=QUAD_TOL, epsrel=1e-13, limit=400)
    if err > QUAD_TOL:
        l1, _ = integrate.quad(lambda s: abs(f(s)), a, b, epsabs=QUAD_TOL, epsrel=1e-6, limit=400)
        if err > QUAD_TOL * max(1.0, abs(l1)):
            raise QuadratureError(f"quadrature on [{a}, {b}] reached error {err:.2e} "
                                  f"> {QUAD_TOL:.0e} * max(1, {abs(l1):.2e})")
    return val


def _form_numeric(omega: NumericSolution, phi: NumericSolution):
    def qx(x, y):
        w, p = omega.derivatives(x, y), phi.derivatives(x, y)
        return -(w[0] * p[2] - p[0] * w[2])

    def qy(x, y):
        w, p = omega.derivatives(x, y), phi.derivatives(x, y)
        return w[0] * p[1] - p[0] * w[1]

    return qx, qy


def _path_integral(qx, qy, start, end, x_first):
    (x0, y0), (x1, y1) = start, end
    if x_first:
        return (_quad(lambda s: float(qx(s, y0)), x0, x1)
                + _quad(lambda t: float(qy(x1, t)), y0, y1))
    return (_quad(lambda t: float(qy(x0, t)), y0, y1)
            + _quad(lambda s: float(qx(s, y1)), x0, x1))


def theta_numeric(omega: NumericSolution, phi: NumericSolution, kappa, point, check_path=True):
    """``Q(point)`` by adaptive quadrature of the one-form from the origin.

    The primary route is ``(0,0) -> (x,0) -> (x,y)``; with ``check_path`` the
    value is compared with the route through ``(0, y)``.
    """
    x, y = map(float, point)
    g = np.linspace(min(0.0, x), max(0.0, x), 11)
    h = np.linspace(min(0.0, y), max(0.0, y), 11)
    gx, gy = np.meshgrid(g, h)
    scale = max(1.0, float(np.max(np.abs(omega(gx, gy)) * np.abs(phi(gx, gy)))))
    closed = closedness_residual(omega, phi, (gx, gy))
    if closed > 1e-10 * scale:
        raise ConsistencyError(f"closedness residual {closed:.3e} on the bounding box")
    qx, qy = _form_numeric(omega, phi)
    a = _path_integral(qx, qy, (0.0, 0.0), (x, y), x_first=True)
    if check_path:
        b = _path_integral(qx, qy, (0.0, 0.0), (x, y), x_first=False)
        if abs(a - b) > PATH_TOL:
            raise PathDependenceError(f"paths differ by {abs(a - b):.3e} at {point}")
    return float(kappa) + a


def loop_integral(omega: NumericSolution, phi: NumericSolution, corner0, corner1):
    """Circulation of the one-form around an axis-aligned rectangle."""
    qx, qy = _form_numeric(omega, phi)
    (x0, y0), (x1, y1) = corner0, corner1
    return (_quad(lambda s: float(qx(s, y0)), x0, x1)
            + _quad(lambda t: float(qy(x1, t)), y0, y1)
            - _quad(lambda s: float(qx(s, y1)), x0, x1)
            - _quad(lambda t: float(qy(x0, t)), y0, y1))


def log_laplacian_numerator(w: RingElement) -> RingElement:
    """``w Lap(w) - |grad w|^2``, so that ``Lap(log w) = result / w**2``."""
    return w * w.laplacian() - w.diff_x() ** 2 - w.diff_y() ** 2


def single_moutard_potential(U, omega: RingElement) -> RationalField:
    """``U - 2 Lap(log omega)`` for a constant background ``U``."""
    U = Fraction(U)
    num = omega * omega * U - 2 * log_laplacian_numerator(omega)
    return RationalField(num, omega * omega)


def potential_numerator(Q: RingElement) -> RingElement:
    """``P = -2 (Q Lap(Q) - Q_x^2 - Q_y^2)``."""
    return -2 * log_laplacian_numerator(Q)


@dataclass
class PotentialPackage:
    """The potential ``U_hat = P / Q**2`` with its two eigenfunctions ``omega_i / Q``.

    ``background`` is the constant potential ``-k**2`` that was transformed;
    ``U_hat`` is the change of potential, so ``-Lap + U_hat`` has the
    eigenvalue ``energy = k**2``.
    """

    Q: RingElement
    P: RingElement
    C: Fraction
    psi1_num: RingElement
    psi2_num: RingElement
    k: Fraction = Fraction(1)
    energy: Fraction = Fraction(1)
    background: Fraction = Fraction(-1)
    meta: dict = field(default_factory=dict)

    @property
    def kappa(self):
        return self.Q.value_at_origin()

    @property
    def potential(self) -> RationalField:
        return RationalField(self.P, self.Q * self.Q)

    @property
    def psi1(self) -> RationalField:
        return RationalField(self.psi1_num, self.Q)

    @property
    def psi2(self) -> RationalField:
        return RationalField(self.psi2_num, self.Q)

    def with_C(self, C):
        """Same construction with another integration constant."""
        return double_potential(self.psi1_num, self.psi2_num, C)

    def to_json(self):
        return {
            "C": f"{Fraction(self.C).numerator}/{Fraction(self.C).denominator}",
            "E": str(self.energy),
            "k": str(self.k),
            "U": str(self.background),
            "Q": self.Q.to_json(),
            "P": self.P.to_json(),
            "omega1": self.psi1_num.to_json(),
            "omega2": self.psi2_num.to_json(),
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            Q=RingElement.from_json(data["Q"]),
            P=RingElement.from_json(data["P"]),
            C=Fraction(data["C"]),
            psi1_num=RingElement.from_json(data["omega1"]),
            psi2_num=RingElement.from_json(data["omega2"]),
            k=Fraction(data.get("k", "1")),
            energy=Fraction(data.get("E", "1")),
            background=Fraction(data.get("U", "-1")),
            meta=data.get("meta", {}),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def sample(self, xs, ys):
        gx, gy = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float))
        q = self.Q.evaluator()(gx, gy)
        return (gx, gy, self.P.evaluator()(gx, gy) / q**2,
                self.psi1_num.evaluator()(gx, gy) / q, self.psi2_num.evaluator()(gx, gy) / q)

    def write_csv(self, path, xs, ys):
        gx, gy, u, p1, p2 = self.sample(xs, ys)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "U_hat", "psi1", "psi2"])
            for row in zip(gx.ravel(), gy.ravel(), u.ravel(), p1.ravel(), p2.ravel()):
                w.writerow([repr(float(v)) for v in row])


def double_potential(omega1: RingElement, omega2: RingElement, C=0, k=1) -> PotentialPackage:
    """Double Moutard iteration of ``-Lap - k**2`` by ``omega1`` then ``theta1``.

    ``Q = omega1 * theta1`` with ``Q(0,0) = 4C + 1``; ``P = -2(Q Lap Q - |grad Q|^2)``.
    """
    C = Fraction(C)
    sol = theta_exact(omega1, omega2, kappa_from_C(C))
    Q = sol.Q
    P = potential_numerator(Q)
    k = Fraction(k)
    return PotentialPackage(Q, P, C, omega1, omega2, k=k, energy=k * k, background=-k * k)


def builtin_example(C=0) -> PotentialPackage:
    """The explicit two-parameter-free example built from the builtin omegas."""
    return double_potential(builtin_omega1(), builtin_omega2(), C)


def eigen_residual(pkg: PotentialPackage, omega: RingElement) -> RingElement:
    """``Q**3 * ((-Lap + U_hat - E) (omega / Q))`` as an exact element."""
    Q = pkg.Q
    qx, qy = Q.diff_x(), Q.diff_y()
    wx, wy = omega.diff_x(), omega.diff_y()
    lap_q = Q.laplacian()
    lap_psi_num = (omega.laplacian() * Q * Q - 2 * (wx * qx + wy * qy) * Q
                   - omega * lap_q * Q + 2 * omega * (qx * qx + qy * qy))
    return -lap_psi_num + pkg.P * omega - omega * Q * Q * pkg.energy


def verify_eigen_identity(pkg: PotentialPackage) -> dict:
    """Exact check of ``(-Lap + U_hat) psi_i = E psi_i`` for both eigenfunctions."""
    return {
        "psi1": eigen_residual(pkg, pkg.psi1_num).is_zero(),
        "psi2": eigen_residual(pkg, pkg.psi2_num).is_zero(),
    }


def identity_suite(pkg: PotentialPackage) -> list:
    """All exact identities of a package as ``[(name, passed)]``."""
    w1, w2, Q = pkg.psi1_num, pkg.psi2_num, pkg.Q
    E = pkg.energy
    qx, qy = one_form(w1, w2)
    out = [
        ("helmholtz omega1", (w1.laplacian() + w1 * E).is_zero()),
        ("helmholtz omega2", (w2.laplacian() + w2 * E).is_zero()),
        ("closedness", closedness_residual(w1, w2).is_zero()),
        ("transport Q_x", (Q.diff_x() - qx).is_zero()),
        ("transport Q_y", (Q.diff_y() - qy).is_zero()),
        ("P = -2(Q Lap Q - |grad Q|^2)", (pkg.P - potential_numerator(Q)).is_zero()),
    ]
    eig = verify_eigen_identity(pkg)
    out.append(("eigen psi1", eig["psi1"]))
    out.append(("eigen psi2", eig["psi2"]))
    return out


