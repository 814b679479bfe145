"""Numerical corroboration of the embedded eigenvalue and of the decay rates.

The operator ``-Lap + U_hat`` is discretized with the five-point Laplacian on
a uniform grid over ``[-L, L]^2`` with Dirichlet walls.  E = 1 lies inside
the continuous spectrum, so the truncated problem has many box modes near
E.  True eigenfunctions are identified by the principal angles between the
sampled ``span{psi1, psi2}`` and the spectral subspace of an energy window,
not by eigenvalue position alone.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.polynomial.legendre import leggauss

from .errors import CertificateMissing, SolverStagnation

SOLVE_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid on ``[-L, L]^2`` with Dirichlet boundary."""

    half_width: float
    spacing: float

    def __post_init__(self):
        ratio = self.half_width / self.spacing
        if self.half_width <= 0 or self.spacing <= 0:
            raise ValueError("half_width and spacing must be positive")
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"L/h = {ratio} is not an integer")

    @property
    def cells(self):
        return 2 * round(self.half_width / self.spacing)

    def nodes(self):
        return np.linspace(-self.half_width, self.half_width, self.cells + 1)

    def interior(self):
        return self.nodes()[1:-1]


def require_certificate(pkg, certificate):
    if certificate is None:
        raise CertificateMissing(f"no positivity certificate supplied for C = {pkg.C}")
    if certificate.C != pkg.C:
        raise CertificateMissing(f"certificate is for C = {certificate.C}, package has C = {pkg.C}")
    if not certificate.certified:
        raise CertificateMissing(f"certificate for C = {pkg.C} is {certificate.verdict}")


def sample_fields(pkg, xs, ys=None):
    """``(X, Y, U_hat, psi1, psi2)`` on the tensor grid ``xs x ys`` ('ij' indexing)."""
    ys = xs if ys is None else ys
    gx, gy = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), indexing="ij")
    q = pkg.Q.evaluator()(gx, gy)
    u = pkg.P.evaluator()(gx, gy) / (q * q)
    return gx, gy, u, pkg.psi1_num.evaluator()(gx, gy) / q, pkg.psi2_num.evaluator()(gx, gy) / q


def _five_point(f, h):
    return (f[2:, 1:-1] + f[:-2, 1:-1] + f[1:-1, 2:] + f[1:-1, :-2] - 4 * f[1:-1, 1:-1]) / h**2


def residual_check(pkg, grid: GridSpec, certificate=None, potential=None):
    """``max_i || (-Lap_h + U_hat - E) psi_i ||_inf`` over interior nodes.

    ``potential`` overrides the sampled ``U_hat`` (a scalar or an array on the
    full grid); used for control runs.
    """
    require_certificate(pkg, certificate)
    _, _, u, p1, p2 = sample_fields(pkg, grid.nodes())
    if potential is not None:
        u = np.broadcast_to(np.asarray(potential, float), u.shape)
    E = float(pkg.energy)
    h = grid.spacing
    out = 0.0
    for psi in (p1, p2):
        res = -_five_point(psi, h) + (u[1:-1, 1:-1] - E) * psi[1:-1, 1:-1]
        out = max(out, float(np.max(np.abs(res))))
    return out


def residual_orders(pkg, half_width, spacings, certificate=None):
    """Residuals on successively refined grids and the observed orders."""
    res = [residual_check(pkg, GridSpec(half_width, h), certificate) for h in spacings]
    orders = [math.log(res[i] / res[i + 1]) / math.log(spacings[i] / spacings[i + 1])
              for i in range(len(res) - 1)]
    return res, orders


def assemble_operator(u_interior, h):
    """Sparse symmetric ``-Lap_h + diag(u)`` on the interior nodes (Dirichlet)."""
    n = u_interior.shape[0]
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    T = sp.diags([off, main, off], [-1, 0, 1], format="csr")
    I = sp.identity(n, format="csr")
    return (sp.kron(T, I) + sp.kron(I, T) + sp.diags(u_interior.ravel())).tocsc()


class ShiftInvert:
    """``(A - sigma I)^{-1}`` by sparse LU, checked against ``SOLVE_TOL``."""

    def __init__(self, A, sigma, solve_tol=SOLVE_TOL, seed=0):
        M = (A - sigma * sp.identity(A.shape[0], format="csc")).tocsc()
        try:
            self.lu = spla.splu(M, permc_spec="MMD_AT_PLUS_A")
        except RuntimeError as exc:
            raise SolverStagnation(f"factorization failed: {exc}") from exc
        b = np.random.default_rng(seed).standard_normal(A.shape[0])
        x = self.lu.solve(b)
        self.solve_residual = float(np.linalg.norm(M @ x - b) / np.linalg.norm(b))
        if not self.solve_residual <= solve_tol:
            raise SolverStagnation(f"shift-invert solve residual {self.solve_residual:.2e} > {solve_tol:.0e}")
        self.operator = spla.LinearOperator(A.shape, matvec=self.lu.solve, dtype=float)


def subspace_angle(A, B):
    """Largest principal angle in degrees between the column spans of A and B."""
    if B.shape[1] == 0:
        return 90.0
    return float(np.degrees(np.max(sla.subspace_angles(A, B))))


@dataclass
class EigenResult:
    """Eigenpairs of the truncated operator inside an energy window."""

    window: tuple
    eigenvalues: np.ndarray
    residuals: np.ndarray
    angle: float                 # window eigenspace vs span{psi1, psi2}, degrees
    capture_size: int            # fewest eigenvectors whose span is within the angle gate
    capture_angle: float
    ritz_values: np.ndarray      # span{psi} projected on the window, Rayleigh-Ritz
    solve_residual: float
    n_computed: int
    vectors: np.ndarray = field(repr=False, default=None)

    @property
    def count(self):
        return int(len(self.eigenvalues))

    def to_json(self):
        return {
            "window": list(self.window),
            "eigenvalues": self.eigenvalues.tolist(),
            "residuals": self.residuals.tolist(),
            "subspace_angle_deg": self.angle,
            "capture_size": self.capture_size,
            "capture_angle_deg": self.capture_angle,
            "ritz_values": self.ritz_values.tolist(),
            "solve_residual": self.solve_residual,
            "n_computed": self.n_computed,
        }


def eigen_solve(pkg, grid: GridSpec, window=(0.95, 1.05), tol=1e-10, certificate=None,
                free=False, angle_gate=5.0, solve_tol=SOLVE_TOL):
    """All eigenpairs of ``-Lap_h + U_hat`` with eigenvalue in ``window``.

    Shift-invert Lanczos (ARPACK) around the window center; the number of
    requested pairs grows until the returned spectrum straddles the window.
    With ``free=True`` the potential is dropped (control experiment).
    """
    if not free:
        require_certificate(pkg, certificate)
    lo, hi = window
    xs = grid.interior()
    _, _, u, p1, p2 = sample_fields(pkg, xs)
    if free:
        u = np.zeros_like(u)
    A = assemble_operator(u, grid.spacing)
    n = A.shape[0]
    sigma = 0.5 * (lo + hi)
    shift = ShiftInvert(A, sigma, solve_tol)

    # Weyl count of box modes in the window, with slack
    weyl = (2 * grid.half_width) ** 2 * (hi - lo) / (4 * math.pi)
    k = min(n - 2, int(1.5 * weyl) + 16)
    v0 = np.random.default_rng(0).standard_normal(n)
    while True:
        try:
            vals, vecs = spla.eigsh(A, k=k, sigma=sigma, OPinv=shift.operator, tol=tol, v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise SolverStagnation(f"ARPACK did not converge: {exc}") from exc
        if (vals.min() < lo and vals.max() > hi) or k >= n - 2:
            break
        k = min(n - 2, 2 * k)
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    sel = (vals > lo) & (vals < hi)
    V = vecs[:, sel]
    mu = vals[sel]
    res = np.linalg.norm(A @ V - V * mu, axis=0) / np.linalg.norm(V, axis=0)

    Psi = np.column_stack([p1.ravel(), p2.ravel()])
    angle = subspace_angle(Psi, V)

    # smallest set of eigenvectors (by overlap with span{psi}) within the gate
    Qpsi, _ = np.linalg.qr(Psi)
    overlap = np.linalg.norm(V.T @ Qpsi, axis=1)
    rank = np.argsort(-overlap)
    capture, cap_angle = V.shape[1], angle
    for m in range(2, V.shape[1] + 1):
        a = subspace_angle(Psi, V[:, rank[:m]])
        if a < angle_gate:
            capture, cap_angle = m, a
            break

    ritz = np.array([])
    if V.shape[1] >= 2:
        W = V @ (V.T @ Qpsi)
        ritz = sla.eigh(W.T @ (A @ W), W.T @ W, eigvals_only=True)
    return EigenResult((lo, hi), mu, res, angle, capture, cap_angle, ritz,
                       shift.solve_residual, int(len(vals)), V)


# -- decay and L2 membership -----------------------------------------------------

def decay_profile(f, radii, exponent, n_angles=720):
    """``sup_theta r**exponent |f(r cos theta, r sin theta)|`` for each radius."""
    radii = np.asarray(radii, float)
    if np.any(radii < 10):
        raise ValueError("decay profiles need radii >= 10")
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    out = []
    for r in radii:
        vals = f(r * np.cos(theta), r * np.sin(theta))
        out.append(float(r**exponent * np.max(np.abs(vals))))
    return np.array(out)


def variation_factor(profile):
    return float(np.max(profile) / np.min(profile))


@dataclass
class DecayTable:
    radii: np.ndarray
    rows: dict          # name -> (exponent, normalized sups)

    def bounded(self, factor=3.0):
        return {name: variation_factor(v) <= factor for name, (_, v) in self.rows.items()}

    def to_json(self):
        return {"radii": self.radii.tolist(),
                "profiles": {name: {"exponent": e, "values": v.tolist(),
                                    "variation": variation_factor(v)}
                             for name, (e, v) in self.rows.items()}}

    def write_csv(self, path):
        names = list(self.rows)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r"] + [f"r^{self.rows[n][0]}*|{n}|" for n in names])
            for i, r in enumerate(self.radii):
                w.writerow([repr(float(r))] + [repr(float(self.rows[n][1][i])) for n in names])


def decay_report(pkg, radii=(50, 100, 200, 400), n_angles=720, extra=1):
    """Normalized sups of ``U_hat``, ``psi1``, ``psi2`` at exponents 1, 2, 3.

    With ``extra`` the same profiles are added with exponent + ``extra``
    (names suffixed ``+``); those should grow.
    """
    fields = {"U_hat": (pkg.potential, 1), "psi1": (pkg.psi1, 2), "psi2": (pkg.psi2, 3)}
    rows = {}
    for name, (f, e) in fields.items():
        rows[name] = (e, decay_profile(f, radii, e, n_angles))
        if extra:
            rows[name + "+"] = (e + extra, rows[name][1] * np.asarray(radii, float) ** extra)
    return DecayTable(np.asarray(radii, float), rows)


def _gauss_panels(a, b, width=1.0, order=8):
    n = max(1, math.ceil((b - a) / width))
    t, w = leggauss(order)
    edges = np.linspace(a, b, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * t).ravel(), (half * w).ravel()


def annulus_mass(f, r0, r1, n_angles=None):
    """``int_{r0 <= r <= r1} f^2`` in polar coordinates (Gauss-Legendre x trapezoid)."""
    r, wr = _gauss_panels(r0, r1)
    n_angles = n_angles or max(720, int(16 * r1))
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    total = 0.0
    for i in range(0, len(r), 64):
        rr = r[i:i + 64, None]
        vals = f(rr * np.cos(theta), rr * np.sin(theta))
        total += float(np.sum(wr[i:i + 64, None] * rr * vals**2)) * (2 * np.pi / n_angles)
    return total


def l2_tail(psi, R_list):
    """Masses of ``psi`` on annuli ``R <= r <= 2R`` and consecutive ratios."""
    masses = np.array([annulus_mass(psi, R, 2 * R) for R in R_list])
    return masses, masses[1:] / masses[:-1]


def square_inner(f, g, half_width, chunk=128):
    """``int_{[-L, L]^2} f g`` with tensor Gauss-Legendre panels of width 1."""
    x, w = _gauss_panels(-half_width, half_width)
    total = 0.0
    for i in range(0, len(x), chunk):
        gx, gy = np.meshgrid(x[i:i + chunk], x, indexing="ij")
        ww = np.outer(w[i:i + chunk], w)
        fv = f(gx, gy)
        gv = fv if g is f else g(gx, gy)
        total += float(np.sum(ww * fv * gv))
    return total


def l2_norm_sq(psi, half_width):
    return square_inner(psi, psi, half_width)


def gram_matrix(psi1, psi2, half_width):
    """``(G, G_normalized)`` for the two functions over ``[-L, L]^2``."""
    g11 = square_inner(psi1, psi1, half_width)
    g22 = square_inner(psi2, psi2, half_width)
    g12 = square_inner(psi1, psi2, half_width)
    G = np.array([[g11, g12], [g12, g22]])
    d = 1 / np.sqrt(np.diag(G))
    return G, G * np.outer(d, d)


@dataclass
class SpectralReport:
    C: str
    eigen: EigenResult | None = None
    residuals: list = field(default_factory=list)
    spacings: list = field(default_factory=list)
    orders: list = field(default_factory=list)
    decay: DecayTable | None = None
    tails: dict = field(default_factory=dict)

    def to_json(self):
        out = {"C": self.C}
        if self.eigen is not None:
            out["eigen"] = self.eigen.to_json()
        if self.residuals:
            out["residual_convergence"] = {"spacings": self.spacings, "residuals": self.residuals,
                                           "orders": self.orders}
        if self.decay is not None:
            out["decay"] = self.decay.to_json()
        if self.tails:
            out["l2_tails"] = self.tails
        return out


def write_field_csv(path, xs, ys, values):
    """Dump a sampled field as ``x, y, value`` rows."""
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for row in zip(gx.ravel(), gy.ravel(), np.asarray(values).ravel()):
            w.writerow([repr(float(v)) for v in row])
