import json

import numpy as np
import pytest
from scipy import integrate

from moutard2d.errors import CertificateMissing, SolverStagnation
from moutard2d.moutard import builtin_example
from moutard2d.positivity import certify
from moutard2d.spectral import (GridSpec, ShiftInvert, annulus_mass,
                                assemble_operator, decay_profile, decay_report,
                                eigen_solve, gram_matrix, l2_norm_sq, l2_tail,
                                residual_check, residual_orders, sample_fields,
                                square_inner, subspace_angle, variation_factor)

RADII = (50, 100, 200, 400)


def test_grid_spec():
    g = GridSpec(2.0, 0.5)
    assert g.cells == 8
    assert g.nodes()[0] == -2.0 and g.nodes()[-1] == 2.0
    assert len(g.interior()) == 7
    with pytest.raises(ValueError):
        GridSpec(20, 0.15)
    with pytest.raises(ValueError):
        GridSpec(-1, 0.1)


def test_certificate_required(spectral_pkg):
    with pytest.raises(CertificateMissing):
        residual_check(spectral_pkg, GridSpec(5, 0.5))
    with pytest.raises(CertificateMissing):
        residual_check(spectral_pkg, GridSpec(5, 0.5), certify(builtin_example(0).Q, 0))
    with pytest.raises(CertificateMissing):
        eigen_solve(spectral_pkg, GridSpec(5, 0.5), certificate=certify(builtin_example(-3).Q, -3))


def test_assembled_operator_matches_stencil():
    rng = np.random.default_rng(0)
    n, h = 6, 0.3
    u = rng.standard_normal((n, n))
    A = assemble_operator(u, h)
    assert abs(A - A.T).max() == 0
    f = rng.standard_normal((n, n))
    pad = np.pad(f, 1)
    lap = (pad[2:, 1:-1] + pad[:-2, 1:-1] + pad[1:-1, 2:] + pad[1:-1, :-2] - 4 * f) / h**2
    np.testing.assert_allclose((A @ f.ravel()).reshape(n, n), -lap + u * f, atol=1e-12)


def test_residual_orders(spectral_pkg, spectral_cert):
    res, orders = residual_orders(spectral_pkg, 20, [0.2, 0.1, 0.05], spectral_cert)
    assert all(1.6 <= p <= 2.4 for p in orders)
    assert all(3 <= a / b <= 5 for a, b in zip(res, res[1:]))
    # regression baseline for h = 0.05, L = 20, C = -12
    assert res[-1] == pytest.approx(3.98e-3, rel=0.02)


def test_residual_without_potential_is_order_one(spectral_pkg, spectral_cert):
    res = residual_check(spectral_pkg, GridSpec(20, 0.05), spectral_cert, potential=0.0)
    assert res > 0.1


def test_sample_fields_match_package(spectral_pkg):
    xs = np.array([-3.0, 0.5, 7.0])
    gx, gy, u, p1, p2 = sample_fields(spectral_pkg, xs)
    assert gx[2, 0] == 7.0 and gy[2, 0] == -3.0
    assert u[2, 0] == pytest.approx(spectral_pkg.potential(7.0, -3.0))
    assert p2[1, 2] == pytest.approx(spectral_pkg.psi2(0.5, 7.0))


def test_shift_invert_contract():
    A = assemble_operator(np.zeros((30, 30)), 0.1)
    si = ShiftInvert(A, 1.0)
    assert si.solve_residual <= 1e-8
    with pytest.raises(SolverStagnation):
        ShiftInvert(A, 1.0, solve_tol=1e-30)


def test_subspace_angle():
    e = np.eye(4)
    assert subspace_angle(e[:, :2], e[:, [1, 0]]) == pytest.approx(0.0, abs=1e-6)
    assert subspace_angle(e[:, :2], e[:, 2:]) == pytest.approx(90.0)
    B = np.column_stack([e[:, 0], np.cos(0.1) * e[:, 1] + np.sin(0.1) * e[:, 2]])
    assert subspace_angle(e[:, :2], B) == pytest.approx(np.degrees(0.1))


@pytest.mark.slow
def test_eigen_solve_L30(eigen_L30):
    res, _ = eigen_L30
    assert res.count >= 2
    assert np.all((res.eigenvalues > 0.95) & (res.eigenvalues < 1.05))
    assert res.angle < 5.0
    assert res.solve_residual <= 1e-8
    assert np.all(np.abs(res.ritz_values - 1) < 0.01)


@pytest.mark.slow
def test_eigen_residuals_recomputable(eigen_L30, spectral_pkg):
    res, _ = eigen_L30
    grid = GridSpec(30, 0.1)
    u = sample_fields(spectral_pkg, grid.interior())[2]
    A = assemble_operator(u, grid.spacing)
    V, mu = res.vectors, res.eigenvalues
    again = np.linalg.norm(A @ V - V * mu, axis=0) / np.linalg.norm(V, axis=0)
    assert np.all(again <= res.residuals * (1 + 1e-12) + 1e-14)
    assert np.max(again) < 1e-6


def test_free_operator_control(spectral_pkg):
    res = eigen_solve(spectral_pkg, GridSpec(20, 0.1), window=(0.9, 1.1), free=True)
    assert res.count > 0
    assert res.angle > 45.0


@pytest.mark.slow
def test_window_stability():
    """Ritz values of span{psi} approach 1 as L grows at fixed h * L."""
    pkg = builtin_example(-12)
    cert = certify(pkg.Q, pkg.C)
    dist = []
    for L, h in [(20, 0.2), (30, 2 / 15), (40, 0.1)]:
        r = eigen_solve(pkg, GridSpec(L, h), certificate=cert)
        assert r.count >= 2
        dist.append(np.abs(r.ritz_values - 1))
    dist = np.array(dist)
    assert np.all(np.diff(dist, axis=0) <= 1e-6)


def test_decay_profiles(spectral_pkg):
    table = decay_report(spectral_pkg, RADII)
    assert all(table.bounded(3.0)[n] for n in ("U_hat", "psi1", "psi2"))
    for n in ("U_hat+", "psi1+", "psi2+"):
        assert np.all(np.diff(table.rows[n][1]) > 0)
    # r |U_hat| does not tend to zero
    assert table.rows["U_hat"][1].min() > 1.0


def test_decay_cross_normalization(spectral_pkg):
    p = decay_profile(spectral_pkg.psi1, RADII, 3)
    ratios = p[1:] / p[:-1]
    np.testing.assert_allclose(ratios, 2.0, rtol=0.15)


def test_decay_profile_guard():
    with pytest.raises(ValueError):
        decay_profile(lambda x, y: x, [5.0], 1)
    assert variation_factor(np.array([1.0, 2.0, 1.5])) == 2.0


def test_annulus_mass_exact():
    # int_{10 <= r <= 20} r^-4 dA = pi (10^-2 - 20^-2)
    m = annulus_mass(lambda x, y: 1 / (x * x + y * y), 10, 20)
    assert m == pytest.approx(2 * np.pi * 0.5 * (1 / 100 - 1 / 400), rel=1e-10)


def test_l2_tails(spectral_pkg):
    m1, r1 = l2_tail(spectral_pkg.psi1, [25, 50, 100])
    m2, r2 = l2_tail(spectral_pkg.psi2, [25, 50, 100])
    assert np.all((r1 >= 1 / 8) & (r1 <= 1 / 2))
    assert np.all(r2 <= r1)


def test_square_quadrature_against_dblquad(spectral_pkg):
    f = spectral_pkg.psi1
    ref, _ = integrate.dblquad(lambda y, x: f(x, y) ** 2, -3, 3, -3, 3, epsabs=1e-11)
    assert l2_norm_sq(f, 3) == pytest.approx(ref, rel=1e-8)


def test_l2_cauchy(spectral_pkg):
    a = l2_norm_sq(spectral_pkg.psi1, 100)
    b = l2_norm_sq(spectral_pkg.psi1, 200)
    assert abs(b - a) / b < 0.05


def test_gram(spectral_pkg):
    G, Gn = gram_matrix(spectral_pkg.psi1, spectral_pkg.psi2, 50)
    assert np.linalg.det(Gn) > 0.01
    assert Gn[0, 0] == pytest.approx(1.0) and Gn[1, 1] == pytest.approx(1.0)
    assert G[0, 1] == G[1, 0]
    assert square_inner(spectral_pkg.psi1, spectral_pkg.psi2, 5) == pytest.approx(
        square_inner(spectral_pkg.psi2, spectral_pkg.psi1, 5), rel=1e-12)


def test_eigen_result_json(spectral_pkg):
    res = eigen_solve(spectral_pkg, GridSpec(10, 0.25), window=(0.8, 1.2), free=True)
    data = json.loads(json.dumps(res.to_json()))
    assert data["n_computed"] >= res.count
    assert len(data["eigenvalues"]) == len(data["residuals"]) == res.count
