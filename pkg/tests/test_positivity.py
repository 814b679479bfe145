import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import optimize

from moutard2d.errors import InconclusiveError, LeadingPartError
from moutard2d.positivity import (certify, inner_certificate, outer_bound,
                                  random_probe, threshold_C)
from moutard2d.trigring import X, Y, envelope, sin_x

from conftest import printed_Q


@pytest.fixture(scope="module")
def threshold():
    return threshold_C(printed_Q)


def test_outer_bound_C_minus_10():
    Q = printed_Q(-10)
    R0, margin = outer_bound(Q, -10)
    assert math.isfinite(R0) and margin < 0
    # independent numeric look outside the box: Q on a ring of squares
    t = np.linspace(-3 * R0, 3 * R0, 601)
    for s in (R0, 1.5 * R0, 3 * R0):
        for gx, gy in ((t, np.full_like(t, s)), (np.full_like(t, s), t),
                       (t, np.full_like(t, -s)), (np.full_like(t, -s), t)):
            assert Q.evaluator()(gx, gy).max() < margin + 1e-6


def test_outer_bound_rejects_wrong_leading_part():
    with pytest.raises(LeadingPartError):
        outer_bound(X**4 + Y**4 - 1)
    with pytest.raises(LeadingPartError):
        outer_bound(-X**4 - 2 * Y**4)
    with pytest.raises(LeadingPartError):
        outer_bound(-X**4 - Y**4 + X**5 * sin_x())


def test_outer_radius_monotone():
    radii = [outer_bound(printed_Q(C))[0] for C in (-10, -100, -1000)]
    assert radii[0] >= radii[1] >= radii[2]


def test_C0_fails_with_witness():
    Q = printed_Q(0)
    cert = certify(Q, 0)
    assert cert.verdict == "failed"
    x, y = cert.witness
    assert Q.eval(x, y) >= 0
    assert cert.witness_value == pytest.approx(Q.eval(x, y))
    # reproducible
    assert certify(Q, 0).witness == cert.witness


def test_threshold(threshold):
    assert threshold.C_star <= -1
    assert threshold.C_star == -2
    assert threshold.certified.certified
    assert not threshold.failed.certified
    assert threshold.monotone
    assert threshold.certified.inner_margin < 0 and threshold.certified.outer_margin < 0


def test_threshold_matches_continuous_maximum():
    """C* from an independent optimizer of max Q at C = 0."""
    f = printed_Q(0).evaluator()
    best = -np.inf
    starts = np.random.default_rng(0).uniform(-6, 6, size=(200, 2))
    for s in starts:
        r = optimize.minimize(lambda p: -f(p[0], p[1]), s, method="Nelder-Mead",
                              options={"xatol": 1e-10, "fatol": 1e-12})
        best = max(best, -r.fun)
    # Q(C) = Q(0) + 4C; the largest integer C with max Q(C) < 0
    assert math.floor(-best / 4 - 1e-12) == -2
    assert best == pytest.approx(4.4066, abs=1e-3)


def test_below_threshold_certified(threshold):
    for C in (threshold.C_star - 1, threshold.C_star - 10):
        assert certify(printed_Q(C), C).certified


def test_revalidate(threshold):
    cert = threshold.certified
    again = cert.revalidate(printed_Q(cert.C))
    assert again == cert.inner_margin
    assert again < 0
    # cells tile the box
    area = float(np.sum((2 * cert.leaves[:, 2]) ** 2))
    assert area == pytest.approx((2 * cert.R0) ** 2, rel=1e-12)


def test_random_probe(threshold):
    C = threshold.C_star
    cert = threshold.certified
    assert random_probe(printed_Q(C), 1.5 * cert.R0, n=10**6, seed=0) < 0


def test_failure_honesty():
    for C in (0, -1):
        cert = certify(printed_Q(C), C)
        assert not cert.certified
        assert printed_Q(C).eval(*cert.witness) >= -cert.lipschitz * cert.spacing


def test_inconclusive():
    # negative everywhere, but with a margin far below the resolvable scale
    Q = -X**4 - Y**4 - X**2 - Y**2 - Fraction(1, 10**12)
    with pytest.raises(InconclusiveError) as err:
        inner_certificate(Q, 0, 2.0, min_spacing=1e-2)
    assert err.value.point is not None
    cert = certify(Q, 0, min_spacing=1e-2)
    assert cert.verdict == "inconclusive" and not cert.certified
    # a touching zero is a genuine witness, not an inconclusive run
    assert certify(Q + Fraction(1, 10**12), 0).verdict == "failed"


def test_certificate_json(threshold, tmp_path):
    cert = threshold.certified
    cert.save(tmp_path / "c.json")
    data = json.loads((tmp_path / "c.json").read_text())
    assert data["verdict"] == "certified"
    assert Fraction(data["C"]) == threshold.C_star
    assert len(data["cell_list"]) == data["cells"] == len(cert.leaves)


def test_lipschitz_bound_dominates_gradient(threshold):
    Q = printed_Q(threshold.C_star)
    R0 = threshold.certified.R0
    gx, gy = Q.diff_x().evaluator(), Q.diff_y().evaluator()
    x, y = np.random.default_rng(1).uniform(-R0, R0, size=(2, 10000))
    assert np.max(np.hypot(gx(x, y), gy(x, y))) <= threshold.certified.lipschitz
    assert threshold.certified.lipschitz == pytest.approx(
        float(envelope(Q.diff_x())(R0, R0) + envelope(Q.diff_y())(R0, R0)))
