import time
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import strategies as st

from moutard2d.helmholtz import builtin_omega1, builtin_omega2
from moutard2d.moutard import builtin_example
from moutard2d.positivity import certify
from moutard2d.trigring import (COS, NONE, SIN, X, Y, RingElement, Term, cos_x,
                                cos_y, sin_x, sin_y)

SX, SY = sp.symbols("x y", real=True)

ACCEPTANCE = []


def record_acceptance(number, title, passed, detail=""):
    ACCEPTANCE.append((number, title, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}  {detail}")


def to_sympy(elem: RingElement):
    """Independent symbolic image of a ring element."""
    def trig(t, v):
        kind, n = t
        if kind == NONE:
            return sp.Integer(1)
        return (sp.cos if kind == COS else sp.sin)(n * v)

    return sp.Add(*[sp.Rational(t.coeff.numerator, t.coeff.denominator) * SX**t.xdeg * SY**t.ydeg
                    * trig(t.xtrig, SX) * trig(t.ytrig, SY) for t in elem.terms()])


def printed_Q(C):
    """Q exactly as printed, typed term by term (sin^2 reduced by the ring)."""
    sx, cx, sy, cy = sin_x(), cos_x(), sin_y(), cos_y()
    return (-X**4 - Y**4 - 4 * X**2 * Y * sx * sy + X**2 * (-8 * cy * sx - 2 * sy * sy - 1)
            + 4 * X * Y**2 * cx * cy - 16 * X * Y * cx * sy + 2 * X * cx * (-8 * cy - sx)
            + Y**2 * (-8 * cy * sx + 2 * sx * sx - 3) + 2 * Y * sy * (cy + 8 * sx)
            + 16 * cy * sx + sx * sx - sy * sy + 4 * Fraction(C) + 1)


trig_factor = st.one_of(
    st.just((NONE, 0)),
    st.tuples(st.sampled_from([SIN, COS]), st.integers(1, 3)),
)
terms = st.builds(
    Term,
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    st.integers(0, 3),
    st.integers(0, 3),
    trig_factor,
    trig_factor,
)
elements = st.lists(terms, max_size=5).map(RingElement.from_terms)


@pytest.fixture(scope="session")
def omega1():
    return builtin_omega1()


@pytest.fixture(scope="session")
def omega2():
    return builtin_omega2()


@pytest.fixture(scope="session")
def spectral_C():
    # threshold C* = -2 (see test_positivity); the spectral runs use C* - 10
    return -12


@pytest.fixture(scope="session")
def spectral_pkg(spectral_C):
    return builtin_example(spectral_C)


@pytest.fixture(scope="session")
def spectral_cert(spectral_pkg):
    cert = certify(spectral_pkg.Q, spectral_pkg.C)
    assert cert.certified
    return cert


@pytest.fixture(scope="session")
def eigen_L30(spectral_pkg, spectral_cert):
    from moutard2d.spectral import GridSpec, eigen_solve

    t0 = time.perf_counter()
    res = eigen_solve(spectral_pkg, GridSpec(30, 0.1), certificate=spectral_cert)
    return res, time.perf_counter() - t0
