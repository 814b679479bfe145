"""Solutions of the Helmholtz equation ``-Lap(w) = k**2 w``.

Two forms are provided:

* exact ring elements (k = 1 and lambda a fourth root of unity, so every
  exponent reduces to ``+-x`` or ``+-y``), and
* numeric oracles returning the value and all partial derivatives up to
  order two, for any real k and any unit-modulus lambda.

Both come from the plane-wave family

    part[ d^m/dlambda^m exp(i k/2 (lambda z + conj(z)/lambda)) ],  z = x + i y.

Writing the m-th derivative as ``g_m * exp(...)``, the prefactor obeys
``g_0 = 1`` and ``g_{j+1} = d g_j/dlambda + g_j * (i k/2)(z - conj(z)/lambda**2)``.
Each multiplication step raises the joint degree in ``(z, conj z)`` by one
and carries one factor ``i k/2``, so ``g_m`` is stored as integer
coefficients ``c[p, q, e]`` of ``(i k/2)**(p+q) z**p conj(z)**q lambda**e``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import WavenumberMismatch
from .trigring import (X, Y, RingElement, cos_x, cos_y, is_zero, sin_x,
                       sin_y)

MAX_ORDER = 8
REAL, IMAG = "real", "imag"
QUARTER_TURNS = {1: 0, 1j: 1, -1: 2, -1j: 3}


def builtin_omega1() -> RingElement:
    """``x^2 cos y - y sin y + y^2 sin x + x cos x``."""
    return X**2 * cos_y() - Y * sin_y() + Y**2 * sin_x() + X * cos_x()


def builtin_omega2() -> RingElement:
    """``4 (y cos x + x sin y)``."""
    return 4 * (Y * cos_x() + X * sin_y())


@dataclass(frozen=True)
class FamilyParams:
    """One member of the plane-wave family.

    ``lam`` must lie on the unit circle unless ``unsafe`` is set: off the
    circle the member grows exponentially in some direction.
    """

    k: float = 1.0
    lam: complex = 1.0
    m: int = 0
    part: str = REAL
    unsafe: bool = False
    max_order: int = MAX_ORDER

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if self.k <= 0:
            raise ValueError("wavenumber k must be positive")
        if self.part not in (REAL, IMAG):
            raise ValueError(f"part must be {REAL!r} or {IMAG!r}, got {self.part!r}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise ValueError("m must be a nonnegative integer")
        if self.m > self.max_order:
            raise ValueError(f"m={self.m} exceeds the configured maximum {self.max_order}")
        if not self.unsafe and abs(abs(self.lam) - 1.0) > 1e-12:
            raise ValueError(f"|lambda| must be 1, got {abs(self.lam)!r} (pass unsafe=True to override)")

    def to_json(self, weight=1.0):
        return {"lambda": [self.lam.real, self.lam.imag], "m": int(self.m),
                "part": self.part, "weight": weight}


@lru_cache(maxsize=None)
def _prefactor_coefficients(m):
    """Integer coefficients ``{(p, q, e): c}`` of ``g_m``; see module docstring."""
    g = {(0, 0, 0): 1}
    for _ in range(m):
        nxt = {}
        for (p, q, e), c in g.items():
            if e:
                key = (p, q, e - 1)
                nxt[key] = nxt.get(key, 0) + c * e
            key = (p + 1, q, e)
            nxt[key] = nxt.get(key, 0) + c
            key = (p, q + 1, e - 2)
            nxt[key] = nxt.get(key, 0) - c
        g = {k: v for k, v in nxt.items() if v}
    return g


# -- exact family --------------------------------------------------------------

class _Complex:
    """Complex ring element ``re + i*im`` used while building exact members."""

    def __init__(self, re, im=None):
        self.re = re
        self.im = im if im is not None else RingElement()

    def __add__(self, o):
        return _Complex(self.re + o.re, self.im + o.im)

    def __mul__(self, o):
        if isinstance(o, _Complex):
            return _Complex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        a, b = o  # Gaussian rational (a, b)
        return _Complex(self.re * a - self.im * b, self.re * b + self.im * a)


def _gauss_pow_i(n):
    """``i**n`` as a Gaussian integer pair."""
    return [(1, 0), (0, 1), (-1, 0), (0, -1)][n % 4]


def family_exact(k=1, lam=1, m=0, part=REAL) -> RingElement:
    """Exact member of the family for ``k = 1`` and ``lam`` in {1, i, -1, -i}."""
    if k != 1:
        raise ValueError("exact family members are only available for k = 1")
    lam = complex(lam)
    if lam not in QUARTER_TURNS:
        raise ValueError(f"exact mode needs lambda in {{1, i, -1, -i}}, got {lam!r}")
    FamilyParams(1.0, lam, m, part)  # validates m and part
    s = QUARTER_TURNS[lam]
    z = _Complex(X, Y)
    zbar = _Complex(X, -Y)
    half_i = (Fraction(0), Fraction(1, 2))

    total = _Complex(RingElement())
    for (p, q, e), c in _prefactor_coefficients(m).items():
        term = _Complex(RingElement.const(c))
        for _ in range(p):
            term = term * z
        for _ in range(q):
            term = term * zbar
        for _ in range(p + q):
            term = term * half_i
        term = term * _gauss_pow_i(s * e)
        total = total + term

    # exp(i/2 (lam z + zbar/lam)) for the four admissible lambdas
    phase = {0: _Complex(cos_x(), sin_x()), 1: _Complex(cos_y(), -sin_y()),
             2: _Complex(cos_x(), -sin_x()), 3: _Complex(cos_y(), sin_y())}[s]
    member = total * phase
    return member.re if part == REAL else member.im


def family_basis(max_m=4):
    """All exact members with ``m <= max_m`` as ``[(FamilyParams, RingElement)]``."""
    out = []
    for lam in (1, 1j, -1, -1j):
        for m in range(max_m + 1):
            for part in (REAL, IMAG):
                elem = family_exact(1, lam, m, part)
                if not elem.is_zero():
                    out.append((FamilyParams(1.0, lam, m, part), elem))
    return out


def _rational_solve(columns, target):
    """One exact solution ``w`` of ``sum_j w_j columns[j] == target``, else None."""
    keys = sorted(set().union(*(dict(c.items()) for c in columns), dict(target.items())))
    n = len(columns)
    rows = [[c.coefficient_by_key(k) for c in columns] + [target.coefficient_by_key(k)]
            for k in keys]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    w = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        w[col] = rows[i][-1]
    return w


def find_family_representation(target: RingElement, max_m=4):
    """Express ``target`` as a rational combination of exact family members.

    Returns ``[(weight, FamilyParams)]`` with nonzero weights, or None when
    ``target`` is outside the span of members with ``m <= max_m``.
    """
    basis = family_basis(max_m)
    w = _rational_solve([e for _, e in basis], target)
    if w is None:
        return None
    return [(wi, params) for wi, (params, _) in zip(w, basis) if wi]


# -- numeric family ------------------------------------------------------------

Oracle = Callable[[np.ndarray, np.ndarray], tuple]


@dataclass
class NumericSolution:
    """Helmholtz solution given by an evaluation oracle.

    ``oracle(x, y)`` returns ``(value, dx, dy, dxx, dxy, dyy)`` with numpy
    broadcasting.  ``provenance`` lists ``(weight, FamilyParams)`` pairs, or
    a descriptive string for solutions not built from the family.
    """

    oracle: Oracle
    k: float
    provenance: list = field(default_factory=list)
    self_check: bool = False

    def derivatives(self, x, y):
        out = self.oracle(x, y)
        if self.self_check:
            v, _, _, dxx, _, dyy = out
            scale = np.maximum.reduce([np.abs(v) * self.k**2, np.abs(dxx), np.abs(dyy),
                                       np.ones_like(np.asarray(v, dtype=float))])
            res = np.abs(dxx + dyy + self.k**2 * v) / scale
            if np.any(res > 1e-10):
                raise ArithmeticError(f"Helmholtz self-check failed: relative residual {np.max(res):.3e}")
        return out

    def __call__(self, x, y):
        return self.derivatives(x, y)[0]

    def laplacian(self, x, y):
        d = self.derivatives(x, y)
        return d[3] + d[5]

    @classmethod
    def from_ring(cls, elem: RingElement, k=1.0, provenance=None):
        """Numeric oracle backed by exact derivatives of a ring element."""
        parts = [elem, elem.diff_x(), elem.diff_y(), elem.diff_x().diff_x(),
                 elem.diff_x().diff_y(), elem.diff_y().diff_y()]
        fns = [p.evaluator() for p in parts]

        def oracle(x, y):
            return tuple(f(x, y) for f in fns)

        return cls(oracle, k, provenance if provenance is not None else [("ring", str(elem))])


def family_numeric(params: FamilyParams) -> NumericSolution:
    """Numeric oracle for one family member, derivatives in closed form."""
    k, lam, m = params.k, params.lam, params.m
    coeffs = []
    for (p, q, e), c in _prefactor_coefficients(m).items():
        coeffs.append((p, q, c * (0.5j * k) ** (p + q) * lam**e))
    alpha = 0.5 * k * lam
    beta = 0.5 * k / lam
    take = np.real if params.part == REAL else np.imag

    def oracle(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = x + 1j * y
        zb = x - 1j * y
        G = Gz = Gb = Gzz = Gzb = Gbb = 0j
        for p, q, c in coeffs:
            zp = z**p
            bq = zb**q
            G = G + c * zp * bq
            if p:
                zp1 = z ** (p - 1)
                Gz = Gz + c * p * zp1 * bq
                if q:
                    Gzb = Gzb + c * p * q * zp1 * zb ** (q - 1)
                if p > 1:
                    Gzz = Gzz + c * p * (p - 1) * z ** (p - 2) * bq
            if q:
                Gb = Gb + c * q * zp * zb ** (q - 1)
                if q > 1:
                    Gbb = Gbb + c * q * (q - 1) * zp * zb ** (q - 2)
        E = np.exp(1j * (alpha * z + beta * zb))
        Fz = (Gz + 1j * alpha * G) * E
        Fb = (Gb + 1j * beta * G) * E
        Fzz = (Gzz + 2j * alpha * Gz - alpha**2 * G) * E
        Fbb = (Gbb + 2j * beta * Gb - beta**2 * G) * E
        Fzb = (Gzb + 1j * beta * Gz + 1j * alpha * Gb - alpha * beta * G) * E
        F = G * E
        shape = np.broadcast(x, y).shape
        vals = (F, Fz + Fb, 1j * (Fz - Fb), Fzz + 2 * Fzb + Fbb,
                1j * (Fzz - Fbb), -Fzz + 2 * Fzb - Fbb)
        return tuple(np.broadcast_to(take(v), shape).astype(float) for v in vals)

    return NumericSolution(oracle, k, [(1.0, params)])


def linear_combination(weights: Sequence, sols: Sequence):
    """Weighted sum of solutions of the same kind and wavenumber."""
    if len(weights) != len(sols):
        raise ValueError("weights and solutions differ in length")
    if not sols:
        raise ValueError("empty combination")
    if all(isinstance(s, RingElement) for s in sols):
        total = RingElement()
        for w, s in zip(weights, sols):
            if isinstance(w, float):
                raise TypeError("exact combinations need int or Fraction weights")
            total = total + s * w
        return total
    if not all(isinstance(s, NumericSolution) for s in sols):
        raise TypeError("cannot mix exact and numeric solutions")
    k = sols[0].k
    if any(not math.isclose(s.k, k, rel_tol=1e-14) for s in sols):
        raise WavenumberMismatch(f"wavenumbers differ: {[s.k for s in sols]}")
    weights = [float(w) for w in weights]
    oracles = [s.oracle for s in sols]

    def oracle(x, y):
        acc = None
        for w, o in zip(weights, oracles):
            d = o(x, y)
            acc = [w * v for v in d] if acc is None else [a + w * v for a, v in zip(acc, d)]
        return tuple(acc)

    prov = []
    for w, s in zip(weights, sols):
        prov.extend((w * pw, p) for pw, p in s.provenance if isinstance(p, FamilyParams))
    return NumericSolution(oracle, k, prov)


@dataclass
class HelmholtzReport:
    exact: bool
    is_zero: bool | None
    sup_residual: float

    @property
    def ok(self):
        return self.is_zero if self.exact else self.sup_residual < 1e-10


def default_sample_grid(half_width=10.0, n=41):
    g = np.linspace(-half_width, half_width, n)
    return np.meshgrid(g, g)


def verify_helmholtz(sol, k=1.0, grid=None) -> HelmholtzReport:
    """Residual of ``Lap(sol) + k**2 sol``: exact verdict or sup on a grid."""
    gx, gy = grid if grid is not None else default_sample_grid()
    if isinstance(sol, RingElement):
        kk = Fraction(k) if not isinstance(k, float) else Fraction(k).limit_denominator(10**12)
        res = sol.laplacian() + sol * kk
        sup = float(np.max(np.abs(res.evaluator()(gx, gy)))) if not res.is_zero() else 0.0
        return HelmholtzReport(True, is_zero(res), sup)
    d = sol.derivatives(gx, gy)
    res = d[3] + d[5] + k**2 * d[0]
    return HelmholtzReport(False, None, float(np.max(np.abs(res))))


# -- JSON descriptors -------------------------------------------------------------

def solution_from_descriptor(desc: dict):
    """Build a solution from ``{k, terms: [{lambda: [re, im], m, part, weight}]}``.

    Returns ``(NumericSolution, RingElement | None)``; the exact element is
    produced when k = 1, every lambda is a fourth root of unity and every
    weight is an integer or a ``"p/q"`` string.
    """
    terms = desc.get("terms")
    if not terms:
        raise ValueError("descriptor needs a nonempty 'terms' list")
    default_k = desc.get("k")
    sols, params, weights = [], [], []
    for t in terms:
        k = float(t.get("k", default_k if default_k is not None else 1.0))
        re, im = t.get("lambda", [1.0, 0.0])
        p = FamilyParams(k, complex(re, im), int(t.get("m", 0)), t.get("part", REAL),
                         unsafe=bool(t.get("unsafe", False)))
        sols.append(family_numeric(p))
        params.append(p)
        weights.append(t.get("weight", 1))
    numeric = linear_combination([float(Fraction(w)) for w in weights], sols)

    exact = None
    if all(p.k == 1 and p.lam in QUARTER_TURNS for p in params) and \
            all(isinstance(w, (int, str)) for w in weights):
        exact = linear_combination([Fraction(w) for w in weights],
                                   [family_exact(1, p.lam, p.m, p.part) for p in params])
    return numeric, exact


def list_family(max_m=4):
    """Human-readable listing of the exact family members."""
    rows = []
    for params, elem in family_basis(max_m):
        lam = params.lam
        lam_s = {1: "1", 1j: "i", -1: "-1", -1j: "-i"}[lam]
        rows.append({"lambda": lam_s, "m": params.m, "part": params.part, "element": str(elem)})
    return rows
