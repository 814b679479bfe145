"""Exact trigonometric-polynomial ring in two variables.

Elements are finite sums of terms

    c * x**a * y**b * T(n*x) * S(m*y),     T, S in {1, sin, cos},

with exact rational coefficients ``c`` and integer frequencies ``n, m >= 0``.
The family {x^a y^b T(nx) S(my)} is linearly independent over the reals, so
an element is zero exactly when its normalized term set is empty.  That turns
every identity check in this package into a decision procedure.

The ring is closed under products (product-to-sum reduction keeps the
frequencies integral), under ``d/dx``, ``d/dy`` and under the definite
integrals ``int_0^x`` and ``int_0^y``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Iterator, Mapping

import numpy as np

NONE = "none"
COS = "cos"
SIN = "sin"
KINDS = (NONE, COS, SIN)

ONE_TRIG = (NONE, 0)

# key layout: (xdeg, ydeg, xfreq, xkind, yfreq, ykind); tuple order is the
# canonical term order, so the last key has the highest x-degree.
Key = tuple


def _canon_trig(kind, freq):
    """Return ``(sign, (kind, freq))`` for a trig factor, or None if it is 0."""
    if kind == NONE:
        return 1, ONE_TRIG
    if kind not in (COS, SIN):
        raise ValueError(f"unknown trig kind {kind!r}")
    freq = int(freq)
    if freq == 0:
        return (1, ONE_TRIG) if kind == COS else None
    if freq < 0:
        return (1, (COS, -freq)) if kind == COS else (-1, (SIN, -freq))
    return 1, (kind, freq)


def _trig_mul(a, b):
    """Product of two one-variable trig factors as ``[(coeff, trig), ...]``."""
    ka, na = a
    kb, nb = b
    if ka == NONE:
        return [(Fraction(1), b)]
    if kb == NONE:
        return [(Fraction(1), a)]
    half = Fraction(1, 2)
    if ka == COS and kb == COS:
        raw = [(half, COS, na - nb), (half, COS, na + nb)]
    elif ka == SIN and kb == SIN:
        raw = [(half, COS, na - nb), (-half, COS, na + nb)]
    elif ka == SIN:
        raw = [(half, SIN, na + nb), (half, SIN, na - nb)]
    else:
        raw = [(half, SIN, na + nb), (half, SIN, nb - na)]
    out = []
    for c, kind, freq in raw:
        canon = _canon_trig(kind, freq)
        if canon is not None:
            out.append((c * canon[0], canon[1]))
    return out


def _trig_diff(t):
    """Derivative of a trig factor: ``[(coeff, trig)]``."""
    kind, n = t
    if kind == NONE:
        return []
    if kind == SIN:
        return [(Fraction(n), (COS, n))]
    return [(Fraction(-n), (SIN, n))]


@lru_cache(maxsize=None)
def _antiderivative(deg, trig):
    """Some antiderivative of ``s**deg * trig(s)`` as a tuple of (coeff, deg, trig).

    Integration by parts lowers ``deg`` by one per step.
    """
    kind, n = trig
    if kind == NONE:
        return ((Fraction(1, deg + 1), deg + 1, ONE_TRIG),)
    inv = Fraction(1, n)
    if kind == COS:
        head = (inv, deg, (SIN, n))
        tail_trig, tail_sign = (SIN, n), -1
    else:
        head = (-inv, deg, (COS, n))
        tail_trig, tail_sign = (COS, n), 1
    if deg == 0:
        return (head,)
    rest = _antiderivative(deg - 1, tail_trig)
    scale = tail_sign * deg * inv
    return (head,) + tuple((scale * c, d, t) for c, d, t in rest)


@lru_cache(maxsize=None)
def _definite_integral(deg, trig):
    """``int_0^s t**deg * trig(t) dt`` as a tuple of (coeff, deg, trig)."""
    terms = {}
    at_zero = Fraction(0)
    for c, d, t in _antiderivative(deg, trig):
        terms[(d, t)] = terms.get((d, t), Fraction(0)) + c
        if d == 0 and t[0] in (NONE, COS):
            at_zero += c
    if at_zero:
        terms[(0, ONE_TRIG)] = terms.get((0, ONE_TRIG), Fraction(0)) - at_zero
    return tuple((c, d, t) for (d, t), c in terms.items() if c)


def _make_key(xdeg, ydeg, xtrig, ytrig):
    return (xdeg, ydeg, xtrig[1], xtrig[0], ytrig[1], ytrig[0])


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


def _trig_value(trig, v):
    kind, n = trig
    if kind == NONE:
        return 1.0
    return math.cos(n * v) if kind == COS else math.sin(n * v)


@dataclass(frozen=True)
class Term:
    """A single basis monomial with its coefficient."""

    coeff: Fraction
    xdeg: int
    ydeg: int
    xtrig: tuple = ONE_TRIG
    ytrig: tuple = ONE_TRIG

    @property
    def key(self):
        return _make_key(self.xdeg, self.ydeg, self.xtrig, self.ytrig)

    @property
    def degree(self):
        return self.xdeg + self.ydeg

    def __call__(self, x, y):
        return (float(self.coeff) * x ** self.xdeg * y ** self.ydeg
                * _trig_value(self.xtrig, x) * _trig_value(self.ytrig, y))

    def __str__(self):
        parts = []
        if self.xdeg:
            parts.append("x" if self.xdeg == 1 else f"x^{self.xdeg}")
        if self.ydeg:
            parts.append("y" if self.ydeg == 1 else f"y^{self.ydeg}")
        for var, (kind, n) in (("x", self.xtrig), ("y", self.ytrig)):
            if kind != NONE:
                parts.append(f"{kind}({var})" if n == 1 else f"{kind}({n}{var})")
        body = "*".join(parts)
        if not body:
            return str(self.coeff)
        if self.coeff == 1:
            return body
        if self.coeff == -1:
            return "-" + body
        return f"{self.coeff}*{body}"


class RingElement:
    """Immutable normalized element of the trigonometric-polynomial ring.

    Build elements from the generators :data:`X`, :data:`Y` and the helpers
    :func:`sin_x`, :func:`cos_x`, :func:`sin_y`, :func:`cos_y`, then combine
    them with ``+``, ``-``, ``*`` and ``**``.  Integers and Fractions are
    promoted to constants.

    >>> w = X**2 * cos_y() + Y**2 * sin_x()
    >>> is_zero(w.laplacian() + w - 2 * cos_y() - 2 * sin_x())
    True
    """

    __slots__ = ("_terms", "_hash", "_evaluator")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[key] = c
        self._terms = dict(sorted(clean.items()))
        self._hash = None
        self._evaluator = None

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, c):
        return cls({_make_key(0, 0, ONE_TRIG, ONE_TRIG): c})

    @classmethod
    def monomial(cls, coeff=1, xdeg=0, ydeg=0, xtrig=ONE_TRIG, ytrig=ONE_TRIG):
        sx = _canon_trig(*xtrig)
        sy = _canon_trig(*ytrig)
        if sx is None or sy is None:
            return cls()
        coeff = _as_fraction(coeff) * sx[0] * sy[0]
        return cls({_make_key(xdeg, ydeg, sx[1], sy[1]): coeff})

    @classmethod
    def from_terms(cls, terms: Iterable[Term]):
        acc = {}
        for t in terms:
            sx = _canon_trig(*t.xtrig)
            sy = _canon_trig(*t.ytrig)
            if sx is None or sy is None:
                continue
            key = _make_key(t.xdeg, t.ydeg, sx[1], sy[1])
            acc[key] = acc.get(key, Fraction(0)) + _as_fraction(t.coeff) * sx[0] * sy[0]
        return cls(acc)

    @staticmethod
    def _coerce(other):
        if isinstance(other, RingElement):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return RingElement.const(other)
        return NotImplemented

    # -- container protocol -----------------------------------------------
    def terms(self) -> Iterator[Term]:
        """Terms in canonical (ascending) order."""
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            yield Term(c, xd, yd, (xk, xf), (yk, yf))

    def __iter__(self):
        return self.terms()

    def __len__(self):
        return len(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, xdeg=0, ydeg=0, xtrig=ONE_TRIG, ytrig=ONE_TRIG):
        sx = _canon_trig(*xtrig)
        sy = _canon_trig(*ytrig)
        if sx is None or sy is None:
            return Fraction(0)
        c = self._terms.get(_make_key(xdeg, ydeg, sx[1], sy[1]), Fraction(0))
        return c * sx[0] * sy[0]

    def coefficient_by_key(self, key):
        return self._terms.get(key, Fraction(0))

    def is_zero(self):
        return not self._terms

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"RingElement({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        out = ""
        for t in reversed(list(self.terms())):
            s = str(t)
            if not out:
                out = s
            elif s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for key, c in other._terms.items():
            acc[key] = acc.get(key, Fraction(0)) + c
        return RingElement(acc)

    __radd__ = __add__

    def __neg__(self):
        return RingElement({k: -c for k, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Rational)):
            c = _as_fraction(other)
            return RingElement({k: c * v for k, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = {}
        for (xd1, yd1, xf1, xk1, yf1, yk1), c1 in self._terms.items():
            for (xd2, yd2, xf2, xk2, yf2, yk2), c2 in other._terms.items():
                c = c1 * c2
                xs = _trig_mul((xk1, xf1), (xk2, xf2))
                ys = _trig_mul((yk1, yf1), (yk2, yf2))
                xd, yd = xd1 + xd2, yd1 + yd2
                for cx, tx in xs:
                    for cy, ty in ys:
                        key = (xd, yd, tx[1], tx[0], ty[1], ty[0])
                        acc[key] = acc.get(key, Fraction(0)) + c * cx * cy
        return RingElement(acc)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = RingElement.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus ---------------------------------------------------------
    def diff_x(self):
        acc = {}
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            if xd:
                key = (xd - 1, yd, xf, xk, yf, yk)
                acc[key] = acc.get(key, Fraction(0)) + c * xd
            for dc, (k2, f2) in _trig_diff((xk, xf)):
                key = (xd, yd, f2, k2, yf, yk)
                acc[key] = acc.get(key, Fraction(0)) + c * dc
        return RingElement(acc)

    def diff_y(self):
        acc = {}
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            if yd:
                key = (xd, yd - 1, xf, xk, yf, yk)
                acc[key] = acc.get(key, Fraction(0)) + c * yd
            for dc, (k2, f2) in _trig_diff((yk, yf)):
                key = (xd, yd, xf, xk, f2, k2)
                acc[key] = acc.get(key, Fraction(0)) + c * dc
        return RingElement(acc)

    def laplacian(self):
        return self.diff_x().diff_x() + self.diff_y().diff_y()

    def integrate_x(self):
        """``int_0^x`` of the element (the result vanishes on the line x = 0)."""
        acc = {}
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            for c2, d2, (k2, f2) in _definite_integral(xd, (xk, xf)):
                key = (d2, yd, f2, k2, yf, yk)
                acc[key] = acc.get(key, Fraction(0)) + c * c2
        return RingElement(acc)

    def integrate_y(self):
        """``int_0^y`` of the element (the result vanishes on the line y = 0)."""
        acc = {}
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            for c2, d2, (k2, f2) in _definite_integral(yd, (yk, yf)):
                key = (xd, d2, xf, xk, f2, k2)
                acc[key] = acc.get(key, Fraction(0)) + c * c2
        return RingElement(acc)

    def at_x0(self):
        """Restriction to the line x = 0, as an element in y alone."""
        acc = {}
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            if xd or xk == SIN:
                continue
            key = (0, yd, 0, NONE, yf, yk)
            acc[key] = acc.get(key, Fraction(0)) + c
        return RingElement(acc)

    def at_y0(self):
        """Restriction to the line y = 0, as an element in x alone."""
        acc = {}
        for (xd, yd, xf, xk, yf, yk), c in self._terms.items():
            if yd or yk == SIN:
                continue
            key = (xd, 0, xf, xk, 0, NONE)
            acc[key] = acc.get(key, Fraction(0)) + c
        return RingElement(acc)

    # -- structure --------------------------------------------------------
    @property
    def total_degree(self):
        """Largest polynomial degree ``xdeg + ydeg`` among the terms (-1 for 0)."""
        return max((k[0] + k[1] for k in self._terms), default=-1)

    def leading_terms(self):
        """Terms of maximal total polynomial degree, as a RingElement."""
        d = self.total_degree
        return RingElement({k: c for k, c in self._terms.items() if k[0] + k[1] == d})

    def homogeneous_part(self, xdeg, ydeg):
        """Trig-coefficient of ``x**xdeg * y**ydeg`` (an element without powers)."""
        return RingElement({(0, 0) + k[2:]: c for k, c in self._terms.items()
                            if k[0] == xdeg and k[1] == ydeg})

    def constant_term(self):
        """Coefficient of the basis element 1 (not the value at the origin)."""
        return self._terms.get((0, 0, 0, NONE, 0, NONE), Fraction(0))

    def value_at_origin(self):
        """Exact value at (0, 0)."""
        return sum((c for (xd, yd, _, xk, _, yk), c in self._terms.items()
                    if xd == 0 and yd == 0 and xk != SIN and yk != SIN), Fraction(0))

    # -- evaluation -------------------------------------------------------
    def __call__(self, x, y):
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return self.eval(float(x), float(y))
        return self.evaluator()(x, y)

    def eval(self, x, y):
        """Floating value at a point, summed term by term with ``math.fsum``."""
        return math.fsum(t(x, y) for t in self.terms())

    def evaluator(self):
        """Vectorized numpy evaluator ``f(x, y)`` (broadcasting)."""
        if self._evaluator is None:
            self._evaluator = _compile(self)
        return self._evaluator

    def envelope(self):
        return envelope(self)

    # -- serialization ----------------------------------------------------
    def to_json(self):
        return [
            {
                "coeff": f"{t.coeff.numerator}/{t.coeff.denominator}",
                "xdeg": t.xdeg,
                "ydeg": t.ydeg,
                "xtrig": [t.xtrig[0], t.xtrig[1]],
                "ytrig": [t.ytrig[0], t.ytrig[1]],
            }
            for t in self.terms()
        ]

    @classmethod
    def from_json(cls, data):
        return cls.from_terms(
            Term(Fraction(d["coeff"]), int(d["xdeg"]), int(d["ydeg"]),
                 (d["xtrig"][0], int(d["xtrig"][1])),
                 (d["ytrig"][0], int(d["ytrig"][1])))
            for d in data
        )


def _compile(elem):
    groups = {}
    max_xd = max_yd = 0
    for (xd, yd, xf, xk, yf, yk), c in elem.items():
        groups.setdefault(((xk, xf), (yk, yf)), []).append((float(c), xd, yd))
        max_xd = max(max_xd, xd)
        max_yd = max(max_yd, yd)

    def trig(t, v, cache):
        if t not in cache:
            kind, n = t
            cache[t] = np.cos(n * v) if kind == COS else np.sin(n * v)
        return cache[t]

    def f(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xp = [np.ones_like(x)]
        for _ in range(max_xd):
            xp.append(xp[-1] * x)
        yp = [np.ones_like(y)]
        for _ in range(max_yd):
            yp.append(yp[-1] * y)
        out = np.zeros(np.broadcast(x, y).shape)
        xc, yc = {}, {}
        for (tx, ty), monos in groups.items():
            poly = 0.0
            for c, xd, yd in monos:
                poly = poly + c * xp[xd] * yp[yd]
            if tx != ONE_TRIG:
                poly = poly * trig(tx, x, xc)
            if ty != ONE_TRIG:
                poly = poly * trig(ty, y, yc)
            out = out + poly
        return out

    return f


class Envelope:
    """Polynomial in ``|x|, |y|`` with nonnegative rational coefficients.

    Being a sum of nonnegative monomials it is nondecreasing in each argument
    on the positive quadrant, which the positivity certificate relies on.
    """

    def __init__(self, coeffs: Mapping | None = None):
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}
        if any(v < 0 for v in self.coeffs.values()):
            raise ValueError("envelope coefficients must be nonnegative")

    def __call__(self, ax, ay):
        ax = np.abs(np.asarray(ax, dtype=float))
        ay = np.abs(np.asarray(ay, dtype=float))
        out = np.zeros(np.broadcast(ax, ay).shape)
        for (a, b), c in self.coeffs.items():
            out = out + float(c) * ax ** a * ay ** b
        return out if out.ndim else float(out)

    def __eq__(self, other):
        if isinstance(other, Envelope):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == ({(0, 0): Fraction(other)} if other else {})
        return NotImplemented

    def __add__(self, other):
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return Envelope(acc)

    @property
    def degree(self):
        return max((a + b for a, b in self.coeffs), default=-1)

    def diagonal(self):
        """Coefficients of ``s -> self(s, s)``, lowest degree first."""
        out = [Fraction(0)] * (self.degree + 1)
        for (a, b), c in self.coeffs.items():
            out[a + b] += c
        return out

    def __repr__(self):
        body = " + ".join(f"{c}*|x|^{a}*|y|^{b}" for (a, b), c in sorted(self.coeffs.items()))
        return f"Envelope({body or '0'})"


def envelope(a: RingElement) -> Envelope:
    """Trig-free majorant: ``|a(x, y)| <= envelope(a)(|x|, |y|)`` everywhere."""
    acc = {}
    for (xd, yd, *_), c in a.items():
        acc[(xd, yd)] = acc.get((xd, yd), Fraction(0)) + abs(c)
    return Envelope(acc)


@dataclass(frozen=True)
class RationalField:
    """Quotient ``numerator / denominator`` of ring elements."""

    numerator: RingElement
    denominator: RingElement

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("denominator of a RationalField is the zero element")

    def __call__(self, x, y):
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return self.numerator.eval(x, y) / self.denominator.eval(x, y)
        return self.numerator.evaluator()(x, y) / self.denominator.evaluator()(x, y)

    def __add__(self, other):
        if isinstance(other, RationalField):
            return RationalField(
                self.numerator * other.denominator + other.numerator * self.denominator,
                self.denominator * other.denominator,
            )
        other = RingElement._coerce(other)
        return RationalField(self.numerator + other * self.denominator, self.denominator)

    __radd__ = __add__

    def __neg__(self):
        return RationalField(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-other)

    def equals(self, other):
        """Exact equality by cross multiplication."""
        return (self.numerator * other.denominator - other.numerator * self.denominator).is_zero()


# -- generators and functional API -------------------------------------------
ZERO = RingElement()
ONE = RingElement.const(1)
X = RingElement.monomial(1, 1, 0)
Y = RingElement.monomial(1, 0, 1)


def sin_x(n=1):
    return RingElement.monomial(1, 0, 0, (SIN, n))


def cos_x(n=1):
    return RingElement.monomial(1, 0, 0, (COS, n))


def sin_y(n=1):
    return RingElement.monomial(1, 0, 0, ONE_TRIG, (SIN, n))


def cos_y(n=1):
    return RingElement.monomial(1, 0, 0, ONE_TRIG, (COS, n))


def add(a, b):
    return a + b


def mul(a, b):
    return a * b


def diff_x(a):
    return a.diff_x()


def diff_y(a):
    return a.diff_y()


def laplacian(a):
    return a.laplacian()


def integrate_x(a):
    return a.integrate_x()


def integrate_y(a):
    return a.integrate_y()


def evaluate(a, x, y):
    return a.eval(x, y)


def is_zero(a):
    return a.is_zero()
