"""Certificates that Q has no zeros (Q < 0 on the whole plane).

Outside a box ``[-R0, R0]^2`` the quartic ``-x^4 - y^4`` dominates.  Write
``Q = -x^4 - y^4 + c0 + rest`` where ``c0`` is the constant coefficient.  With
``s = max(|x|, |y|)`` and the trig-free envelope of ``rest``,

    Q <= g(s) := -s^4 + envelope(rest)(s, s) + c0.

``R0`` is chosen so that every coefficient of ``t -> g(R0 + t)`` is <= 0 in
exact rational arithmetic; then ``g < 0`` for all ``s >= R0``.

Inside the box a quadtree of square cells is refined until each cell's
center value plus a local gradient bound times the half-diagonal is
negative.  The gradient bound on a cell is ``env(Q_x) + env(Q_y)`` taken at
the cell's far corner, valid because envelopes increase in ``|x|``, ``|y|``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InconclusiveError, LeadingPartError
from .trigring import X, Y, RingElement, envelope

# added to every floating bound so the verdict is conservative
OUTWARD = 1e-9
MIN_SPACING = 1e-4
R0_STEP = Fraction(1, 16)


def _check_leading(Q: RingElement):
    if Q.total_degree != 4 or not (Q.leading_terms() + X**4 + Y**4).is_zero():
        raise LeadingPartError("Q must lead with exactly -x^4 - y^4")


def _taylor_shift(coeffs, r):
    """Coefficients of ``p(r + t)`` in ``t`` for ``p`` given lowest degree first."""
    out = list(coeffs)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += r * out[j + 1]
    return out


def _g_coefficients(Q: RingElement):
    c0 = Q.constant_term()
    rest = Q + X**4 + Y**4 - c0
    diag = envelope(rest).diagonal()
    coeffs = diag + [Fraction(0)] * (5 - len(diag))
    coeffs[0] += c0
    coeffs[4] -= 1
    return coeffs


def _outer_ok(coeffs, r):
    shifted = _taylor_shift(coeffs, r)
    return shifted[0] < 0 and all(b <= 0 for b in shifted[1:]), shifted[0]


def outer_bound(Q: RingElement, C=None):
    """Radius ``R0`` and exact bound ``sup_{max(|x|,|y|) >= R0} Q <= margin < 0``.

    ``R0`` is the smallest multiple of 1/16 that passes the shifted
    coefficient test.  ``C`` is accepted for symmetry with the other
    certificate functions; the bound only depends on ``Q``.
    """
    _check_leading(Q)
    coeffs = _g_coefficients(Q)
    roots = np.roots([float(c) for c in reversed(coeffs)])
    real = [r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 0]
    j = math.ceil(max(real, default=0.0) / R0_STEP)
    ok, _ = _outer_ok(coeffs, j * R0_STEP)
    while not ok:
        j += 1
        ok, _ = _outer_ok(coeffs, j * R0_STEP)
    while j > 0 and _outer_ok(coeffs, (j - 1) * R0_STEP)[0]:
        j -= 1
    R0 = j * R0_STEP
    margin = _outer_ok(coeffs, R0)[1]
    return float(R0), float(margin) + OUTWARD


@dataclass
class PositivityCertificate:
    """Evidence that ``Q < 0`` everywhere for one integration constant ``C``.

    ``leaves`` holds the certified cells as rows ``(cx, cy, half_side)``;
    ``inner_margin`` is the largest cell bound, ``spacing`` the finest cell
    side and ``lipschitz`` the gradient bound over the whole box.
    """

    C: Fraction
    R0: float
    outer_margin: float
    spacing: float = float("nan")
    lipschitz: float = float("nan")
    inner_margin: float = float("nan")
    verdict: str = "certified"
    witness: tuple | None = None
    witness_value: float | None = None
    max_sample: float = float("nan")
    leaves: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)), repr=False)

    @property
    def certified(self):
        return self.verdict == "certified"

    def revalidate(self, Q: RingElement):
        """Recompute the inner margin from the stored cells."""
        gx, gy = envelope(Q.diff_x()), envelope(Q.diff_y())
        return _cell_bounds(Q.evaluator(), gx, gy, self.leaves)[1].max()

    def to_json(self, include_cells=False):
        out = {
            "C": f"{Fraction(self.C).numerator}/{Fraction(self.C).denominator}",
            "verdict": self.verdict,
            "R0": self.R0,
            "outer_margin": self.outer_margin,
            "grid_spacing": self.spacing,
            "lipschitz_bound": self.lipschitz,
            "inner_margin": self.inner_margin,
            "max_sample": self.max_sample,
            "cells": int(len(self.leaves)),
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_value": self.witness_value,
        }
        if include_cells:
            out["cell_list"] = self.leaves.tolist()
        return out

    def save(self, path, include_cells=True):
        with open(path, "w") as fh:
            json.dump(self.to_json(include_cells), fh, indent=1)


def _cell_bounds(f, gx, gy, cells):
    cx, cy, a = cells[:, 0], cells[:, 1], cells[:, 2]
    v = f(cx, cy)
    lip = gx(np.abs(cx) + a, np.abs(cy) + a) + gy(np.abs(cx) + a, np.abs(cy) + a)
    bound = v + lip * a * math.sqrt(2) + OUTWARD * (1 + np.abs(v) + lip * a)
    return v, bound


def inner_certificate(Q: RingElement, C, R0, initial_spacing=1.0, min_spacing=MIN_SPACING):
    """Quadtree check of ``Q < 0`` on ``[-R0, R0]^2``.

    Returns ``(verdict, data)`` with verdict ``"certified"`` or ``"failed"``;
    a failed run reports a sampled point where ``Q >= 0``.

    Raises
    ------
    InconclusiveError
        When a cell would have to shrink below ``min_spacing``.
    """
    f = Q.evaluator()
    gx, gy = envelope(Q.diff_x()), envelope(Q.diff_y())
    L = float(gx(R0, R0) + gy(R0, R0))
    if R0 == 0:
        return "certified", dict(spacing=0.0, lipschitz=L, inner_margin=-math.inf,
                                 max_sample=-math.inf, leaves=np.zeros((0, 3)))
    n = max(1, math.ceil(2 * R0 / initial_spacing))
    a = R0 / n
    centers = -R0 + a * (2 * np.arange(n) + 1)
    cx, cy = np.meshgrid(centers, centers, indexing="ij")
    cells = np.column_stack([cx.ravel(), cy.ravel(), np.full(cx.size, a)])

    leaves, margins = [], []
    max_sample = -math.inf
    while len(cells):
        v, bound = _cell_bounds(f, gx, gy, cells)
        max_sample = max(max_sample, float(v.max()))
        if v.max() >= 0:
            i = int(np.argmax(v))
            return "failed", dict(spacing=2 * a, lipschitz=L, inner_margin=float(bound.max()),
                                  max_sample=max_sample, witness=(float(cells[i, 0]), float(cells[i, 1])),
                                  witness_value=float(v[i]), leaves=np.zeros((0, 3)))
        done = bound < 0
        leaves.append(cells[done])
        margins.append(bound[done])
        todo = cells[~done]
        if not len(todo):
            break
        a = a / 2
        if 2 * a < min_spacing:
            i = int(np.argmax(bound[~done]))
            raise InconclusiveError(
                f"cell at ({todo[i, 0]:.6g}, {todo[i, 1]:.6g}) unresolved at spacing {2 * a:.1e}",
                point=(float(todo[i, 0]), float(todo[i, 1])))
        offs = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=float) * a
        cells = np.concatenate([
            np.column_stack([todo[:, 0] + dx, todo[:, 1] + dy, np.full(len(todo), a)])
            for dx, dy in offs
        ])
    leaves = np.concatenate(leaves)
    margins = np.concatenate(margins)
    return "certified", dict(spacing=2 * float(leaves[:, 2].min()), lipschitz=L,
                             inner_margin=float(margins.max()), max_sample=max_sample,
                             leaves=leaves)


def certify(Q: RingElement, C=None, initial_spacing=1.0, min_spacing=MIN_SPACING):
    """Full certificate (outer bound plus inner quadtree) for one ``Q``."""
    R0, outer = outer_bound(Q, C)
    C = Fraction(C) if C is not None else (Q.constant_term() - 1) / 4
    cert = PositivityCertificate(C, R0, outer)
    if outer >= 0:
        cert.verdict = "failed"
        return cert
    try:
        verdict, data = inner_certificate(Q, C, R0, initial_spacing, min_spacing)
    except InconclusiveError as exc:
        cert.verdict = "inconclusive"
        cert.witness = exc.point
        return cert
    cert.verdict = verdict
    for k, v in data.items():
        setattr(cert, k, v)
    return cert


def certify_package(pkg, **kw):
    return certify(pkg.Q, pkg.C, **kw)


@dataclass
class ThresholdResult:
    C_star: int
    certified: PositivityCertificate
    failed: PositivityCertificate
    path: list

    @property
    def monotone(self):
        ok = [c for c, v in self.path if v == "certified"]
        bad = [c for c, v in self.path if v != "certified"]
        return not ok or not bad or max(ok) < min(bad)

    def to_json(self):
        return {"C_star": self.C_star, "monotone": self.monotone,
                "path": [[c, v] for c, v in self.path],
                "certified": self.certified.to_json(), "failed": self.failed.to_json()}


def threshold_C(Q_of_C, max_doublings=40, **kw) -> ThresholdResult:
    """Largest integer ``C < 0`` whose certificate succeeds.

    ``Q_of_C`` maps an integer ``C`` to ``Q``; for packages built here
    ``C`` only moves the constant term by ``4C``.  The search doubles ``|C|``
    until a certificate succeeds, then bisects against the failing side.
    Inconclusive verdicts count as failures.
    """
    path = []
    cache = {}

    def run(c):
        if c not in cache:
            cache[c] = certify(Q_of_C(c), c, **kw)
            path.append((c, cache[c].verdict))
        return cache[c]

    hi = 0
    lo = -1
    for _ in range(max_doublings):
        if run(lo).certified:
            break
        hi, lo = lo, 2 * lo
    else:
        raise InconclusiveError(f"no certified C found down to {lo}")
    if hi == 0:
        run(0)
    while hi - lo > 1:
        mid = (hi + lo) // 2
        if run(mid).certified:
            lo = mid
        else:
            hi = mid
    return ThresholdResult(lo, run(lo), run(hi), path)


def random_probe(Q: RingElement, half_width, n=10**6, seed=0, chunk=250_000):
    """Largest value of Q at ``n`` uniform random points of ``[-w, w]^2``."""
    rng = np.random.default_rng(seed)
    f = Q.evaluator()
    best = -math.inf
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        pts = rng.uniform(-half_width, half_width, size=(2, m))
        best = max(best, float(f(pts[0], pts[1]).max()))
    return best
