"""Metric probes: hyperplane distances, the product inequality, tangent-plane
commensurability and Lipschitz exponents along pair-curves.

Floating point is confined to this module.  Norms are sup-norms throughout.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .conditions import _point
from .cyclo import CycRat
from .doubling import PairCurve
from .errors import DegenerateCurve, DegenerateInput, TruncationInsufficient
from .icurve import IdealOnCurve
from .poly import Poly
from .puiseux import puiseux_branches

__all__ = [
    "Hyperplane",
    "hyperplane_distance",
    "product_inequality_probe",
    "ProductReport",
    "ProbeSample",
    "tangent_commensurability_probe",
    "lipschitz_exponent_probe",
    "pair_values",
    "SUP_FORMULA",
    "INNER_PRODUCT",
]

SUP_FORMULA = "supFormula"
INNER_PRODUCT = "innerProductDef"
TOL = 1e-10


def _complex(c) -> complex:
    if isinstance(c, CycRat):
        return c.to_complex()
    if isinstance(c, tuple):
        return complex(float(c[0]), float(c[1]))
    return complex(c)


class Hyperplane:
    """{sum a_i z_i = 0}; normIndex is the first index of maximal modulus."""

    def __init__(self, coeffs):
        self.coeffs = tuple(_complex(c) for c in coeffs)
        if not self.coeffs or not any(self.coeffs):
            raise DegenerateInput("hyperplane coefficients are all zero")
        mods = [abs(c) for c in self.coeffs]
        self.normIndex = mods.index(max(mods))

    @classmethod
    def parse(cls, text: str) -> "Hyperplane":
        return cls([complex(s.strip().replace("i", "j")) for s in text.split(",")])

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"Hyperplane({list(self.coeffs)})"


def hyperplane_distance(A: Hyperplane, B: Hyperplane, method=SUP_FORMULA) -> float:
    """Sup-norm distance between hyperplanes, with coordinates permuted so that
    A's sup-norm index comes first."""
    if len(A) != len(B):
        raise ValueError("hyperplanes live in different dimensions")
    k = A.normIndex
    a, b = A.coeffs, B.coeffs
    if a[k] == 0 or b[k] == 0:
        raise DegenerateInput("zero leading coefficient after permutation")
    others = [i for i in range(len(a)) if i != k]
    if not others:
        return 0.0
    if method == SUP_FORMULA:
        return max(abs(a[i] / a[k] - b[i] / b[k]) for i in others)
    if method == INNER_PRODUCT:
        # basis u_i = a_i e_k - a_k e_i of A, paired with the covector b
        nb = max(abs(c) for c in b)
        best = 0.0
        for i in others:
            pairing = a[i] * b[k] - a[k] * b[i]
            nu = max(abs(a[i]), abs(a[k]))
            best = max(best, abs(pairing) / (nu * nb))
        return best
    raise ValueError(f"unknown method {method!r}")


# -- product inequality ------------------------------------------------------

def _gauss(v):
    """Exact value as a pair of Fractions (re, im)."""
    if isinstance(v, tuple):
        return Fraction(v[0]), Fraction(v[1])
    if isinstance(v, CycRat):
        if not v.is_rational():
            raise ValueError("exact mode accepts rational or Gaussian rational values")
        return v.to_fraction(), Fraction(0)
    return Fraction(v), Fraction(0)


def _abs2(z):
    return z[0] * z[0] + z[1] * z[1]


def _sub(a, b):
    return a[0] - b[0], a[1] - b[1]


def _mul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _le_sum_of_roots(L2, A2, B2) -> bool:
    """sqrt(L2) <= sqrt(A2) + sqrt(B2), decided exactly."""
    d = L2 - A2 - B2
    return d <= 0 or d * d <= 4 * A2 * B2


@dataclass
class ProductReport:
    samples: int
    violations: int
    min_slack: float
    max_slack: float
    mode: str

    def to_json(self):
        return {
            "samples": self.samples,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "max_slack": self.max_slack,
            "mode": self.mode,
        }


def product_inequality_probe(hVals, gVals, exact=None, tol=1e-12) -> ProductReport:
    """Check |hg(p1) - hg(p2)| <= |h(p1)| |g(p1) - g(p2)| + |g(p2)| |h(p1) - h(p2)|.

    hVals and gVals are sequences of pairs (value at p1, value at p2).  Exact
    mode takes rationals or (re, im) pairs of rationals; float mode takes
    anything numpy can turn into complex arrays.
    """
    if exact is None:
        exact = not isinstance(hVals, np.ndarray) and all(
            isinstance(v, (int, Fraction, tuple, CycRat)) for pair in hVals for v in pair
        )
    if exact:
        violations = 0
        slacks = []
        for (h1, h2), (g1, g2) in zip(hVals, gVals):
            h1, h2, g1, g2 = map(_gauss, (h1, h2, g1, g2))
            L2 = _abs2(_sub(_mul(h1, g1), _mul(h2, g2)))
            A2 = _abs2(h1) * _abs2(_sub(g1, g2))
            B2 = _abs2(g2) * _abs2(_sub(h1, h2))
            if not _le_sum_of_roots(L2, A2, B2):
                violations += 1
            slacks.append(math.sqrt(A2) + math.sqrt(B2) - math.sqrt(L2))
        n = len(slacks)
        return ProductReport(n, violations, min(slacks, default=0.0), max(slacks, default=0.0), "exact")
    h = np.asarray(hVals, dtype=complex)
    g = np.asarray(gVals, dtype=complex)
    lhs = np.abs(h[:, 0] * g[:, 0] - h[:, 1] * g[:, 1])
    rhs = np.abs(h[:, 0]) * np.abs(g[:, 0] - g[:, 1]) + np.abs(g[:, 1]) * np.abs(h[:, 0] - h[:, 1])
    slack = rhs - lhs
    violations = int(np.sum(lhs > rhs + tol * (1 + rhs)))
    n = len(slack)
    lo = float(slack.min()) if n else 0.0
    hi = float(slack.max()) if n else 0.0
    return ProductReport(n, violations, lo, hi, "float")


# -- tangent commensurability --------------------------------------------------

@dataclass
class ProbeSample:
    points: tuple
    distances: tuple  # (total tangent, fiber tangent, point)
    ratio: float

    def to_json(self):
        return {
            "points": [[repr(c) for c in p] for p in self.points],
            "total_tangent": self.distances[0],
            "fiber_tangent": self.distances[1],
            "point": self.distances[2],
            "ratio": self.ratio,
        }


def _eval_series(s, t: float) -> complex:
    return sum(c.to_complex() * t ** float(e) for e, c in s.items())


def _evaluate(polys, point: dict):
    return [complex(sum(c.to_complex() * np.prod([point[v] ** e for v, e in zip(p.vars, mono)])
                        for mono, c in p.items())) for p in polys]


def tangent_commensurability_probe(fam, y0, nSamples=50, seed=0, tmax=0.25):
    """Sample point pairs on the fiber over y0 from its branches at small t and
    compare total and fiber tangent-plane distances with the point distance."""
    rng = random.Random(seed)
    f = fam.fiber_curve(y0)
    branches = puiseux_branches(f, 24)
    ycomplex = {k: v.to_complex() for k, v in _point(fam.param_vars, y0).items()}
    gradF = [fam.F.partial(v) for v in fam.vars]
    gradf = [f.partial(v) for v in fam.fiber_vars]
    out = []
    for _ in range(nSamples):
        pts = []
        for _k in range(2):
            b = branches[rng.randrange(len(branches))]
            t = rng.uniform(tmax / 20, tmax)
            z = {v: _eval_series(c, t) for v, c in zip(b.vars, b.comps)}
            pts.append(z)
        p1, p2 = pts
        d_point = max(abs(p1[v] - p2[v]) for v in fam.fiber_vars)
        if d_point == 0:
            continue
        try:
            full1 = _evaluate(gradF, {**p1, **ycomplex})
            full2 = _evaluate(gradF, {**p2, **ycomplex})
            fib1 = _evaluate(gradf, p1)
            fib2 = _evaluate(gradf, p2)
            d_total = hyperplane_distance(Hyperplane(full1), Hyperplane(full2))
            d_fiber = hyperplane_distance(Hyperplane(fib1), Hyperplane(fib2))
        except DegenerateInput:
            continue
        denom = max(d_fiber, d_point)
        ratio = d_total / denom if denom else math.inf
        order = tuple(fam.fiber_vars)
        out.append(ProbeSample(
            (tuple(p1[v] for v in order), tuple(p2[v] for v in order)),
            (d_total, d_fiber, d_point),
            ratio,
        ))
    return out


# -- Lipschitz exponent along a pair-curve -------------------------------------

def _orders(series):
    return [s.order() if s.has_known_order() else None for s in series]


def _diff_order(a, b):
    d = a - b
    if d.is_exact_zero():
        return None
    if not d.has_known_order():
        raise TruncationInsufficient("difference is zero to the available precision")
    return d.order()


def lipschitz_exponent_probe(h: Poly, I: IdealOnCurve, phi: PairCurve):
    """ord(q1 - q2) - min(ord dz, ord dT) along phi, where q = h/g for a generator
    g of minimal order and T_k = g_k/g.  On a one-sided curve it is
    ord(h o phi) minus the order of the pulled-back ideal.  Returns math.inf
    when the quotient difference vanishes identically.
    """
    coord = tuple(I.vars)
    h = h.with_vars(coord)
    gens = [g.with_vars(coord) for g in I.gens]
    if phi.b1 is None and phi.b2 is None:
        raise DegenerateCurve("both sides of the curve are constant")
    if phi.b1 is None or phi.b2 is None:
        side = phi.side(1 if phi.b2 is None else 2, coord)
        hs = h.substitute(side)
        gs = _orders(g.substitute(side) for g in gens)
        known = [o for o in gs if o is not None]
        if not known or not hs.has_known_order():
            raise DegenerateCurve("ideal or test element vanishes along the curve")
        return hs.order() - min(known)
    s1, s2 = phi.side(1, coord), phi.side(2, coord)
    g1 = [g.substitute(s1) for g in gens]
    g2 = [g.substitute(s2) for g in gens]
    o1, o2 = _orders(g1), _orders(g2)
    cands = [k for k in range(len(gens)) if o1[k] is not None and o2[k] is not None]
    if not cands:
        raise DegenerateCurve("no generator has a known order on both sides")
    k = min(cands, key=lambda j: (o1[j] + o2[j], j))
    base = o1[k] + o2[k]

    def quotient_diff(a1, a2):
        # ord(a1/g1 - a2/g2) via the cross product, so no division is needed
        o = _diff_order(a1 * g2[k], a2 * g1[k])
        return None if o is None else o - base

    h1, h2 = h.substitute(s1), h.substitute(s2)
    dz = [_diff_order(s1[v], s2[v]) for v in coord]
    dT = [quotient_diff(g1[j], g2[j]) for j in cands if j != k]
    known = [o for o in dz + dT if o is not None]
    if not known:
        raise DegenerateCurve("the two sides of the curve coincide")
    dq = quotient_diff(h1, h2)
    if dq is None:
        return math.inf
    e = dq - min(known)
    return int(e) if e.denominator == 1 else e


def pair_values(h: Poly, phi: PairCurve, coord_vars, t: float):
    """(h o phi_1(t), h o phi_2(t)) as complex numbers."""
    out = []
    for k in (1, 2):
        side = phi.side(k, coord_vars)
        point = {v: _eval_series(s, t) for v, s in side.items()}
        out.append(_evaluate([h], point)[0])
    return tuple(out)

