"""Infinitesimal Lipschitz and W checks for families of isolated plane-curve
singularities F(z, y) = 0, where y are parameters and z fiber coordinates.

All checks are fiberwise: the parameters are frozen at a sample value y0 and
membership is tested on the fiber curve.  A CertifiedNo is a genuine
failure of the condition at y0; CertifiedYes means the fiberwise inclusion
holds by an explicit division identity.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cyclo import CycRat
from .doubling import SearchBound, double_ideal, saturation_membership
from .errors import (
    LipsatError,
    NonIsolatedFiber,
    NonIsolatedSection,
    NotAFamilyOverY,
    NotFiniteColength,
    NotOnVariety,
)
from .icurve import IdealOnCurve, colength, division_certificate, ic_membership
from .linalg import rank
from .poly import Poly
from .verdict import OPEN, YES, Verdict, merge

__all__ = [
    "Family",
    "family_ideals",
    "check_ilA",
    "check_ilmY",
    "check_W",
    "cosupport_rank",
    "parameter_sweep",
    "SweepReport",
    "grassmann_chart",
    "hyperplane_section_check",
    "CONDITIONS",
]

CONDITIONS = ("iL_A", "iL_mY", "W")


class Family:
    """F with fiber coordinates z and parameters y; mY is the ideal (z) of Y = {z = 0}."""

    def __init__(self, F, fiber_vars, param_vars):
        self.fiber_vars = tuple(fiber_vars)
        self.param_vars = tuple(param_vars)
        self.vars = self.fiber_vars + self.param_vars
        self.F = F.with_vars(self.vars)
        self.Jz = [self.F.partial(z) for z in self.fiber_vars]
        self.JY = [self.F.partial(y) for y in self.param_vars]
        self.mY = [Poly.var(z, self.vars) for z in self.fiber_vars]

    def fiber(self, y0) -> dict:
        y0 = _point(self.param_vars, y0)
        return {v: Poly.const(c, ()) for v, c in y0.items()}

    def restrict(self, p: Poly, y0) -> Poly:
        vals = _point(self.param_vars, y0)
        return p.subs(vals).with_vars(self.fiber_vars)

    def fiber_curve(self, y0) -> Poly:
        return self.restrict(self.F, y0)

    def mY_Jz(self):
        return [m * g for m in self.mY for g in self.Jz]

    def mY_J(self):
        return [m * g for m in self.mY for g in self.Jz + self.JY]


def _point(names, values) -> dict:
    if isinstance(values, dict):
        out = {k: _cyc(v) for k, v in values.items()}
    else:
        values = list(values) if isinstance(values, (list, tuple)) else [values]
        if len(values) != len(names):
            raise ValueError(f"expected {len(names)} parameter values")
        out = {k: _cyc(v) for k, v in zip(names, values)}
    for k in names:
        if k not in out:
            raise ValueError(f"missing value for parameter {k}")
    return out


def _cyc(v):
    if isinstance(v, CycRat):
        return v
    if isinstance(v, str):
        from .poly import parse_number

        return parse_number(v)
    return CycRat.rational(Fraction(v))


def family_ideals(F: Poly, fiber_vars, param_vars) -> Family:
    """Build a family, checking that the parameter axis lies in the singular locus."""
    allv = set(fiber_vars) | set(param_vars)
    for v in F.used_vars():
        if v not in allv:
            raise ValueError(f"variable {v} is neither a fiber coordinate nor a parameter")
    fam = Family(F, fiber_vars, param_vars)
    on_axis = {z: 0 for z in fam.fiber_vars}
    for name, p in [("F", fam.F)] + [(f"dF/d{v}", fam.F.partial(v)) for v in fam.vars]:
        r = p.subs(on_axis)
        if not r.is_zero():
            raise NotAFamilyOverY(f"{name} restricted to the parameter axis is {r}, not identically zero")
    return fam


def _check_isolated(fam: Family, y0) -> Poly:
    f = fam.fiber_curve(y0)
    if len(fam.fiber_vars) != 2:
        raise ValueError("fiberwise checks need exactly two fiber coordinates")
    jac = [f.partial(z) for z in fam.fiber_vars]
    try:
        colength([f] + jac, fam.fiber_vars, max_degree=48)
    except NotFiniteColength:
        raise NonIsolatedFiber(f"fiber {f} at {y0} does not have an isolated singularity") from None
    return f


def _fiber_ideal(fam, gens, y0, f):
    gs = [fam.restrict(g, y0) for g in gens]
    gs = [g for g in gs if not g.is_zero()]
    return IdealOnCurve(gs, f, vars=fam.fiber_vars)


def _saturation_check(fam, module_gens, y0, B, label):
    f = _check_isolated(fam, y0)
    if not fam.JY:
        return Verdict(YES, details={"condition": label, "note": "no parameters: vacuous"})
    I = _fiber_ideal(fam, module_gens, y0, f)
    verdicts = []
    for k, g in enumerate(fam.JY):
        h = fam.restrict(g, y0)
        v = saturation_membership(h, I, B)
        v.details.setdefault("generator", str(g))
        verdicts.append(v)
    out = merge(verdicts)
    out.details["condition"] = label
    out.details["fiber"] = str(f)
    out.details["scope"] = "fiberwise pair-curves and one-sided curves"
    return out


def check_ilA(fam: Family, y0, B: SearchBound = None) -> Verdict:
    return _saturation_check(fam, fam.Jz, y0, B, "iL_A")


def check_ilmY(fam: Family, y0, B: SearchBound = None, full_jacobian=False) -> Verdict:
    gens = fam.mY_J() if full_jacobian else fam.mY_Jz()
    return _saturation_check(fam, gens, y0, B, "iL_mY" + (" (full Jacobian)" if full_jacobian else ""))


def check_W(fam: Family, y0, B: SearchBound = None) -> Verdict:
    """Integral closure (undoubled) of JY in mY*Jz along fiber branches."""
    f = _check_isolated(fam, y0)
    B = (B or SearchBound()).resolved(f)
    if not fam.JY:
        return Verdict(YES, details={"condition": "W", "note": "no parameters: vacuous"})
    I = _fiber_ideal(fam, fam.mY_Jz(), y0, f)
    verdicts = []
    for g in fam.JY:
        h = fam.restrict(g, y0)
        cert = division_certificate(h, I.gens, I.curve, B.div)
        if cert is not None:
            verdicts.append(Verdict(YES, certificate=cert))
            continue
        v = ic_membership(h, I)
        if v.is_no:
            verdicts.append(v)
        else:
            verdicts.append(Verdict(OPEN, bound=B, details={"fiber_closure": "holds on every fiber branch"}))
    out = merge(verdicts)
    out.details["condition"] = "W"
    out.details["fiber"] = str(f)
    return out


def cosupport_rank(fam: Family, z, zp, y0, module="mYJz") -> int:
    """Rank of the doubled generator matrix at the point pair (z, z', y0)."""
    pz = dict(zip(fam.fiber_vars, [_cyc(c) for c in z]))
    pzp = dict(zip(fam.fiber_vars, [_cyc(c) for c in zp]))
    py = _point(fam.param_vars, y0)
    for pt in (pz, pzp):
        val = fam.F.evaluate({**pt, **py})
        if val:
            raise NotOnVariety(f"F does not vanish at {dict((k, str(v)) for k, v in pt.items())}")
    gens = {"mYJz": fam.mY_Jz(), "Jz": fam.Jz, "mYJ": fam.mY_J()}[module]
    M = double_ideal(gens, fam.fiber_vars, fam.param_vars)
    point = {}
    for v in fam.fiber_vars:
        point[v] = pz[v]
        point[v + "'"] = pzp[v]
    point.update(py)
    cols = []
    for _, (a, b) in M.gen_list:
        va, vb = a.evaluate(point), b.evaluate(point)
        col = {}
        if va:
            col[0] = va
        if vb:
            col[1] = vb
        if col:
            cols.append(col)
    return rank(cols)


def _fmt_sample(s) -> str:
    if isinstance(s, dict):
        return ", ".join(f"{k}={v}" for k, v in s.items())
    if isinstance(s, (list, tuple)):
        return ",".join(str(v) for v in s)
    return str(s)


class SweepReport:
    def __init__(self, samples, verdicts, seed=None):
        self.samples = list(samples)
        self.verdicts = verdicts  # list of dict condition -> kind or error name
        self.seed = seed
        sigs = [tuple(v.get(c) for c in CONDITIONS) for v in verdicts]
        counts = {}
        for s in sigs:
            counts[s] = counts.get(s, 0) + 1
        majority = max(counts, key=lambda s: (counts[s], -sigs.index(s))) if sigs else None
        self.majority = majority
        self.exceptional = [_fmt_sample(x) for x, s in zip(self.samples, sigs) if s != majority]
        self.agreeing = counts.get(majority, 0)

    @property
    def summary(self):
        return {
            "samples": len(self.samples),
            "agreeing": self.agreeing,
            "majority": dict(zip(CONDITIONS, self.majority)) if self.majority else {},
            "exceptional": self.exceptional,
        }

    def to_json(self):
        return {
            "schema": "lipsat.sweep/1",
            "seed": self.seed,
            "rows": [
                {"sample": _fmt_sample(s), "verdicts": dict(sorted(v.items()))}
                for s, v in zip(self.samples, self.verdicts)
            ],
            "summary": self.summary,
        }


def parameter_sweep(fam: Family, samples, B: SearchBound = None, seed=None) -> SweepReport:
    rows = []
    for s in samples:
        row = {}
        for name, fn in (("iL_A", check_ilA), ("iL_mY", check_ilmY), ("W", check_W)):
            try:
                row[name] = fn(fam, s, B).kind
            except LipsatError as e:
                row[name] = type(e).__name__
        rows.append(row)
    return SweepReport(samples, rows, seed)


def random_samples(n, seed=0, lo=-10, hi=10):
    """Reproducible rational parameter samples."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        v = Fraction(rng.randint(lo, hi), rng.randint(1, 4))
        if v not in out:
            out.append(v)
    return out


def grassmann_chart(F: Poly, chart=None, a_names=None):
    """G = F o beta with beta(z, a) = (z_1, ..., z_{n-1}, sum a_i z_i) in the chart
    where coordinate ``chart`` (default the last) is solved for.

    Returns (G, dGda, JzG, identity_holds).
    """
    zs = list(F.vars)
    n = len(zs)
    k = n - 1 if chart is None else int(chart)
    if not 0 <= k < n:
        raise ValueError(f"chart index {k} out of range")
    others = [z for i, z in enumerate(zs) if i != k]
    a_names = list(a_names) if a_names else [f"a{i + 1}" for i in range(n - 1)]
    newv = tuple(others) + tuple(a_names)
    lin = Poly.const(0, newv)
    for a, z in zip(a_names, others):
        lin = lin + Poly.var(a, newv) * Poly.var(z, newv)
    beta = {z: Poly.var(z, newv) for z in others}
    beta[zs[k]] = lin
    G = F.subs(beta).with_vars(newv)
    dFdzk = F.partial(zs[k]).subs(beta).with_vars(newv)
    dGda = [G.partial(a) for a in a_names]
    JzG = [G.partial(z) for z in others]
    ok = all(d == Poly.var(z, newv) * dFdzk for d, z in zip(dGda, others))
    return G, dGda, JzG, ok


def hyperplane_section_check(F: Poly, H, B: SearchBound = None) -> Verdict:
    """Saturation test on the section of F = 0 by the hyperplane sum H_i z_i = 0."""
    zs = list(F.vars)
    if len(zs) != 3:
        raise ValueError("hyperplane sections are implemented for surfaces in three variables")
    H = [Fraction(h) for h in H]
    if not any(H):
        raise ValueError("hyperplane needs a nonzero coefficient")
    k = max(i for i, h in enumerate(H) if h)
    a_vals = [-H[i] / H[k] for i in range(3) if i != k]
    G, dGda, JzG, ok = grassmann_chart(F, k)
    others = [z for i, z in enumerate(zs) if i != k]
    at = {f"a{i + 1}": CycRat.rational(v) for i, v in enumerate(a_vals)}
    g = G.subs(at).with_vars(tuple(others))
    tests = [d.subs(at).with_vars(tuple(others)) for d in dGda]
    jac = [j.subs(at).with_vars(tuple(others)) for j in JzG]
    if g.is_zero():
        raise NonIsolatedSection("the hyperplane is contained in the surface")
    if g.constant_term():
        raise ValueError("surface does not pass through the origin")
    if g.order() <= 1:
        return Verdict(YES, details={"section": str(g), "note": "section is smooth: vacuous"})
    try:
        colength([g] + jac, tuple(others), max_degree=48)
    except NotFiniteColength:
        raise NonIsolatedSection(f"section {g} does not have an isolated singularity") from None
    gens = [j for j in jac if not j.is_zero()]
    I = IdealOnCurve(gens, g, vars=tuple(others))
    verdicts = []
    for h in tests:
        if h.is_zero():
            verdicts.append(Verdict(YES, details={"note": "test element vanishes on the section"}))
            continue
        verdicts.append(saturation_membership(h, I, B))
    out = merge(verdicts)
    out.details["section"] = str(g)
    out.details["chart_identity"] = ok
    return out
