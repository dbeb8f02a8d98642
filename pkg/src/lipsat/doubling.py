"""Doubled modules on X x X and Lipschitz-saturation membership.

For an ideal I = (f_1, ..., f_r) the doubled module I_D is generated by
(f_i, f_i'), (d_j f_i, 0) and (0, d_j f_i'), where f' is f in primed
variables and d_j = z_j - z_j'.  This finite list spans the same module as
all doubles h_D, h in I, because (a f)_D = a(z) f_D + (0, (a(z') - a(z)) f(z'))
and a(z') - a(z) lies in the ideal of the diagonal.

h is in the saturation I_S iff h_D is in the integral closure of I_D; the
closure is tested along pair-curves t -> (phi_1(t), phi_2(t)) built from
branches of the curve.  A failing curve is a certificate of non-membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .cyclo import CycRat
from .errors import EmptyIdeal, TruncationInsufficient
from .icurve import (
    IdealOnCurve,
    DvrMatrix,
    dvr_membership,
    division_certificate,
    ic_membership,
    trunc_ceiling,
)
from .poly import Poly, parse_poly
from .puiseux import Branch
from .series import PSeries
from .verdict import NO, OPEN, YES, Verdict

__all__ = [
    "DoubledModule",
    "double_ideal",
    "contraction",
    "Twist",
    "Reparam",
    "PairCurve",
    "SearchBound",
    "pullback_doubled",
    "closure_membership_on_curve",
    "saturation_membership",
    "pair_curves",
    "prime",
]


def prime(name: str) -> str:
    return name + "'"


def prime_poly(p: Poly, coord_vars, allv) -> Poly:
    """p with every coordinate variable replaced by its primed copy, over allv."""
    used = p.used_vars()
    return p.with_vars(used).rename({v: prime(v) for v in coord_vars if v in used}).with_vars(allv)


class DoubledModule:
    def __init__(self, base_gens, coord_vars, relative_vars, gen_list, diag):
        self.base_gens = base_gens
        self.coord_vars = coord_vars
        self.relative_vars = relative_vars
        self.gen_list = gen_list  # list of (label, (Poly, Poly))
        self.diag = diag

    @property
    def vars(self):
        return self.coord_vars + tuple(prime(v) for v in self.coord_vars) + self.relative_vars

    def vectors(self):
        return [vec for _, vec in self.gen_list]

    def __len__(self):
        return len(self.gen_list)


def double_ideal(gens, coord_vars, relative_vars=()) -> DoubledModule:
    gens = list(gens)
    if not gens:
        raise EmptyIdeal("cannot double an empty ideal")
    coord_vars = tuple(coord_vars)
    relative_vars = tuple(relative_vars)
    if set(coord_vars) & set(relative_vars):
        raise ValueError("relative variables must be disjoint from coordinates")
    allv = coord_vars + tuple(prime(v) for v in coord_vars) + relative_vars
    base = [g.with_vars(allv) for g in gens]
    for g in base:
        if g.constant_term():
            raise ValueError(f"generator {g} does not vanish at the origin")
    primed = [prime_poly(g, coord_vars, allv) for g in base]
    diag = [Poly.var(v, allv) - Poly.var(prime(v), allv) for v in coord_vars]
    zero = Poly.const(0, allv)
    gl = []
    for i, (g, gp) in enumerate(zip(base, primed)):
        gl.append((f"D{i}", (g, gp)))
    for j, d in enumerate(diag):
        for i, (g, gp) in enumerate(zip(base, primed)):
            gl.append((f"L{j},{i}", (d * g, zero)))
            gl.append((f"R{j},{i}", (zero, d * gp)))
    return DoubledModule(base, coord_vars, relative_vars, gl, diag)


def contraction(weights, M: DoubledModule) -> list:
    """w1*a + w2*b for every generator (a, b); zero results are dropped."""
    w1, w2 = weights
    out = []
    for _, (a, b) in M.gen_list:
        p = a.scale(w1) + b.scale(w2)
        if not p.is_zero():
            out.append(p)
    return out


# -- pair-curves -------------------------------------------------------------------

@dataclass(frozen=True)
class Twist:
    """The constant scale * zeta_order^power."""

    order: int = 1
    power: int = 0
    scale: Fraction = Fraction(1)

    def value(self) -> CycRat:
        return CycRat.zeta(self.order, self.power) * self.scale

    def is_one(self) -> bool:
        return self.value() == 1

    def __str__(self):
        root = f"(z{self.order})^{self.power}" if self.order > 1 else ""
        if not root:
            return str(self.scale)
        if self.scale == 1:
            return root
        return f"{self.scale}*{root}"

    @classmethod
    def parse(cls, text: str) -> "Twist":
        import re

        m = re.fullmatch(r"\s*(?:([-0-9/]+)\s*\*\s*)?\(z(\d+)\)\^(\d+)\s*", text)
        if m:
            scale = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            return cls(int(m.group(2)), int(m.group(3)), scale)
        return cls(1, 0, Fraction(text.strip()))


@dataclass(frozen=True)
class Reparam:
    """u(t) = c t^e + d t^(e+1)."""

    exponent: int = 1
    twist: Twist = Twist()
    perturb: Fraction = Fraction(0)

    def series(self) -> PSeries:
        terms = {self.exponent: self.twist.value()}
        if self.perturb:
            terms[self.exponent + 1] = CycRat.rational(self.perturb)
        return PSeries(terms)

    def to_json(self):
        return {"exponent": self.exponent, "twist": str(self.twist), "perturb": str(self.perturb)}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["exponent"]), Twist.parse(d["twist"]), Fraction(d.get("perturb", "0")))

    def __str__(self):
        s = f"{self.twist}*t^{self.exponent}" if not self.twist.is_one() else f"t^{self.exponent}"
        if self.perturb:
            s += f" + {self.perturb}*t^{self.exponent + 1}"
        return s


class PairCurve:
    """t -> (b1(u1(t)), b2(u2(t))); a side given as None is the zero map."""

    def __init__(self, b1, b2, u1=None, u2=None, index1=None, index2=None, relative=None):
        self.b1, self.b2 = b1, b2
        self.u1 = u1 if u1 is not None else Reparam()
        self.u2 = u2 if u2 is not None else Reparam()
        self.index1, self.index2 = index1, index2
        self.relative = dict(relative or {})

    def side(self, k: int, coord_vars) -> dict:
        b, u = (self.b1, self.u1) if k == 1 else (self.b2, self.u2)
        if b is None:
            return {v: PSeries.zero() for v in coord_vars}
        us = u.series()
        return {v: c.compose(us) for v, c in zip(b.vars, b.comps)}

    def assignment(self, M: DoubledModule) -> dict:
        s1 = self.side(1, M.coord_vars)
        s2 = self.side(2, M.coord_vars)
        out = {}
        for v in M.coord_vars:
            out[v] = s1[v]
            out[prime(v)] = s2[v]
        for v in M.relative_vars:
            if v not in self.relative:
                raise ValueError(f"pair-curve does not assign the shared variable {v}")
            out[v] = self.relative[v]
        return out

    def is_diagonal(self, coord_vars) -> bool:
        if self.b1 is None or self.b2 is None:
            return False
        s1, s2 = self.side(1, coord_vars), self.side(2, coord_vars)
        return all(s1[v] == s2[v] for v in coord_vars)

    def twist(self):
        return self.u2.twist

    def describe(self) -> str:
        def one(b, u, idx):
            if b is None:
                return "0"
            return f"b{idx}({u})"

        return f"({one(self.b1, self.u1, self.index1)}, {one(self.b2, self.u2, self.index2)})"

    def to_json(self):
        def side(b, u, idx):
            if b is None:
                return None
            return {"branch_index": idx, "branch": b.to_json(), "reparam": u.to_json()}

        return {
            "side1": side(self.b1, self.u1, self.index1),
            "side2": side(self.b2, self.u2, self.index2),
            "twist": str(self.u2.twist),
            "exponents": [self.u1.exponent, self.u2.exponent],
            "relative": {k: str(v) for k, v in sorted(self.relative.items())},
        }

    @classmethod
    def from_json(cls, d) -> "PairCurve":
        def side(s):
            if s is None:
                return None, Reparam(), None
            return Branch.from_json(s["branch"]), Reparam.from_json(s["reparam"]), s.get("branch_index")

        b1, u1, i1 = side(d["side1"])
        b2, u2, i2 = side(d["side2"])
        # the top-level twist is authoritative
        if b2 is not None and "twist" in d:
            u2 = Reparam(u2.exponent, Twist.parse(d["twist"]), u2.perturb)
        return cls(b1, b2, u1, u2, i1, i2)


@dataclass
class SearchBound:
    exp: int = 6
    root: int = 0  # 0 means 2 * deg(f)
    div: int = 10
    perturb: tuple = (Fraction(0),)
    trunc: int = 24
    ceiling: int = 0  # 0 means the global default / environment

    def resolved(self, curve: Poly) -> "SearchBound":
        root = self.root or 2 * max(curve.degree(), 1)
        return SearchBound(self.exp, root, self.div, tuple(self.perturb), self.trunc, self.ceiling)

    def to_json(self):
        return {
            "exp": self.exp,
            "root": self.root,
            "div": self.div,
            "perturb": [str(p) for p in self.perturb],
            "ceiling": trunc_ceiling(self.ceiling or None),
        }

    def __str__(self):
        return f"exp<={self.exp}, root<={self.root}, div<={self.div}"


def _coprime_pairs(emax):
    pairs = [(a, b) for a in range(1, emax + 1) for b in range(1, emax + 1) if gcd(a, b) == 1]
    return sorted(pairs, key=lambda p: (max(p), p[0] + p[1], p[0]))


def _ramification(b: Branch) -> int:
    """Exponent M of the first component when it is the monomial t^M."""
    items = b.comps[0].items()
    if len(items) == 1 and b.comps[0].is_exact:
        e = items[0][0]
        if e.denominator == 1:
            return int(e)
    return 1


def _twists(ram: int, root: int):
    seen = set()
    out = [Twist()]
    orders = [n for n in range(ram, 1, -1) if ram % n == 0] + list(range(2, root + 1))
    for n in orders:
        for k in range(1, n):
            if gcd(k, n) != 1:
                continue
            key = Fraction(k, n)
            if key in seen:
                continue
            seen.add(key)
            out.append(Twist(n, k))
    out.append(Twist(1, 0, Fraction(3, 2)))
    return out


def pair_curves(branches, B: SearchBound):
    """Enumerate (i, Reparam, j, Reparam) specs in a fixed order; j may be None."""
    n = len(branches)
    for e1, e2 in _coprime_pairs(B.exp):
        for i in range(n):
            for j in range(n):
                tw = _twists(_ramification(branches[i]), B.root)
                for d in B.perturb:
                    for t in tw:
                        if i == j and e1 == e2 and not d and t.is_one():
                            continue  # the diagonal adds nothing beyond ordinary closure
                        yield (i, Reparam(e1), j, Reparam(e2, t, Fraction(d)))
    for i in range(n):
        yield (i, Reparam(), None, Reparam())
        yield (None, Reparam(), i, Reparam())


def build_pair_curve(entry, branches) -> PairCurve:
    i, u1, j, u2 = entry
    return PairCurve(
        None if i is None else branches[i],
        None if j is None else branches[j],
        u1,
        u2,
        i,
        j,
    )


def pullback_doubled(M: DoubledModule, phi: PairCurve, T=None) -> DvrMatrix:
    a = phi.assignment(M)
    cols = []
    for _, (p, q) in M.gen_list:
        cols.append((p.substitute(a), q.substitute(a)))
    return DvrMatrix(cols, trunc=T, labels=[lab for lab, _ in M.gen_list])


class PairCurveWitness:
    """A pair-curve along which the double of h escapes the pulled-back module."""

    def __init__(self, curve, h, M, target_orders, residual_row, residual_order, bound, extra=None):
        self.curve = curve
        self.h = h
        self.module = M
        self.target_orders = target_orders
        self.residual_row = residual_row
        self.residual_order = residual_order
        self.bound = bound
        self.extra = dict(extra or {})

    @property
    def gap(self) -> str:
        b = "inf" if self.bound is None else str(self.bound)
        return f"{self.residual_order} < {b}"

    def summary(self):
        return f"curve {self.curve.describe()} twist {self.curve.twist()}: order gap {self.gap}"

    def to_json(self):
        d = {
            "type": "pair-curve",
            "h": str(self.h),
            "gens": [str(g) for g in self.module.base_gens],
            "coord_vars": list(self.module.coord_vars),
            "relative_vars": list(self.module.relative_vars),
            "curve": self.curve.to_json(),
            "target_orders": [str(o) for o in self.target_orders],
            "residual_row": self.residual_row,
            "residual_order": str(self.residual_order),
            "pivot": None if self.bound is None else str(self.bound),
            "gap": self.gap,
        }
        d.update({k: str(v) for k, v in self.extra.items()})
        return d


def _curve_verdict(h: Poly, M: DoubledModule, phi: PairCurve, T):
    a = phi.assignment(M)
    allv = M.vars
    hh = h.with_vars(allv)
    target = (hh.substitute(a), prime_poly(hh, M.coord_vars, allv).substitute(a))
    D = pullback_doubled(M, phi, T)
    if phi.is_diagonal(M.coord_vars):
        D = DvrMatrix([(c[0],) for c in D.cols], trunc=D.trunc, labels=D.labels)
        v = dvr_membership([target[0]], D)
    else:
        v = dvr_membership(list(target), D)
    return v, target


def closure_membership_on_curve(h: Poly, M: DoubledModule, phi: PairCurve, T=None, ceiling=None) -> Verdict:
    """Is (h o phi_1, h o phi_2) in the module pulled back along phi?"""
    ceiling = trunc_ceiling(ceiling)
    T = 24 if T is None else T
    while True:
        try:
            v, target = _curve_verdict(h, M, phi, T)
            break
        except TruncationInsufficient:
            T *= 2
            if T > ceiling:
                raise
    if v.is_no:
        w = v.witness
        bound = w.pivots[w.row]
        orders = [s.order() for s in target]
        extra = _contraction_data(h, M, phi)
        witness = PairCurveWitness(phi, h, M, orders, w.row, w.valuation, bound, extra)
        return Verdict(NO, witness=witness, details={"residual": w.to_json()})
    return Verdict(YES, certificate=v.certificate, details={"curve": phi.describe()})


def _contraction_data(h, M, phi):
    """Valuations of the (1,-1) contraction along phi, for the record."""
    a = phi.assignment(M)
    gens = contraction((1, -1), M)
    vals = [g.substitute(a) for g in gens]
    known = [s.order() for s in vals if s.has_known_order()]
    hh = h.with_vars(M.vars)
    diff = hh.substitute(a) - prime_poly(hh, M.coord_vars, M.vars).substitute(a)
    out = {}
    if known:
        out["contraction_valuation"] = min(known)
    out["target_contraction_valuation"] = diff.order() if diff.has_known_order() else "inf"
    return out


def saturation_membership(h: Poly, I: IdealOnCurve, B: SearchBound = None) -> Verdict:
    """Lipschitz-saturation membership of h in I on the curve germ."""
    B = (B or SearchBound()).resolved(I.curve)
    h = h.with_vars(I.vars)
    if h.constant_term():
        raise ValueError("h must vanish at the origin")
    ceiling = trunc_ceiling(B.ceiling or None)
    M = double_ideal(I.gens, I.vars)
    # an explicit division puts h in I itself, so nothing else needs checking
    cert = division_certificate(h, I.gens, I.curve, B.div)
    if cert is not None:
        return Verdict(YES, certificate=cert, bound=B)
    ic = ic_membership(h, I, ceiling=ceiling)
    if ic.is_no:
        idx = ic.witness.index
        phi = build_pair_curve((idx, Reparam(), None, Reparam()), I.branches)
        v = closure_membership_on_curve(h, M, phi, T=B.trunc, ceiling=ceiling)
        if v.is_no:
            v.details["closure"] = ic.witness.to_json()
            return v
        # an order drop on one branch must show up on the one-sided curve
        raise AssertionError("one-sided curve failed to reproduce a closure violation")
    tested = 0
    for entry in pair_curves(I.branches, B):
        T = B.trunc
        while True:
            branches = I.branches_at(T)
            phi = build_pair_curve(entry, branches)
            try:
                v, _ = _curve_verdict(h, M, phi, T)
                break
            except TruncationInsufficient:
                T *= 2
                if T > ceiling:
                    raise
                I.deeper(T)
        tested += 1
        if v.is_no:
            return closure_membership_on_curve(h, M, phi, T=T, ceiling=ceiling)
    return Verdict(OPEN, bound=B, details={"curves_tested": tested})


def replay_pair_witness(data: dict):
    """Recompute a pair-curve witness; returns (confirmed, recomputed gap)."""
    coord = tuple(data["coord_vars"])
    rel = tuple(data.get("relative_vars", ()))
    gens = [parse_poly(g, coord + rel) for g in data["gens"]]
    h = parse_poly(data["h"], coord + rel)
    M = double_ideal(gens, coord, rel)
    phi = PairCurve.from_json(data["curve"])
    v = closure_membership_on_curve(h, M, phi)
    if not v.is_no:
        return False, None
    w = v.witness
    return w.gap == data["gap"], w.gap

