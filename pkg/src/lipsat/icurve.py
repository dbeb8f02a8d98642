"""Integral closure and multiplicities of ideals on plane-curve germs, and
column reduction of matrices over the one-variable series ring.

Membership in the integral closure is decided on the normalization: h lies in
the closure of I iff on every branch the order of h is at least the least
order of a generator.
"""

from __future__ import annotations

import os
from fractions import Fraction
from itertools import combinations_with_replacement

from .cyclo import CycRat
from .errors import (
    EmptyIdeal,
    NotFiniteColength,
    NotNested,
    TruncationInsufficient,
)
from .linalg import SpanBasis
from .poly import Poly
from .puiseux import Branch, puiseux_branches, verify_branch
from .series import PSeries
from .verdict import NO, YES, Verdict

__all__ = [
    "IdealOnCurve",
    "pullback_ideal",
    "ic_membership",
    "ideal_multiplicity",
    "colength",
    "DvrMatrix",
    "dvr_reduce",
    "dvr_membership",
    "pair_multiplicity_dvr",
    "division_certificate",
    "DivisionCertificate",
    "trunc_ceiling",
]

DEFAULT_CEILING = 512
MARGIN = 4


def trunc_ceiling(default=None) -> int:
    env = os.environ.get("LIPSAT_TRUNC_CEILING")
    if env:
        return int(env)
    return DEFAULT_CEILING if default is None else int(default)


def _fmt_order(o):
    return str(o)


class IdealOnCurve:
    """An ideal (given by ambient generators) on the germ of the curve f = 0."""

    def __init__(self, gens, curve: Poly, branches=None, vars=None, trunc=None):
        gens = [g for g in gens]
        if not gens:
            raise EmptyIdeal("an ideal needs at least one generator")
        self.vars = tuple(vars) if vars is not None else curve.vars
        if len(self.vars) != 2:
            raise ValueError("curves live in two variables")
        self.curve = curve.with_vars(self.vars)
        self.gens = [g.with_vars(self.vars) for g in gens]
        for g in self.gens:
            if g.constant_term():
                raise ValueError(f"generator {g} does not vanish at the origin")
        self._trunc = int(trunc) if trunc is not None else 24
        if branches is not None:
            for b in branches:
                if not verify_branch(self.curve, b):
                    raise ValueError(f"branch {b} does not lie on {self.curve}")
            self._branches = list(branches)
            self._user = True
        else:
            self._branches = None
            self._user = False

    @property
    def branches(self) -> list:
        return self.branches_at(self._trunc)

    def branches_at(self, T: int) -> list:
        if self._branches is None or (not self._user and T > self._trunc and not self._all_exact()):
            self._branches = puiseux_branches(self.curve, T)
            self._trunc = max(self._trunc, T)
        return self._branches

    def _all_exact(self):
        return all(b.truncation() is None for b in self._branches)

    def deeper(self, T: int) -> bool:
        """Recompute branches at precision T; False if nothing can improve."""
        if self._user or (self._branches is not None and self._all_exact()):
            return False
        self.branches_at(T)
        return True


def _assign(b: Branch):
    return dict(zip(b.vars, b.comps))


def _min_order(series):
    """Least order among series, certified against unknown tails.

    Returns (order, exactly_zero); raises TruncationInsufficient when an
    unknown tail could undercut the minimum.
    """
    known = [s.order() for s in series if s.has_known_order()]
    unknown = [s.trunc for s in series if not s.has_known_order() and s.trunc is not None]
    if not known:
        if unknown:
            raise TruncationInsufficient("every generator pullback vanishes to the truncation order")
        return None, True
    m = min(known)
    if unknown and min(unknown) < m:
        raise TruncationInsufficient("a generator pullback is unknown below the minimal order")
    return m, False


def pullback_ideal(I: IdealOnCurve, b: Branch):
    """(generator pullbacks along b, least order among them)."""
    vals = [g.substitute(_assign(b)) for g in I.gens]
    m, zero = _min_order(vals)
    if zero:
        raise TruncationInsufficient("ideal pulls back to zero along this branch (order >= T)")
    return vals, m


class BranchWitness:
    def __init__(self, index, branch, order_h, min_order):
        self.index = index
        self.branch = branch
        self.order_h = order_h
        self.min_order = min_order

    def summary(self):
        return f"branch {self.index} {self.branch.short()}: order {self.order_h} < {self.min_order}"

    def to_json(self):
        return {
            "type": "branch",
            "branch_index": self.index,
            "branch": self.branch.to_json(),
            "order_h": str(self.order_h),
            "min_order": str(self.min_order),
            "gap": f"{self.order_h} < {self.min_order}",
        }


class OrderTable:
    """Per-branch orders backing a positive closure verdict."""

    def __init__(self, rows):
        self.rows = rows  # (index, branch, order_h, min_order)

    def summary(self):
        return "; ".join(f"branch {i}: {oh} >= {mo}" for i, _, oh, mo in self.rows)

    def to_json(self):
        return {
            "type": "orders",
            "branches": [
                {"branch_index": i, "branch": b.short(), "order_h": str(oh), "min_order": str(mo)}
                for i, b, oh, mo in self.rows
            ],
        }


def _branch_decision(h: Poly, I: IdealOnCurve, b: Branch):
    """(ok, order_h, min_order) on one branch; raises TruncationInsufficient."""
    a = _assign(b)
    hv = h.substitute(a)
    vals = [g.substitute(a) for g in I.gens]
    m, zero = _min_order(vals)
    if zero:
        if hv.is_exact_zero():
            return True, "inf", "inf"
        if hv.has_known_order():
            return False, hv.order(), "inf"
        raise TruncationInsufficient("cannot decide whether h vanishes on a branch where I vanishes")
    if hv.has_known_order():
        k = hv.order()
        return k >= m, k, m
    if hv.trunc is None or hv.trunc >= m:
        return True, hv.order(), m
    raise TruncationInsufficient("pullback of h unknown below the ideal's order")


def _with_deepening(I: IdealOnCurve, fn, ceiling=None):
    ceiling = trunc_ceiling(ceiling)
    T = I._trunc
    while True:
        try:
            return fn(I.branches_at(T))
        except TruncationInsufficient:
            T *= 2
            if T > ceiling or not I.deeper(T):
                raise


def ic_membership(h: Poly, I: IdealOnCurve, ceiling=None) -> Verdict:
    """Integral-closure membership of h in I on the curve germ."""
    h = h.with_vars(I.vars)
    if h.constant_term():
        raise ValueError("h must vanish at the origin")

    def run(branches):
        rows = []
        for idx, b in enumerate(branches):
            ok, oh, mo = _branch_decision(h, I, b)
            if not ok:
                return Verdict(NO, witness=BranchWitness(idx, b, oh, mo), details={"orders": rows})
            rows.append((idx, b, oh, mo))
        return Verdict(YES, certificate=OrderTable(rows))

    return _with_deepening(I, run, ceiling)


def ideal_multiplicity(I: IdealOnCurve, ceiling=None):
    """Sum over branches of the least generator order."""

    def run(branches):
        total = 0
        for b in branches:
            vals = [g.substitute(_assign(b)) for g in I.gens]
            m, zero = _min_order(vals)
            if zero:
                raise NotFiniteColength("ideal vanishes along a branch")
            total += m
        return int(total) if Fraction(total).denominator == 1 else total

    return _with_deepening(I, run, ceiling)


# -- colength by linear algebra on truncated monomials ------------------------

def _monomials(nvars, degree):
    """Exponent vectors of total degree exactly ``degree``."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def colength(gens, vars=None, max_degree=64) -> int:
    """dim K[[vars]] / (gens), via stabilization of dim K[vars]/(I + m^D)."""
    gens = [g for g in gens if not g.is_zero()]
    if vars is None:
        vs = []
        for g in gens:
            for v in g.vars:
                if v not in vs:
                    vs.append(v)
        vars = tuple(vs)
    vars = tuple(vars)
    gens = [g.with_vars(vars) for g in gens]
    for g in gens:
        if g.constant_term():
            return 0
    n = len(vars)
    prev = None
    for D in range(1, max_degree + 1):
        basis = SpanBasis()
        for g in gens:
            og = g.order()
            for d in range(0, D - og):
                for m in _monomials(n, d):
                    vec = {}
                    for e, c in g.terms.items():
                        if sum(e) + d < D:
                            vec[tuple(a + b for a, b in zip(e, m))] = c
                    if vec:
                        basis.add(vec)
        total = sum(len(_monomials(n, d)) for d in range(D))
        dim = total - basis.rank()
        if prev is not None and dim == prev:
            return dim
        prev = dim
    raise NotFiniteColength(f"colength did not stabilize below degree {max_degree}")


# -- explicit division certificates ---------------------------------------------

class DivisionCertificate:
    """u*h = sum a_i g_i + b*f with u(0) = 1: h lies in (I + (f)) locally."""

    def __init__(self, unit, coeffs, curve_coeff, degree):
        self.unit = unit
        self.coeffs = coeffs
        self.curve_coeff = curve_coeff
        self.degree = degree

    def verify(self, h, gens, curve) -> bool:
        if self.unit.constant_term() != 1:
            return False
        lhs = self.unit * h
        rhs = Poly.const(0, h.vars)
        for a, g in zip(self.coeffs, gens):
            rhs = rhs + a * g
        if curve is not None:
            rhs = rhs + self.curve_coeff * curve
        return lhs == rhs

    def summary(self):
        return f"explicit division within total degree {self.degree}"

    def to_json(self):
        return {
            "type": "division",
            "unit": str(self.unit),
            "coeffs": [str(a) for a in self.coeffs],
            "curve_coeff": str(self.curve_coeff),
            "degree": self.degree,
        }


def division_certificate(h: Poly, gens, curve=None, extra_degree=10, vars=None):
    """Search u*h = sum a_i g_i + b*curve with every product of total degree
    at most deg(h) + extra_degree; None if no such identity exists."""
    if vars is None:
        vs = list(h.vars)
        for p in list(gens) + ([curve] if curve is not None else []):
            for v in p.vars:
                if v not in vs:
                    vs.append(v)
        vars = tuple(vs)
    h = h.with_vars(vars)
    gens = [g.with_vars(vars) for g in gens]
    curve = curve.with_vars(vars) if curve is not None else None
    if h.is_zero():
        zero = Poly.const(0, vars)
        return DivisionCertificate(Poly.const(1, vars), [zero for _ in gens], zero, 0)
    n = len(vars)
    pool = list(gens) + ([curve] if curve is not None else [])
    basis = SpanBasis(track=True)
    labels = []  # (kind, index, monomial)
    dh = h.degree()
    target = dict(h.terms)
    for D in range(dh, dh + extra_degree + 1):
        for k, g in enumerate(pool):
            if g.is_zero():
                continue
            d = D - g.degree()
            if d < 0:
                continue
            for m in _monomials(n, d):
                basis.add({tuple(a + b for a, b in zip(e, m)): c for e, c in g.terms.items()})
                labels.append(("g", k, m))
        d = D - dh
        if d >= 1:
            for m in _monomials(n, d):
                basis.add({tuple(a + b for a, b in zip(e, m)): c for e, c in h.terms.items()})
                labels.append(("h", 0, m))
        combo = basis.express(target)
        if combo is not None:
            coeffs = [{} for _ in pool]
            unit = {(0,) * n: CycRat.rational(1)}
            for idx, c in combo.items():
                kind, k, m = labels[idx]
                if kind == "g":
                    coeffs[k][m] = coeffs[k].get(m, 0) + c
                else:
                    # h = ... + c*m*h  =>  (1 - c*m) h = ...
                    unit[m] = unit.get(m, 0) - c
            polys = [Poly(vars, t) for t in coeffs]
            cert = DivisionCertificate(
                Poly(vars, unit),
                polys[: len(gens)],
                polys[len(gens)] if curve is not None else Poly.const(0, vars),
                D,
            )
            return cert
    return None


# -- matrices over the series ring ----------------------------------------------

class DvrMatrix:
    """Columns of p-vectors of PSeries; ``trunc`` is the working precision."""

    def __init__(self, cols, trunc=None, rows=None, labels=None):
        cols = [tuple(c) for c in cols]
        if rows is None:
            rows = len(cols[0]) if cols else 1
        for c in cols:
            if len(c) != rows:
                raise ValueError("all columns need the same number of rows")
        self.rows = rows
        self.cols = cols
        self.labels = list(labels) if labels is not None else list(range(len(cols)))
        if trunc is None:
            truncs = [e.trunc for c in cols for e in c if e.trunc is not None]
            vals = [e.order() for c in cols for e in c if e.has_known_order()]
            if truncs:
                trunc = min(truncs)
            else:
                trunc = 2 * max(vals, default=0) + 16
        self.trunc = Fraction(trunc)
        # filled in by dvr_reduce
        self.pivots = None
        self.row_status = None
        self.combos = None

    def is_reduced(self):
        return self.pivots is not None

    def pivot_valuations(self):
        return [None if p is None else p[1] for p in self.pivots]

    def __repr__(self):
        return f"DvrMatrix(rows={self.rows}, cols={len(self.cols)}, trunc={self.trunc})"


def _sub_scaled(col, q, piv):
    return tuple(a - q * b for a, b in zip(col, piv))


def _combo_sub(ca, q, cb):
    out = dict(ca)
    for k, v in cb.items():
        out[k] = out[k] - q * v if k in out else -(q * v)
    return out


def dvr_reduce(M: DvrMatrix) -> DvrMatrix:
    """Echelon form by valuation pivots; ties broken by column order."""
    T = M.trunc
    work = [list(c) for c in M.cols]
    combos = [{i: PSeries.constant(1)} for i in range(len(work))]
    pivots = [None] * M.rows
    status = [None] * M.rows
    ech_cols, ech_combos = [], []
    for r in range(M.rows):
        known = [(work[i][r].order(), i) for i in range(len(work)) if work[i][r].has_known_order()]
        if not known:
            unknown = [work[i][r].trunc for i in range(len(work)) if work[i][r].trunc is not None]
            status[r] = ("unknown", min(unknown)) if unknown else ("zero", None)
            continue
        v, pi = min(known)
        for i in range(len(work)):
            e = work[i][r]
            if not e.has_known_order() and e.trunc is not None and e.trunc < v:
                raise TruncationInsufficient(f"row {r}: an entry is unknown below the pivot order {v}")
        if v >= T:
            raise TruncationInsufficient(f"pivot valuation {v} is not below the truncation {T}")
        pcol = work[pi]
        inv = pcol[r].leading_coefficient().inverse()
        pcol = [e.scale(inv) for e in pcol]
        pcombo = {k: s.scale(inv) for k, s in combos[pi].items()}
        rest, rest_combos = [], []
        for i in range(len(work)):
            if i == pi:
                continue
            col = work[i]
            e = col[r]
            if e.is_exact_zero():
                rest.append(col)
                rest_combos.append(combos[i])
                continue
            if e.has_known_order():
                q = e.divide(pcol[r], prec=T)
            else:
                q = PSeries.zero(trunc=e.trunc - v)
            new = list(_sub_scaled(col, q, pcol))
            new[r] = PSeries.zero()
            rest.append(new)
            rest_combos.append(_combo_sub(combos[i], q, pcombo))
        pivots[r] = (len(ech_cols), v)
        status[r] = ("pivot", v)
        ech_cols.append(tuple(pcol))
        ech_combos.append(pcombo)
        work, combos = rest, rest_combos
    # leftover columns: everything is eliminated or unknown
    for r in range(M.rows):
        if pivots[r] is not None:
            continue
        unknown = [c[r].trunc for c in work if not c[r].is_exact_zero() and c[r].trunc is not None]
        known = [c[r] for c in work if c[r].has_known_order()]
        if known:
            raise TruncationInsufficient("reduction left a known entry in a row without pivot")
        if unknown:
            status[r] = ("unknown", min(unknown))
    out = DvrMatrix(ech_cols, trunc=T, rows=M.rows) if ech_cols else DvrMatrix([], trunc=T, rows=M.rows)
    out.pivots = pivots
    out.row_status = status
    out.combos = ech_combos
    out.source = M
    return out


class DvrWitness:
    """Residual of a target after reduction, with the row where it sticks out."""

    def __init__(self, residual, row, valuation, pivots):
        self.residual = residual
        self.row = row
        self.valuation = valuation
        self.pivots = pivots

    def bound(self):
        p = self.pivots[self.row]
        return p

    def summary(self):
        p = self.pivots[self.row]
        bound = "no pivot" if p is None else str(p)
        return f"residual order {self.valuation} in row {self.row} (pivot {bound})"

    def to_json(self):
        return {
            "type": "residual",
            "row": self.row,
            "valuation": str(self.valuation),
            "pivots": [None if p is None else str(p) for p in self.pivots],
            "residual": [str(s) for s in self.residual],
        }


class Combination:
    """Explicit coefficients c_i with sum c_i * column_i = target (to truncation)."""

    def __init__(self, coeffs, labels=None):
        self.coeffs = coeffs
        self.labels = labels

    def apply(self, M: DvrMatrix):
        out = [PSeries.zero() for _ in range(M.rows)]
        for i, c in self.coeffs.items():
            for r in range(M.rows):
                out[r] = out[r] + c * M.cols[i][r]
        return out

    def summary(self):
        return f"combination of {len(self.coeffs)} columns"

    def to_json(self):
        return {
            "type": "combination",
            "coeffs": {str(self.labels[i] if self.labels else i): str(c) for i, c in sorted(self.coeffs.items())},
        }


def dvr_membership(v, M: DvrMatrix, margin=MARGIN) -> Verdict:
    """Decide whether the vector v lies in the span of M's columns."""
    E = M if M.is_reduced() else dvr_reduce(M)
    src = getattr(E, "source", M)
    T = E.trunc
    pv = [p[1] for p in E.pivots if p is not None]
    if pv and max(pv) + margin > T:
        raise TruncationInsufficient(f"working precision {T} is below max pivot {max(pv)} + {margin}")
    res = list(v)
    if len(res) != E.rows:
        raise ValueError("target has the wrong number of rows")
    coeffs = {}
    piv = E.pivot_valuations()
    for r in range(E.rows):
        e = res[r]
        st = E.row_status[r]
        if st[0] == "pivot":
            ci, vp = E.pivots[r]
            if e.has_known_order():
                k = e.order()
                if k < vp:
                    return Verdict(NO, witness=DvrWitness(res, r, k, piv))
                q = e.divide(E.cols[ci][r], prec=T)
            elif e.is_exact_zero():
                continue
            elif e.trunc >= vp:
                q = PSeries.zero(trunc=e.trunc - vp)
            else:
                raise TruncationInsufficient(f"target row {r} unknown below pivot {vp}")
            res = list(_sub_scaled(res, q, E.cols[ci]))
            res[r] = PSeries.zero()
            for k2, s in E.combos[ci].items():
                coeffs[k2] = coeffs[k2] + q * s if k2 in coeffs else q * s
        elif st[0] == "zero":
            if e.is_exact_zero():
                continue
            if e.has_known_order():
                return Verdict(NO, witness=DvrWitness(res, r, e.order(), piv))
            raise TruncationInsufficient(f"target row {r} unknown in a row the module cannot reach")
        else:
            bound = st[1]
            if e.is_exact_zero():
                continue
            if e.has_known_order() and e.order() < bound:
                return Verdict(NO, witness=DvrWitness(res, r, e.order(), piv))
            raise TruncationInsufficient(f"row {r} undetermined below order {bound}")
    labels = getattr(src, "labels", None)
    return Verdict(YES, certificate=Combination(coeffs, labels))


def pair_multiplicity_dvr(M: DvrMatrix, N: DvrMatrix):
    """Colength of span(M) in span(N): sum of pivot valuation differences."""
    EN = dvr_reduce(N)
    EM = dvr_reduce(M)
    for col in M.cols:
        v = dvr_membership(list(col), EN, margin=0)
        if not v.is_yes:
            raise NotNested("a column of the first module is not in the second")
    if any(p is None for p in EM.pivots) or any(p is None for p in EN.pivots):
        raise NotFiniteColength("a module does not have full rank")
    total = sum(pm[1] - pn[1] for pm, pn in zip(EM.pivots, EN.pivots))
    return int(total) if Fraction(total).denominator == 1 else total
