"""Newton-Puiseux expansion of plane-curve germs at the origin.

Branches are returned in the normal form x = a*t^M (exact), y = a series in t,
where (x, y) is the variable order of the input.  The scale a is 1 unless the
leading coefficient would otherwise need a root outside Q(zeta).  The branch x = 0 (when x
divides f) is returned as (0, t).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .cyclo import CycRat
from .errors import NoSingularPoint, NotSquarefree, UnsupportedExtension
from .gcd import squarefree_part
from .poly import Poly
from .roots import cyclotomic_roots, nth_root
from .series import PSeries

__all__ = ["Branch", "puiseux_branches", "verify_branch", "squarefree_part", "default_trunc"]

_ONE = CycRat.rational(1)


def default_trunc(f: Poly) -> int:
    return 4 * max(f.degree(), 1) ** 2


class Branch:
    """Parametrization t -> (comps[0](t), comps[1](t), ...) of one branch."""

    __slots__ = ("vars", "comps", "source")

    def __init__(self, vars, comps, source=None):
        self.vars = tuple(vars)
        self.comps = tuple(comps)
        if len(self.vars) != len(self.comps):
            raise ValueError("one component per variable is required")
        self.source = source

    @property
    def mult(self):
        orders = [c.order() for c in self.comps if c.has_known_order()]
        if not orders:
            raise ValueError("branch has no component with a known order")
        m = min(orders)
        return int(m) if m.denominator == 1 else m

    def assignment(self, reparam=None, rename=None) -> dict:
        """Map variable name -> series, optionally composed with ``reparam``."""
        out = {}
        for v, c in zip(self.vars, self.comps):
            s = c if reparam is None else c.compose(reparam)
            out[rename(v) if rename else v] = s
        return out

    def truncation(self):
        ts = [c.trunc for c in self.comps if c.trunc is not None]
        return min(ts) if ts else None

    def __eq__(self, other):
        return isinstance(other, Branch) and self.vars == other.vars and self.comps == other.comps

    def __hash__(self):
        return hash((self.vars, self.comps))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.comps) + ")"

    def short(self) -> str:
        """Display without truncation tails, as in ``(t^5, -t^2) [mult 2]``."""
        parts = []
        for c in self.comps:
            s = PSeries({e: v for e, v in c.items()})
            parts.append(str(s))
        return "(" + ", ".join(parts) + f") [mult {self.mult}]"

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "comps": [series_to_json(c) for c in self.comps],
            "mult": str(self.mult),
        }

    @classmethod
    def from_json(cls, data) -> "Branch":
        return cls(data["vars"], [series_from_json(c) for c in data["comps"]])


def series_to_json(s: PSeries) -> dict:
    return {
        "terms": [[str(e), str(c)] for e, c in s.items()],
        "trunc": None if s.trunc is None else str(s.trunc),
    }


def series_from_json(data) -> PSeries:
    from .poly import parse_number

    terms = {}
    ram = 1
    for e, c in data["terms"]:
        e = Fraction(e)
        ram = ram * e.denominator // gcd(ram, e.denominator)
        terms[e] = parse_number(c)
    trunc = data.get("trunc")
    if trunc is not None:
        trunc = Fraction(trunc)
        ram = ram * trunc.denominator // gcd(ram, trunc.denominator)
    return PSeries(terms, trunc=trunc, ram=ram)


# -- bivariate dict helpers: (i, j) -> coefficient, i for s, j for w ----------

def _binomial_row(j):
    row = [1]
    for k in range(j):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row


def _transform(G: dict, p: int, q: int, c: CycRat, a0: CycRat = _ONE) -> dict:
    """G(a0 u^p, u^q (c + w)) / u^val, as a dict in (u, w)."""
    val = min(p * i + q * j for i, j in G)
    out = {}
    cpow = {0: _ONE}
    for (i, j), a in G.items():
        if i and a0 != _ONE:
            a = a * a0 ** i
        e = p * i + q * j - val
        row = _binomial_row(j)
        for k in range(j + 1):
            if j - k not in cpow:
                cpow[j - k] = c ** (j - k)
            coef = a * cpow[j - k] * row[k]
            if coef:
                key = (e, k)
                s = out[key] + coef if key in out else coef
                if s:
                    out[key] = s
                else:
                    del out[key]
    return out


def _lower_hull(G: dict):
    """Compact edges of the Newton polygon, from the w-axis to the s-axis."""
    minimal = {}
    for i, j in G:
        if j not in minimal or i < minimal[j]:
            minimal[j] = i
    j0 = min(j for j in minimal if minimal[j] == 0)
    edges = []
    cur = (0, j0)
    while cur[1] > 0:
        best = None
        for j, i in minimal.items():
            if j >= cur[1]:
                continue
            slope = Fraction(i - cur[0], cur[1] - j)
            if best is None or slope < best[0] or (slope == best[0] and j < best[1][1]):
                best = (slope, (i, j))
        edges.append((cur, best[1], best[0]))
        cur = best[1]
    return edges


def _newton_solve(G: dict, prec: int) -> PSeries:
    """The unique w(s) with w(0) = 0 and G(s, w(s)) = 0, known mod s^prec."""
    P = Poly(("s", "w"), G)
    Pw = P.partial("w")
    s = PSeries.t()
    W = PSeries.zero()
    cur = 1
    W = PSeries.zero(trunc=1)
    while cur < prec:
        cur = min(2 * cur, prec)
        Wt = PSeries(dict(W.items()), trunc=cur)
        val = P.substitute({"s": s, "w": Wt})
        der = Pw.substitute({"s": s, "w": Wt})
        W = (Wt - val.divide(der, prec=cur)).truncate(cur)
    return W


def _edge_scale(z, p, q):
    """(a0, c) with c^p = z * a0^q; a0 = 1 when z has a p-th root in Q(zeta)."""
    try:
        return _ONE, nth_root(z, p)
    except UnsupportedExtension:
        k = next(k for k in range(p) if (1 + k * q) % p == 0)
        return z ** k, z ** ((1 + k * q) // p)


def _solve(G: dict, prec: int):
    """Solutions w(s) of G(s, w) = 0 with w(0) = 0.

    Returns a list of (m, a, W) where s = a*u^m and W is a series in u.
    """
    out = []
    if not G:
        raise NotSquarefree("polynomial vanishes identically along a branch")
    # w = 0 is an exact solution when w divides G
    if all(j > 0 for _, j in G):
        out.append((1, _ONE, PSeries.zero()))
        G = {(i, j - 1): a for (i, j), a in G.items()}
        if all(j > 0 for _, j in G):
            raise NotSquarefree("repeated factor along a branch")
    if (0, 0) in G:
        return out
    j0 = min(j for i, j in G if i == 0) if any(i == 0 for i, _ in G) else None
    if j0 is None:
        raise NotSquarefree("s divides the transformed polynomial")
    if j0 == 1:
        out.append((1, _ONE, _newton_solve(G, prec)))
        return out
    for (ia, ja), (ib, jb), gamma in _lower_hull(G):
        q, p = gamma.numerator, gamma.denominator
        # edge polynomial in Z = c^p
        R = {}
        for (i, j), a in G.items():
            if p * i + q * j == p * ia + q * ja:
                R[(j - jb) // p] = a
        coeffs = [R.get(k, CycRat.rational(0)) for k in range(max(R) + 1)]
        for z, _mult in cyclotomic_roots(coeffs):
            if not z:
                continue
            a0, c = _edge_scale(z, p, q)
            G2 = _transform(G, p, q, c, a0)
            inner_prec = max(prec - q, 1)
            for m, a1, W in _solve(G2, inner_prec):
                # U = a1 u^m: s = a0 a1^p u^(p m), w = a1^q u^(q m) (c + W(u))
                total = m * p
                lead = a1 ** q
                head = PSeries({q * m: c * lead})
                tail = W.shift(q * m).scale(lead) if not W.is_exact_zero() else W
                out.append((total, a0 * a1 ** p, head + tail))
    return out


def puiseux_branches(f: Poly, T=None) -> list:
    """One Branch per analytic branch of f = 0 at the origin."""
    if len(f.vars) != 2:
        used = f.used_vars()
        if len(used) > 2:
            raise ValueError("expected a plane curve (two variables)")
        f = f.with_vars((tuple(used) + ("x", "y"))[:2])
    x, y = f.vars
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.constant_term():
        raise NoSingularPoint("curve does not pass through the origin")
    T = default_trunc(f) if T is None else int(T)
    sf = squarefree_part(f)
    if sf.degree() != f.degree():
        raise NotSquarefree(f"{f} has a repeated factor; squarefree part is {sf}")
    G = {e: c for e, c in f.terms.items()}
    branches = []
    # x divides f: the branch x = 0
    if all(i > 0 for i, _ in G):
        branches.append(Branch((x, y), (PSeries.zero(), PSeries.t()), source=f))
        G = {(i - 1, j): a for (i, j), a in G.items()}
        if all(i > 0 for i, _ in G):
            raise NotSquarefree(f"{x}^2 divides {f}")
    if (0, 0) in G:
        return branches
    for m, a, Y in _solve(G, T):
        xs = PSeries({m: a})
        ys = Y if Y.trunc is None else Y.truncate(min(Y.trunc, T))
        branches.append(Branch((x, y), (xs, ys), source=f))
    return branches


def verify_branch(f: Poly, b: Branch, T=None) -> bool:
    """True iff f vanishes along b to order at least T (by default b's own truncation)."""
    try:
        r = f.substitute(dict(zip(b.vars, b.comps)))
    except Exception:
        return False
    if r.has_known_order():
        return False
    if T is None:
        return True
    return r.trunc is None or r.trunc >= T
