"""Polynomial gcds over Q(zeta_N): univariate Euclid and a bivariate
primitive pseudo-remainder sequence, plus exact multivariate division."""

from __future__ import annotations

from .cyclo import CycRat
from .errors import NoSingularPoint
from .poly import Poly

__all__ = ["upoly_gcd", "upoly_divmod", "bivariate_gcd", "exact_divide", "squarefree_part"]

_ZERO = CycRat.rational(0)
_ONE = CycRat.rational(1)


# -- univariate: lists of CycRat, lowest degree first --------------------------

def _trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def upoly_add(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else _ZERO) + (b[i] if i < len(b) else _ZERO) for i in range(n)])


def upoly_sub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else _ZERO) - (b[i] if i < len(b) else _ZERO) for i in range(n)])


def upoly_mul(a, b):
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return _trim(out)


def upoly_divmod(a, b):
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = _trim(a)
    inv = b[-1].inverse()
    q = [_ZERO] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] = r[k + j] - c * y
    return _trim(q), _trim(r[: len(b) - 1])


def upoly_monic(a):
    a = _trim(a)
    if not a:
        return a
    inv = a[-1].inverse()
    return [c * inv for c in a]


def upoly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    return upoly_monic(a)


def upoly_eval(a, z):
    acc = _ZERO
    for c in reversed(a):
        acc = acc * z + c
    return acc


def upoly_derive(a):
    return _trim([a[i] * i for i in range(1, len(a))])


# -- bivariate: dict y-degree -> univariate poly in x -------------------------

def _to_biv(p: Poly, x: str, y: str):
    p = p.with_vars((x, y))
    out = {}
    for (i, j), c in p.terms.items():
        row = out.setdefault(j, [])
        while len(row) <= i:
            row.append(_ZERO)
        row[i] = row[i] + c
    return {j: _trim(r) for j, r in out.items() if _trim(r)}


def _from_biv(B, x: str, y: str) -> Poly:
    terms = {}
    for j, row in B.items():
        for i, c in enumerate(row):
            if c:
                terms[(i, j)] = c
    return Poly((x, y), terms)


def _deg(B):
    return max(B) if B else -1


def _content(B):
    g = []
    for row in B.values():
        g = upoly_gcd(g, row)
        if len(g) == 1:
            break
    return g


def _divide_rows(B, c):
    out = {}
    for j, row in B.items():
        q, r = upoly_divmod(row, c)
        if r:
            raise ArithmeticError("content does not divide")
        out[j] = q
    return out


def _prem(A, B):
    """Pseudo-remainder of A by B in K[x][y]."""
    db = _deg(B)
    lc = B[db]
    R = dict(A)
    while R and _deg(R) >= db:
        dr = _deg(R)
        lr = R[dr]
        new = {}
        for j, row in R.items():
            new[j] = upoly_mul(row, lc)
        for j, row in B.items():
            k = j + dr - db
            new[k] = upoly_sub(new.get(k, []), upoly_mul(row, lr))
        R = {j: r for j, r in new.items() if r}
    return R


def bivariate_gcd(f: Poly, g: Poly, x: str, y: str) -> Poly:
    """Monic-content gcd of f and g in K[x, y], via primitive PRS in y."""
    A, B = _to_biv(f, x, y), _to_biv(g, x, y)
    if not A:
        return g
    if not B:
        return f
    ca, cb = _content(A), _content(B)
    c = upoly_gcd(ca, cb)
    A, B = _divide_rows(A, ca), _divide_rows(B, cb)
    if _deg(A) < _deg(B):
        A, B = B, A
    while B and _deg(B) > 0:
        R = _prem(A, B)
        A = B
        if not R:
            B = {}
            break
        B = _divide_rows(R, _content(R))
    if B:
        # the remainder sequence ended in a nonzero constant in y
        A = {0: [_ONE]}
    G = {j: upoly_mul(row, c) for j, row in A.items()}
    lc = G[_deg(G)][-1].inverse()
    G = {j: [v * lc for v in row] for j, row in G.items()}
    return _from_biv(G, x, y)


def _lead(p: Poly):
    return max(p.terms)


def exact_divide(f: Poly, g: Poly) -> Poly:
    """f / g, raising ArithmeticError if g does not divide f."""
    f, g = f._align(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lg = _lead(g)
    inv = g.terms[lg].inverse()
    vars = f.vars
    q = {}
    r = Poly._raw(vars, dict(f.terms))
    while r.terms:
        lr = _lead(r)
        d = tuple(a - b for a, b in zip(lr, lg))
        if any(k < 0 for k in d):
            raise ArithmeticError("polynomial is not divisible")
        c = r.terms[lr] * inv
        q[d] = c
        r = r - Poly._raw(vars, {d: c}) * g
    return Poly(vars, q)


def squarefree_part(f: Poly) -> Poly:
    """f with every repeated factor reduced to a single copy."""
    used = f.used_vars()
    vars = f.vars if len(f.vars) == 2 else (tuple(used) + ("_a", "_b"))[:2]
    if len(vars) != 2:
        raise ValueError("expected a polynomial in two variables")
    f = f.with_vars(vars)
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.constant_term():
        raise NoSingularPoint("polynomial does not vanish at the origin")
    x, y = vars
    g = bivariate_gcd(f, f.partial(x), x, y)
    g = bivariate_gcd(g, f.partial(y), x, y)
    if g.is_constant():
        return f
    return exact_divide(f, g)
