"""Roots of univariate polynomials that lie in cyclotomic fields.

Only roots of the shape r*zeta with r rational and zeta a root of unity are
supported.  Factorization over Q is delegated to sympy; everything else
(matching factors to scaled cyclotomic polynomials, multiplicities, the norm
trick for non-rational coefficients) is exact arithmetic on CycRat.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy

from .cyclo import CycRat, cyclotomic_poly, totient
from .errors import UnsupportedExtension
from .gcd import upoly_derive, upoly_eval, upoly_gcd, upoly_mul, _trim

__all__ = ["cyclotomic_roots", "nth_root", "integer_root", "rational_root", "rational_sqrt"]

_Z = sympy.Symbol("Z")


def integer_root(n: int, k: int):
    """The exact k-th root of a nonnegative integer, or None."""
    if n < 0:
        return None
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else 1 << (n.bit_length() // k)
    # integer Newton iteration
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k if r else 1
        if nr >= r:
            break
        r = nr
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == n:
            return c
    lo, hi = 0, max(r, 1) * 2 + 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


def rational_root(q: Fraction, k: int):
    """A rational k-th root of q (real, sign-preserving for odd k), or None."""
    q = Fraction(q)
    sign = 1
    if q < 0:
        if k % 2 == 0:
            return None
        sign = -1
    a = integer_root(abs(q.numerator), k)
    b = integer_root(q.denominator, k)
    if a is None or b is None:
        return None
    return sign * Fraction(a, b)


@lru_cache(maxsize=None)
def _levels_with_totient(d: int) -> tuple:
    return tuple(m for m in range(1, 2 * d * d + 3) if totient(m) == d)


def _fmt_poly(coeffs) -> str:
    from .poly import Poly

    c = [x if isinstance(x, CycRat) else CycRat.rational(x) for x in coeffs]
    return str(Poly(("Z",), {(k,): v for k, v in enumerate(c)}))


def _match_scaled_cyclotomic(g):
    """Roots of a monic rational g of degree d >= 2 if g = rho^d Phi_M(Z/rho)."""
    d = len(g) - 1
    g0 = g[0]
    rho = rational_root(abs(g0), d)
    if rho is None or rho == 0:
        return None
    for r in (rho, -rho):
        for m in _levels_with_totient(d):
            if m < 2:
                continue
            phi = cyclotomic_poly(m)
            if all(Fraction(phi[k]) * r ** (d - k) == g[k] for k in range(d + 1)):
                return [CycRat.zeta(m, k) * r for k in range(1, m + 1) if _coprime(k, m)]
    return None


def rational_sqrt(d) -> CycRat:
    """A square root of the rational d in a cyclotomic field (Gauss sums)."""
    d = Fraction(d)
    if d == 0:
        return CycRat.rational(0)
    r = rational_root(d, 2)
    if r is not None:
        return CycRat.rational(r)
    num, den = d.numerator * d.denominator, d.denominator
    out = CycRat.rational(Fraction(1, den))
    if num < 0:
        out = out * CycRat.zeta(4, 1)
        num = -num
    for p, e in sympy.factorint(num).items():
        if e % 2 == 0:
            out = out * p ** (e // 2)
            continue
        out = out * p ** (e // 2)
        if p == 2:
            out = out * (CycRat.zeta(8, 1) + CycRat.zeta(8, 7))
            continue
        g = CycRat.rational(0)
        for a in range(1, p):
            g = g + CycRat.zeta(p, a) * (1 if pow(a, (p - 1) // 2, p) == 1 else -1)
        # g^2 = p for p = 1 mod 4, else -p
        out = out * (g if p % 4 == 1 else g * CycRat.zeta(4, 3))
    return out


def _quadratic_roots(fc):
    """Roots of the monic Z^2 + b Z + c."""
    c, b = fc[0], fc[1]
    w = rational_sqrt(b * b - 4 * c)
    return [(w - b) * Fraction(1, 2), (-w - b) * Fraction(1, 2)]


def _coprime(a, b):
    from math import gcd

    return gcd(a, b) == 1


def _rational_factor_roots(coeffs):
    """Roots of a polynomial with rational coefficients, as (root, mult)."""
    expr = sum(sympy.Rational(c.numerator, c.denominator) * _Z ** k for k, c in enumerate(coeffs))
    _, factors = sympy.factor_list(sympy.Poly(expr, _Z, domain="QQ"))
    out = []
    for fac, mult in factors:
        fc = [Fraction(int(x.p), int(x.q)) for x in reversed(fac.all_coeffs())]
        lc = fc[-1]
        fc = [c / lc for c in fc]
        if len(fc) == 2:
            out.append((CycRat.rational(-fc[0]), mult))
            continue
        roots = _match_scaled_cyclotomic(fc)
        if roots is None and len(fc) == 3:
            roots = _quadratic_roots(fc)
        if roots is None:
            raise UnsupportedExtension(_fmt_poly(fc))
        out.extend((r, mult) for r in roots)
    return out


def _multiplicity(coeffs, z) -> int:
    m = 0
    p = coeffs
    while p and not upoly_eval(p, z):
        m += 1
        p = upoly_derive(p)
    return m


def cyclotomic_roots(coeffs) -> list:
    """All roots (with multiplicity) of sum coeffs[k] Z^k, as (CycRat, mult).

    Raises UnsupportedExtension if a root is neither r*zeta (r rational) nor a
    root of a rational quadratic.
    """
    coeffs = _trim([c if isinstance(c, CycRat) else CycRat.rational(c) for c in coeffs])
    if not coeffs:
        raise ValueError("zero polynomial has every element as a root")
    out = []
    # factor out Z^k
    k0 = 0
    while not coeffs[k0]:
        k0 += 1
    if k0:
        out.append((CycRat.rational(0), k0))
    coeffs = coeffs[k0:]
    if len(coeffs) == 1:
        return out
    if all(c.is_rational() for c in coeffs):
        out.extend(_rational_factor_roots([c.to_fraction() for c in coeffs]))
        return out
    # norm polynomial: product of the Galois conjugates has rational coefficients
    level = max(c.level for c in coeffs)
    for c in coeffs:
        if level % c.level:
            from math import gcd

            level = level * c.level // gcd(level, c.level)
    lifted = [c.lift(level) for c in coeffs]
    norm = [CycRat.rational(1)]
    for k in range(1, level + 1):
        if _coprime(k, level):
            norm = upoly_mul(norm, [c.galois(k) for c in lifted])
    norm_q = [c.to_fraction() for c in norm]
    seen = []
    rest = list(coeffs)
    try:
        cands = _rational_factor_roots(norm_q)
    except UnsupportedExtension:
        cands = _supported_norm_roots(norm_q)
    for z, _ in cands:
        if any(z == s for s in seen):
            continue
        seen.append(z)
        m = _multiplicity(coeffs, z)
        if m:
            out.append((z, m))
            for _ in range(m):
                rest = _divide_linear(rest, z)
    if len(rest) > 1:
        raise UnsupportedExtension(_fmt_poly(rest))
    return out


def _supported_norm_roots(norm_q):
    """Roots of the supported shape among the rational factors of the norm."""
    expr = sum(sympy.Rational(c.numerator, c.denominator) * _Z ** k for k, c in enumerate(norm_q))
    _, factors = sympy.factor_list(sympy.Poly(expr, _Z, domain="QQ"))
    out = []
    for fac, mult in factors:
        fc = [Fraction(int(x.p), int(x.q)) for x in reversed(fac.all_coeffs())]
        fc = [c / fc[-1] for c in fc]
        if len(fc) == 2:
            out.append((CycRat.rational(-fc[0]), mult))
        else:
            roots = _match_scaled_cyclotomic(fc)
            if roots is None and len(fc) == 3:
                roots = _quadratic_roots(fc)
            if roots:
                out.extend((r, mult) for r in roots)
    return out


def _divide_linear(coeffs, z):
    # synthetic division by (Z - z)
    n = len(coeffs) - 1
    q = [None] * n
    acc = coeffs[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = coeffs[k] + acc * z
    return _trim(q)


def _as_root_of_unity_times_rational(a: CycRat):
    """(rho, L, e) with a = rho * zeta_L^e and rho > 0 rational, or None."""
    L = a.level if a.level % 2 == 0 else 2 * a.level
    for e in range(L):
        b = a * CycRat.zeta(L, -e)
        if b.is_rational():
            q = b.to_fraction()
            if q > 0:
                return q, L, e
    return None


def nth_root(a, n: int) -> CycRat:
    """Some b in a cyclotomic field with b^n = a."""
    if not isinstance(a, CycRat):
        a = CycRat.rational(a)
    if n == 1 or not a:
        return a
    if a.is_rational():
        r = rational_root(a.to_fraction(), n)
        if r is not None:
            return CycRat.rational(r)
    form = _as_root_of_unity_times_rational(a)
    if form is not None:
        rho, L, e = form
        r = rational_root(rho, n)
        if r is not None:
            return CycRat.zeta(L * n, e) * r
    roots = cyclotomic_roots([-a] + [CycRat.rational(0)] * (n - 1) + [CycRat.rational(1)])
    if not roots:
        raise UnsupportedExtension(f"Z^{n} - ({a})")
    return roots[0][0]


def common_gcd(a, b):
    return upoly_gcd(a, b)
