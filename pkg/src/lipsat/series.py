"""Truncated Puiseux series in one variable t over cyclotomic coefficients.

Exponents are stored as integers in units of 1/ram.  ``_trunc`` is the
first unknown exponent (in the same units); ``None`` means the series is an
exact finite sum.  Every operation computes the resulting truncation from
the operands' valuations and truncations, never widening it.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .cyclo import CycRat, as_cyc, format_term, join_terms
from .errors import DivisionByZero, IllegalComposition, TruncationInsufficient

__all__ = ["PSeries", "OrderBound", "series_order"]


def _lcm(a, b):
    return a // gcd(a, b) * b


def _tmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _tadd(a, b):
    if a is None or b is None:
        return None
    return a + b


class OrderBound:
    """Order of a series with no known nonzero coefficient: ``>= bound``."""

    __slots__ = ("bound",)

    def __init__(self, bound):
        self.bound = bound  # Fraction, or None for an exactly zero series

    def __str__(self):
        if self.bound is None:
            return "inf"
        return f">={self.bound}"

    __repr__ = __str__

    def __eq__(self, other):
        return isinstance(other, OrderBound) and self.bound == other.bound

    def __hash__(self):
        return hash(("OrderBound", self.bound))


class PSeries:
    __slots__ = ("ram", "_terms", "_trunc")

    def __init__(self, terms=None, trunc=None, ram: int = 1):
        """Build from a mapping exponent -> coefficient.

        ``trunc`` is the truncation order T (exponents >= T are dropped and
        unknown); ``None`` declares the sum exact.
        """
        ram = int(ram)
        if ram < 1:
            raise ValueError("ramification index must be positive")
        units = {}
        tr = None
        if trunc is not None:
            tr = Fraction(trunc) * ram
            if tr.denominator != 1:
                raise ValueError("truncation order must be a multiple of 1/ram")
            tr = int(tr)
        for e, c in (terms or {}).items():
            k = Fraction(e) * ram
            if k.denominator != 1:
                raise ValueError(f"exponent {e} is not a multiple of 1/{ram}")
            k = int(k)
            if k < 0:
                raise ValueError("negative exponents are not allowed")
            c = as_cyc(c)
            if tr is not None and k >= tr:
                continue
            if c:
                units[k] = units.get(k, 0) + c
        self.ram = ram
        self._terms = {k: v for k, v in units.items() if v}
        self._trunc = tr

    @classmethod
    def _raw(cls, ram, terms, trunc):
        s = cls.__new__(cls)
        s.ram = ram
        if trunc is not None:
            terms = {k: v for k, v in terms.items() if k < trunc and v}
        else:
            terms = {k: v for k, v in terms.items() if v}
        s._terms = terms
        s._trunc = trunc
        return s

    @classmethod
    def monomial(cls, coeff=1, exponent=1, trunc=None, ram=1):
        return cls({exponent: coeff}, trunc=trunc, ram=ram)

    @classmethod
    def constant(cls, coeff, trunc=None):
        return cls({0: coeff}, trunc=trunc)

    @classmethod
    def zero(cls, trunc=None):
        return cls({}, trunc=trunc)

    @classmethod
    def t(cls):
        return cls({1: 1})

    # -- views ---------------------------------------------------------------
    @property
    def trunc(self):
        return None if self._trunc is None else Fraction(self._trunc, self.ram)

    @property
    def is_exact(self) -> bool:
        return self._trunc is None

    def items(self):
        """Sorted (exponent, coefficient) pairs."""
        return [(Fraction(k, self.ram), self._terms[k]) for k in sorted(self._terms)]

    def coefficient(self, e) -> CycRat:
        k = Fraction(e) * self.ram
        if k.denominator != 1:
            return CycRat.rational(0)
        k = int(k)
        if self._trunc is not None and k >= self._trunc:
            raise TruncationInsufficient(f"coefficient of t^{e} lies beyond truncation {self.trunc}")
        return self._terms.get(k, CycRat.rational(0))

    def _val(self):
        """Valuation in units; the truncation if no known term; None if exactly zero."""
        if self._terms:
            return min(self._terms)
        return self._trunc

    def order(self):
        if self._terms:
            return Fraction(min(self._terms), self.ram)
        return OrderBound(self.trunc)

    def has_known_order(self) -> bool:
        return bool(self._terms)

    def is_exact_zero(self) -> bool:
        return not self._terms and self._trunc is None

    def is_zero_to_trunc(self) -> bool:
        return not self._terms

    def leading_coefficient(self) -> CycRat:
        if not self._terms:
            raise TruncationInsufficient("series has no known nonzero coefficient")
        return self._terms[min(self._terms)]

    def with_ram(self, ram: int) -> "PSeries":
        if ram == self.ram:
            return self
        if ram % self.ram:
            raise ValueError("target ramification must be a multiple")
        m = ram // self.ram
        return PSeries._raw(
            ram, {k * m: v for k, v in self._terms.items()}, None if self._trunc is None else self._trunc * m
        )

    def normalized(self) -> "PSeries":
        """Same series with the smallest ramification index."""
        g = self.ram
        for k in self._terms:
            g = gcd(g, k)
        if self._trunc is not None:
            g = gcd(g, self._trunc)
        if g <= 1:
            return self
        return PSeries._raw(
            self.ram // g, {k // g: v for k, v in self._terms.items()}, None if self._trunc is None else self._trunc // g
        )

    def truncate(self, trunc) -> "PSeries":
        tr = Fraction(trunc) * self.ram
        if tr.denominator != 1:
            raise ValueError("truncation order must be a multiple of 1/ram")
        tr = _tmin(self._trunc, int(tr))
        return PSeries._raw(self.ram, self._terms, tr)

    # -- arithmetic ----------------------------------------------------------
    @staticmethod
    def _align(a: "PSeries", b: "PSeries"):
        if a.ram == b.ram:
            return a, b
        r = _lcm(a.ram, b.ram)
        return a.with_ram(r), b.with_ram(r)

    def _coerce(self, other):
        if isinstance(other, PSeries):
            return other
        c = as_cyc(other)
        if c is NotImplemented:
            return NotImplemented
        return PSeries._raw(self.ram, {0: c}, None)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(self, other)
        terms = dict(a._terms)
        for k, v in b._terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return PSeries._raw(a.ram, terms, _tmin(a._trunc, b._trunc))

    __radd__ = __add__

    def __neg__(self):
        return PSeries._raw(self.ram, {k: -v for k, v in self._terms.items()}, self._trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "PSeries":
        c = as_cyc(c)
        if not c:
            return PSeries._raw(self.ram, {}, self._trunc)
        return PSeries._raw(self.ram, {k: v * c for k, v in self._terms.items()}, self._trunc)

    def shift(self, e) -> "PSeries":
        """Multiply by t^e (e >= 0)."""
        k = Fraction(e) * self.ram
        if k.denominator != 1:
            return self.with_ram(_lcm(self.ram, Fraction(e).denominator)).shift(e)
        k = int(k)
        return PSeries._raw(self.ram, {i + k: v for i, v in self._terms.items()}, _tadd(self._trunc, k))

    def __mul__(self, other):
        if not isinstance(other, PSeries):
            c = as_cyc(other)
            if c is NotImplemented:
                return c
            return self.scale(c)
        a, b = self._align(self, other)
        va, vb = a._val(), b._val()
        trunc = _tmin(_tadd(a._trunc, vb), _tadd(b._trunc, va))
        if (va is None) or (vb is None):
            return PSeries._raw(a.ram, {}, trunc)
        out = {}
        bt = sorted(b._terms.items())
        for i, x in a._terms.items():
            for j, y in bt:
                k = i + j
                if trunc is not None and k >= trunc:
                    break
                p = x * y
                if k in out:
                    out[k] = out[k] + p
                else:
                    out[k] = p
        return PSeries._raw(a.ram, out, trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = PSeries._raw(self.ram, {0: CycRat.rational(1)}, None)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self, prec=None) -> "PSeries":
        """1/self for a unit series; ``prec`` bounds exact-but-infinite results."""
        if not self._terms or min(self._terms) != 0:
            if self.is_zero_to_trunc():
                raise DivisionByZero("series has no known nonzero term")
            raise DivisionByZero("only unit series (order 0) are invertible")
        u0inv = self._terms[0].inverse()
        if len(self._terms) == 1:
            return PSeries._raw(self.ram, {0: u0inv}, self._trunc)
        trunc = self._trunc
        if prec is not None:
            p = Fraction(prec) * self.ram
            trunc = _tmin(trunc, int(p) if p.denominator == 1 else int(p) + 1)
        if trunc is None:
            raise TruncationInsufficient("inverse of a non-monomial exact series needs a precision")
        w = [None] * trunc
        w[0] = u0inv
        terms = sorted((k, v) for k, v in self._terms.items() if k > 0)
        for n in range(1, trunc):
            acc = None
            for k, v in terms:
                if k > n:
                    break
                wk = w[n - k]
                if wk:
                    acc = v * wk if acc is None else acc + v * wk
            w[n] = CycRat.rational(0) if acc is None else -(acc * u0inv)
        return PSeries._raw(self.ram, {k: v for k, v in enumerate(w) if v}, trunc)

    def divide(self, other: "PSeries", prec=None) -> "PSeries":
        """Quotient self/other, which must again be a series (no negative exponents)."""
        a, b = self._align(self, other)
        if not b._terms:
            raise DivisionByZero("divisor has no known nonzero term")
        vb = min(b._terms)
        va = a._val()
        if va is None:
            return PSeries._raw(a.ram, {}, None)
        if a._terms and va < vb:
            raise ValueError("quotient would have a negative exponent")
        # exact polynomial division when it terminates
        if a._trunc is None and b._trunc is None:
            q = _exact_poly_div(a._terms, b._terms)
            if q is not None:
                return PSeries._raw(a.ram, q, None)
        # error terms: O(t^Ta)/b and a*O(t^Tb)/b^2
        trunc = _tmin(_tadd(a._trunc, -vb), _tadd(b._trunc, (va if va is not None else 0) - 2 * vb))
        if prec is not None:
            p = Fraction(prec) * a.ram
            trunc = _tmin(trunc, int(p) if p.denominator == 1 else int(p) + 1)
        if trunc is None:
            raise TruncationInsufficient("exact quotient is an infinite series; pass prec")
        bu = PSeries._raw(a.ram, {k - vb: v for k, v in b._terms.items()}, _tadd(b._trunc, -vb))
        inv = bu.inverse(prec=Fraction(max(trunc, 1), a.ram))
        an = PSeries._raw(a.ram, {k - vb: v for k, v in a._terms.items()}, _tadd(a._trunc, -vb))
        q = an * inv
        return PSeries._raw(q.ram, q._terms, _tmin(q._trunc, trunc))

    def derive(self) -> "PSeries":
        out = {}
        for k, v in self._terms.items():
            if k == 0:
                continue
            if k < self.ram:
                raise ValueError("derivative would have a negative exponent")
            out[k - self.ram] = v * Fraction(k, self.ram)
        tr = None if self._trunc is None else max(self._trunc - self.ram, 0)
        return PSeries._raw(self.ram, out, tr)

    def compose(self, other: "PSeries") -> "PSeries":
        """self(other(t)); requires order(other) > 0."""
        if not isinstance(other, PSeries):
            raise TypeError("compose expects a PSeries")
        vb = other._val()
        if vb is None or vb <= 0 or not other._terms:
            if other._terms and min(other._terms) == 0:
                raise IllegalComposition("inner series must have positive order")
            if vb is None:
                # inner series is exactly zero
                return PSeries._raw(other.ram, {0: self._terms[0]} if 0 in self._terms else {}, None)
            raise IllegalComposition("inner series has no known positive-order term")
        if self.ram != 1:
            inner = _ram_root(other, self.ram)
            base = PSeries._raw(1, self._terms, self._trunc)
            return base.compose(inner)
        out = PSeries._raw(other.ram, {}, None)
        power = PSeries._raw(other.ram, {0: CycRat.rational(1)}, None)
        last = 0
        for k in sorted(self._terms):
            while last < k:
                power = power * other
                last += 1
            out = out + power.scale(self._terms[k])
        if self._trunc is not None:
            out = PSeries._raw(out.ram, out._terms, _tmin(out._trunc, self._trunc * vb))
        return out

    # -- comparison & display -------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, PSeries):
            other = self._coerce(other)
            if other is NotImplemented:
                return False
        a, b = self._align(self, other)
        return a._trunc == b._trunc and a._terms == b._terms

    def __hash__(self):
        s = self.normalized()
        return hash((s.ram, s._trunc, frozenset(s._terms.items())))

    def __str__(self):
        parts = []
        for e, c in self.items():
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}" if e.denominator == 1 else f"t^({e})")
            parts.append(format_term(c, mono))
        if self._trunc is not None:
            parts.append(("+", f"O(t^{self.trunc})"))
        return join_terms(parts)

    def __repr__(self):
        return f"PSeries({self})"


def series_order(a: PSeries):
    """Least exponent with nonzero coefficient, or an OrderBound sentinel."""
    return a.order()


def _exact_poly_div(num: dict, den: dict):
    """Exact quotient of two finite sums in t, or None if not divisible."""
    rem = dict(num)
    dk = max(den)
    dlc = den[dk]
    dinv = dlc.inverse()
    q = {}
    dmin = min(den)
    while rem:
        top = max(rem)
        if top < dk:
            return None
        c = rem[top] * dinv
        s = top - dk
        q[s] = c
        for k, v in den.items():
            key = k + s
            nv = rem.get(key, 0) - c * v
            if nv:
                rem[key] = nv
            else:
                rem.pop(key, None)
        if rem and max(rem) < dmin:
            return None
    return q


def _ram_root(b: PSeries, m: int) -> PSeries:
    """A series s with s^m = b, when b's leading coefficient is 1."""
    vb = min(b._terms)
    lc = b._terms[vb]
    if lc != 1:
        raise IllegalComposition("fractional composition needs a monic inner series")
    ram = b.ram * m
    unit = PSeries._raw(b.ram, {k - vb: v for k, v in b._terms.items()}, _tadd(b._trunc, -vb))
    u = unit - 1
    # binomial series (1+u)^(1/m)
    alpha = Fraction(1, m)
    if u.is_exact_zero():
        root = PSeries._raw(b.ram, {0: CycRat.rational(1)}, None)
    else:
        if u._trunc is None:
            raise IllegalComposition("fractional composition with an exact non-monomial needs truncation")
        root = PSeries._raw(b.ram, {0: CycRat.rational(1)}, None)
        term = PSeries._raw(b.ram, {0: CycRat.rational(1)}, None)
        coef = Fraction(1)
        n = 0
        while True:
            term = term * u
            n += 1
            coef = coef * (alpha - n + 1) / n
            if term.is_zero_to_trunc():
                root = root + PSeries._raw(term.ram, {}, term._trunc)
                break
            root = root + term.scale(coef)
    root = root.with_ram(ram)
    return root.shift(Fraction(vb, ram))
