"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored in the power basis 1, z, ..., z^(d-1) of Q(zeta_N),
d = phi(N), reduced modulo the N-th cyclotomic polynomial.  Elements of
different levels are combined inside Q(zeta_lcm).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import DivisionByZero

__all__ = ["CycRat", "cyclotomic_poly", "totient", "as_cyc"]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("cyclotomic level must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            den = cyclotomic_poly(d)
            # exact division by a monic integer polynomial
            quot = [0] * (len(num) - len(den) + 1)
            rem = list(num)
            for i in range(len(quot) - 1, -1, -1):
                c = rem[i + len(den) - 1]
                quot[i] = c
                if c:
                    for j, dj in enumerate(den):
                        rem[i + j] -= c * dj
            num = quot
    return tuple(num)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple:
    """zeta_n^j reduced to the power basis, for j = 0..n-1."""
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    rows = []
    cur = [1] + [0] * (d - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for k in range(d):
                cur[k] -= top * phi[k]
    return tuple(rows)


@lru_cache(maxsize=None)
def _units(n: int) -> tuple:
    return tuple(k for k in range(1, n + 1) if gcd(k, n) == 1)


@lru_cache(maxsize=None)
def _trace_weights(n: int) -> tuple:
    # normalized trace of zeta_n^j: mu(n/g)/phi(n/g), g = gcd(n, j)
    d = totient(n)
    out = []
    for j in range(d):
        m = n // gcd(n, j)
        out.append(Fraction(_mobius(m), totient(m)))
    return tuple(out)


class CycRat:
    """Element of Q(zeta_N) with exact rational coordinates."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int = 1, coeffs=(0,)):
        level = int(level)
        if level < 1:
            raise ValueError("level must be a positive integer")
        d = totient(level)
        coeffs = [c if isinstance(c, (int, Fraction)) else Fraction(c) for c in coeffs]
        if len(coeffs) > d:
            table = _power_table(level)
            out = coeffs[:d]
            for j in range(d, len(coeffs)):
                c = coeffs[j]
                if c:
                    for k, v in enumerate(table[j % level]):
                        if v:
                            out[k] += c * v
            coeffs = out
        elif len(coeffs) < d:
            coeffs = coeffs + [0] * (d - len(coeffs))
        self.level = level
        self.coeffs = tuple(coeffs)

    # -- constructors ------------------------------------------------------
    @classmethod
    def rational(cls, q) -> "CycRat":
        return cls(1, (q if isinstance(q, (int, Fraction)) else Fraction(q),))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycRat":
        """zeta_n ** k."""
        n = int(n)
        if n <= 2:
            return cls.rational(1 if n == 1 or k % 2 == 0 else -1)
        return cls(n, _power_table(n)[k % n])

    # -- internals -----------------------------------------------------------
    def _lift(self, level: int) -> list:
        if level == self.level:
            return list(self.coeffs)
        m = level // self.level
        table = _power_table(level)
        out = [0] * totient(level)
        for k, c in enumerate(self.coeffs):
            if c:
                for i, v in enumerate(table[(k * m) % level]):
                    if v:
                        out[i] += c * v
        return out

    def lift(self, level: int) -> "CycRat":
        if level % self.level:
            raise ValueError(f"cannot embed level {self.level} into level {level}")
        return CycRat(level, self._lift(level))

    @staticmethod
    def _pair(a: "CycRat", b: "CycRat"):
        if a.level == b.level:
            return a.level, a.coeffs, b.coeffs
        L = _lcm(a.level, b.level)
        return L, a._lift(L), b._lift(L)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = as_cyc(other)
        if other is NotImplemented:
            return other
        L, x, y = self._pair(self, other)
        return CycRat(L, [a + b for a, b in zip(x, y)])

    __radd__ = __add__

    def __neg__(self):
        return CycRat(self.level, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = as_cyc(other)
        if other is NotImplemented:
            return other
        L, x, y = self._pair(self, other)
        return CycRat(L, [a - b for a, b in zip(x, y)])

    def __rsub__(self, other):
        other = as_cyc(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return CycRat(self.level, ())
            return CycRat(self.level, [a * other for a in self.coeffs])
        other = as_cyc(other)
        if other is NotImplemented:
            return other
        if other.level == 1:
            c = other.coeffs[0]
            return CycRat(self.level, [a * c for a in self.coeffs])
        if self.level == 1:
            c = self.coeffs[0]
            return CycRat(other.level, [a * c for a in other.coeffs])
        L, x, y = self._pair(self, other)
        d = len(x)
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        out = prod[:d]
        if d > 1:
            table = _power_table(L)
            for j in range(d, 2 * d - 1):
                c = prod[j]
                if c:
                    for k, v in enumerate(table[j % L]):
                        if v:
                            out[k] += c * v
        return CycRat(L, out)

    __rmul__ = __mul__

    def galois(self, k: int) -> "CycRat":
        """Image under the automorphism zeta -> zeta^k (gcd(k, N) = 1)."""
        n = self.level
        if gcd(k, n) != 1:
            raise ValueError("Galois exponent must be a unit modulo the level")
        if n <= 2:
            return self
        table = _power_table(n)
        out = [0] * totient(n)
        for j, c in enumerate(self.coeffs):
            if c:
                for i, v in enumerate(table[(j * k) % n]):
                    if v:
                        out[i] += c * v
        return CycRat(n, out)

    def conjugates(self) -> list:
        return [self.galois(k) for k in _units(self.level)]

    def norm(self) -> Fraction:
        acc = CycRat.rational(1)
        for c in self.conjugates():
            acc = acc * c
        return Fraction(acc.coeffs[0])

    def inverse(self) -> "CycRat":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a cyclotomic field")
        if self.level <= 2:
            return CycRat.rational(1 / Fraction(self.coeffs[0]))
        others = CycRat.rational(1)
        for k in _units(self.level):
            if k != 1:
                others = others * self.galois(k)
        nrm = (self * others).coeffs[0]
        return others * (1 / Fraction(nrm))

    def __truediv__(self, other):
        other = as_cyc(other)
        if other is NotImplemented:
            return other
        if other.level == 1:
            c = other.coeffs[0]
            if not c:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(c))
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_cyc(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = CycRat.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.coeffs[0])

    def __eq__(self, other):
        other = as_cyc(other)
        if other is NotImplemented:
            return False
        L, x, y = self._pair(self, other)
        return all(a == b for a, b in zip(x, y))

    def __hash__(self):
        if self.is_rational():
            return hash(Fraction(self.coeffs[0]))
        w = _trace_weights(self.level)
        return hash(("cyc", sum((c * wi for c, wi in zip(self.coeffs, w)), Fraction(0))))

    def to_complex(self) -> complex:
        n = self.level
        return sum(
            (complex(float(c)) * cmath.exp(2j * cmath.pi * k / n) for k, c in enumerate(self.coeffs) if c),
            0j,
        )

    # -- formatting --------------------------------------------------------
    def __str__(self):
        if self.is_rational():
            return str(Fraction(self.coeffs[0]))
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            c = Fraction(c)
            root = "" if k == 0 else (f"(z{self.level})" if k == 1 else f"(z{self.level})^{k}")
            mag = abs(c)
            if not root:
                body = str(mag)
            elif mag == 1:
                body = root
            else:
                body = f"{mag}*{root}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"CycRat({self})"


def format_term(c: CycRat, mono: str):
    """(sign, body) for the term c*mono; ``mono`` may be empty."""
    if c.is_rational():
        q = Fraction(c.coeffs[0])
        mag = abs(q)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        return ("-" if q < 0 else "+"), body
    nz = sum(1 for x in c.coeffs if x)
    cs = str(c)
    sign = "+"
    if nz == 1:
        if cs.startswith("-"):
            sign, cs = "-", cs[1:]
    else:
        cs = f"({cs})"
    return sign, cs + (f"*{mono}" if mono else "")


def join_terms(parts) -> str:
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def as_cyc(value):
    """Coerce ints, Fractions and CycRats; NotImplemented otherwise."""
    if isinstance(value, CycRat):
        return value
    if isinstance(value, (int, Fraction)):
        return CycRat(1, (value,))
    return NotImplemented


ZERO = CycRat.rational(0)
ONE = CycRat.rational(1)
