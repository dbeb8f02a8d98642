"""Sparse multivariate polynomials over cyclotomic fields, plus a text parser.

Grammar: integers, identifiers (optionally primed, e.g. ``x'``), roots of
unity written ``(zN)``, the operators ``+ - * / ^`` (``**`` is accepted
as ``^``) and parentheses.  Division is only allowed by nonzero constants.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .cyclo import CycRat, as_cyc, format_term, join_terms
from .errors import DivisionByZero, ParseError, UnknownVariable

__all__ = ["Poly", "parse_poly"]


def _cyc(c):
    v = as_cyc(c)
    if v is NotImplemented:
        raise TypeError(f"unsupported coefficient {c!r}")
    return v


class Poly:
    __slots__ = ("vars", "terms")

    def __init__(self, vars=(), terms=None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError("exponent length does not match variables")
            c = _cyc(c)
            if c:
                clean[e] = clean[e] + c if e in clean else c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def var(cls, name: str, vars=None) -> "Poly":
        vars = tuple(vars) if vars is not None else (name,)
        if name not in vars:
            raise UnknownVariable(name)
        e = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {e: 1})

    @classmethod
    def const(cls, c, vars=()) -> "Poly":
        return cls(vars, {(0,) * len(tuple(vars)): c})

    @classmethod
    def _raw(cls, vars, terms):
        p = cls.__new__(cls)
        p.vars = vars
        p.terms = terms
        return p

    # -- variable bookkeeping ------------------------------------------------
    def with_vars(self, vars) -> "Poly":
        """Re-express over ``vars``; every used variable must be present."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = {v: i for i, v in enumerate(vars)}
        used = self.used_vars()
        for v in used:
            if v not in idx:
                raise UnknownVariable(v)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for v, k in zip(self.vars, e):
                if k:
                    ne[idx[v]] = k
            out[tuple(ne)] = c
        return Poly._raw(vars, out)

    def used_vars(self) -> tuple:
        return tuple(v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms))

    def _align(self, other: "Poly"):
        if self.vars == other.vars:
            return self, other
        vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.with_vars(vars), other.with_vars(vars)

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        c = as_cyc(other)
        if c is NotImplemented:
            return NotImplemented
        return Poly.const(c, self.vars)

    def rename(self, mapping: dict) -> "Poly":
        vars = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(vars)) != len(vars):
            raise ValueError("renaming merges variables")
        return Poly._raw(vars, dict(self.terms))

    def primed(self, names=None) -> "Poly":
        names = self.vars if names is None else names
        return self.rename({v: v + "'" for v in names})

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            if e in out:
                s = out[e] + c
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return Poly._raw(a.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.vars, {e: -c for e, c in self.terms.items()})

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

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._align(other)
        out = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return Poly._raw(a.vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Poly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        c = other
        if isinstance(other, Poly):
            if not other.is_constant():
                raise ValueError("division by a non-constant polynomial")
            c = other.constant_term()
        c = as_cyc(c)
        if c is NotImplemented:
            return c
        if not c:
            raise DivisionByZero("division by zero")
        inv = c.inverse()
        return Poly._raw(self.vars, {e: v * inv for e, v in self.terms.items()})

    def scale(self, c) -> "Poly":
        c = _cyc(c)
        if not c:
            return Poly._raw(self.vars, {})
        return Poly._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def partial(self, name: str) -> "Poly":
        if name not in self.vars:
            raise UnknownVariable(f"{name} is not a variable of this polynomial")
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.vars, out)

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> CycRat:
        return self.terms.get((0,) * len(self.vars), CycRat.rational(0))

    def degree(self, name=None) -> int:
        """Total degree, or degree in one variable; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        if name not in self.vars:
            return 0
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def order(self) -> int:
        """Lowest total degree of a term; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return min(sum(e) for e in self.terms)

    def coefficients_rational(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._raw(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def truncate_degree(self, d: int) -> "Poly":
        """Drop every term of total degree >= d."""
        return Poly._raw(self.vars, {e: c for e, c in self.terms.items() if sum(e) < d})

    def items(self):
        return sorted(self.terms.items(), key=lambda it: (-sum(it[0]), tuple(-k for k in it[0])))

    # -- evaluation ------------------------------------------------------------
    def evaluate(self, point: dict) -> CycRat:
        used = self.used_vars()
        for v in used:
            if v not in point:
                raise UnknownVariable(v)
        vals = [_cyc(point[v]) if v in point else None for v in self.vars]
        cache = {}
        acc = CycRat.rational(0)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = vals[i] ** k
                    term = term * cache[key]
            acc = acc + term
        return acc

    def subs(self, assignment: dict) -> "Poly":
        """Substitute polynomials (or constants) for some variables."""
        keep = tuple(v for v in self.vars if v not in assignment)
        values = {}
        for v, val in assignment.items():
            if v in self.vars:
                values[v] = val if isinstance(val, Poly) else Poly.const(_cyc(val), ())
        result = Poly._raw(keep, {})
        powers = {}
        for e, c in self.terms.items():
            rest = tuple(k for v, k in zip(self.vars, e) if v not in assignment)
            term = Poly._raw(keep, {rest: c})
            for v, k in zip(self.vars, e):
                if k and v in values:
                    key = (v, k)
                    if key not in powers:
                        powers[key] = values[v] ** k
                    term = term * powers[key]
            result = result + term
        return result

    def substitute(self, assignment: dict):
        """Substitute Puiseux series for every used variable; returns a PSeries."""
        from .series import PSeries

        used = self.used_vars()
        for v in used:
            if v not in assignment:
                raise UnknownVariable(v)
        idx = [i for i, v in enumerate(self.vars) if v in used]
        powers = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if k == 1:
                    powers[key] = assignment[self.vars[i]]
                else:
                    h = k // 2
                    p = power(i, h) * power(i, k - h)
                    powers[key] = p
            return powers[key]

        acc = PSeries.zero()
        for e, c in self.terms.items():
            term = None
            for i in idx:
                if e[i]:
                    p = power(i, e[i])
                    term = p if term is None else term * p
            if term is None:
                term = PSeries.constant(c)
            else:
                term = term.scale(c)
            acc = acc + term
        return acc

    # -- comparison & display ---------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        used = tuple(sorted(self.used_vars()))
        p = self.with_vars(used)
        return hash((used, frozenset(p.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join((v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k)
            parts.append(format_term(c, mono))
        return join_terms(parts)

    def __repr__(self):
        return f"Poly({self})"


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<root>\(\s*z(?P<level>\d+)\s*\))|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("root"):
            level = int(m.group("level"))
            if level < 1:
                raise ParseError("root of unity order must be positive", start)
            out.append(("root", level, start))
        elif m.group("num"):
            out.append(("num", int(m.group("num")), start))
        elif m.group("ident"):
            out.append(("ident", m.group("ident"), start))
        else:
            op = m.group("op")
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, n))
    return out


class _Parser:
    def __init__(self, text, vars):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = vars

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def parse(self):
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return p

    def expr(self):
        p = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                q = self.term()
                p = p + q if t[1] == "+" else p - q
            else:
                return p

    def term(self):
        p = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                q = self.unary()
                if t[1] == "*":
                    p = p * q
                else:
                    if not q.is_constant():
                        raise ParseError("division by a non-constant", t[2])
                    if q.is_zero():
                        raise ParseError("division by zero", t[2])
                    p = p / q
            elif t[0] in ("num", "ident", "root") or (t[0] == "op" and t[1] == "("):
                # implicit multiplication such as 2x or 3(z5)
                q = self.unary()
                p = p * q
            else:
                return p

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            e = self.peek()
            if e[0] == "op" and e[1] == "-":
                self.take()
                sign = -1
                e = self.peek()
            if e[0] == "op" and e[1] == "(":
                self.take()
                e = self.take()
                if e[0] != "num":
                    raise ParseError("exponent must be an integer", e[2])
                self.expect_op(")")
            else:
                e = self.take()
                if e[0] != "num":
                    raise ParseError("exponent must be an integer", e[2])
            k = sign * e[1]
            if k < 0:
                if not base.is_constant() or base.is_zero():
                    raise ParseError("negative exponent of a non-constant", e[2])
                return Poly.const(base.constant_term() ** k, base.vars)
            return base ** k
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return Poly.const(val, ())
        if kind == "root":
            return Poly.const(CycRat.zeta(val, 1), ())
        if kind == "ident":
            if self.vars is not None and val not in self.vars:
                raise UnknownVariable(val)
            return Poly.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_poly(text: str, vars=None) -> Poly:
    """Parse ``text``; with ``vars`` the result uses that variable order."""
    if not isinstance(text, str):
        raise TypeError("expected a string")
    vars = None if vars is None else tuple(vars)
    p = _Parser(text, vars).parse()
    if vars is None:
        return p.with_vars(tuple(sorted(p.used_vars())))
    return p.with_vars(vars)


def parse_number(text: str) -> CycRat:
    """Parse a constant expression such as ``3/2`` or ``1 + (z5)``."""
    p = parse_poly(text, vars=())
    return p.constant_term()


def fraction_of(text: str) -> Fraction:
    return parse_number(text).to_fraction()
