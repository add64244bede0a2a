"""Sparse multivariate polynomials and rational functions over GF(2).

Monomials are packed into Python ints, one fixed-width bit field per
variable, variable 0 in the most significant field.  With that layout integer
addition multiplies monomials and integer comparison is the lex order, so the
leading term of a polynomial is simply ``max(terms)``.

Rational functions keep an expanded numerator and a factored denominator
``((factor, exponent), ...)``.  There is no multivariate gcd: identical
denominator factors are merged and factors that divide the numerator exactly
are cancelled by trial division.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .fields import Field, FieldError

FIELD_BITS = 16


class PolyRing2:
    """Variable context for :class:`Poly2`; variables are arbitrary hashables."""

    def __init__(self, variables: Sequence[Hashable], bits: int = FIELD_BITS):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        self.nvars = len(self.variables)
        self.bits = bits
        self.index = {v: i for i, v in enumerate(self.variables)}
        self._shift = [(self.nvars - 1 - i) * bits for i in range(self.nvars)]
        self._fmask = (1 << bits) - 1
        self._guard = sum(1 << (s + bits - 1) for s in self._shift)

    def __repr__(self):
        return f"PolyRing2({self.nvars} vars)"

    # -- monomials
    def unit(self, var: Hashable) -> int:
        return 1 << self._shift[self.index[var]]

    def exponent(self, mono: int, i: int) -> int:
        return (mono >> self._shift[i]) & self._fmask

    def exponents(self, mono: int) -> tuple[int, ...]:
        return tuple(self.exponent(mono, i) for i in range(self.nvars))

    def monomial(self, exps: Mapping[Hashable, int]) -> int:
        out = 0
        for v, e in exps.items():
            if e >= 1 << (self.bits - 1):
                raise OverflowError("exponent too large for packed monomial")
            out += e << self._shift[self.index[v]]
        return out

    def divides(self, a: int, b: int) -> bool:
        """True iff monomial a divides monomial b."""
        g = self._guard
        return ((b | g) - a) & g == g

    # -- constructors
    def zero(self) -> Poly2:
        return Poly2(self, frozenset())

    def one(self) -> Poly2:
        return Poly2(self, frozenset((0,)))

    def var(self, v: Hashable) -> Poly2:
        return Poly2(self, frozenset((self.unit(v),)))

    def from_terms(self, terms: Iterable[int]) -> Poly2:
        acc: set[int] = set()
        for t in terms:
            acc ^= {t}
        return Poly2(self, frozenset(acc))


class Poly2:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing2, terms: frozenset):
        self.ring = ring
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == frozenset((0,))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other: Poly2) -> Poly2:
        return Poly2(self.ring, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: Poly2) -> Poly2:
        if not self.terms or not other.terms:
            return self.ring.zero()
        if other.is_one():
            return self
        if self.is_one():
            return other
        acc: set[int] = set()
        for a in self.terms:
            for b in other.terms:
                m = a + b
                if m in acc:
                    acc.remove(m)
                else:
                    acc.add(m)
        return Poly2(self.ring, frozenset(acc))

    def __pow__(self, e: int) -> Poly2:
        out, base = self.ring.one(), self
        while e:
            if e & 1:
                out = out * base
            base = base.square()
            e >>= 1
        return out

    def square(self) -> Poly2:
        # Frobenius: cross terms cancel in characteristic 2
        return Poly2(self.ring, frozenset(t + t for t in self.terms))

    def lead(self) -> int:
        return max(self.terms)

    def degree(self) -> int:
        r = self.ring
        return max((sum(r.exponents(t)) for t in self.terms), default=-1)

    def derivative(self, var: Hashable) -> Poly2:
        r = self.ring
        i = r.index[var]
        u = r.unit(var)
        return Poly2(r, frozenset(t - u for t in self.terms if r.exponent(t, i) & 1))

    def divexact(self, other: Poly2) -> Poly2 | None:
        """Quotient if ``other`` divides ``self`` exactly, else None."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_one():
            return self
        r = self.ring
        lead = other.lead()
        rem = set(self.terms)
        quo: set[int] = set()
        while rem:
            t = max(rem)
            if not r.divides(lead, t):
                return None
            q = t - lead
            quo.add(q)
            for s in other.terms:
                m = s + q
                if m in rem:
                    rem.remove(m)
                else:
                    rem.add(m)
        return Poly2(r, frozenset(quo))

    def evaluate(self, field: Field, values: Sequence) -> object:
        """Evaluate at ``values[i]`` for variable i, in a characteristic-2 field."""
        r = self.ring
        cache: dict[tuple[int, int], object] = {}
        total = field.zero
        for t in self.terms:
            term = field.one
            for i in range(r.nvars):
                e = r.exponent(t, i)
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = field.power(values[i], e)
                    term = field.mul(term, cache[key])
            total = field.add(total, term)
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        r = self.ring
        parts = []
        for t in sorted(self.terms, reverse=True):
            exps = r.exponents(t)
            factors = [
                f"{_fmt_var(v)}" + (f"^{e}" if e > 1 else "")
                for v, e in zip(r.variables, exps)
                if e
            ]
            parts.append("*".join(factors) or "1")
        return " + ".join(parts)


def _fmt_var(v: Hashable) -> str:
    if isinstance(v, tuple):
        return "t" + "_".join(str(x) for x in v)
    return str(v)


def _factor_key(p: Poly2) -> tuple:
    return (len(p.terms), tuple(sorted(p.terms)))


class RationalFn2:
    """Quotient ``num / prod(f**e for f, e in den)`` over GF(2)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly2, den: tuple = ()):
        self.num = num
        self.den = den

    @property
    def ring(self) -> PolyRing2:
        return self.num.ring

    @classmethod
    def make(cls, num: Poly2, den: Iterable[tuple[Poly2, int]] = ()) -> RationalFn2:
        merged: dict[Poly2, int] = {}
        for f, e in den:
            if f.is_zero():
                raise ZeroDivisionError("zero denominator")
            if f.is_one() or e == 0:
                continue
            merged[f] = merged.get(f, 0) + e
        if num.is_zero():
            return cls(num, ())
        for f in list(merged):
            while merged[f]:
                q = num.divexact(f)
                if q is None:
                    break
                num = q
                merged[f] -= 1
        items = sorted(((f, e) for f, e in merged.items() if e), key=lambda fe: _factor_key(fe[0]))
        return cls(num, tuple(items))

    def den_poly(self) -> Poly2:
        out = self.ring.one()
        for f, e in self.den:
            out = out * f**e
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def size(self) -> int:
        return len(self.num.terms) + sum(len(f.terms) * e for f, e in self.den)

    def _common(self, other: RationalFn2):
        mine = dict(self.den)
        theirs = dict(other.den)
        lcm = {f: max(mine.get(f, 0), theirs.get(f, 0)) for f in set(mine) | set(theirs)}
        r = self.ring
        a, b = r.one(), r.one()
        for f, e in lcm.items():
            if e - mine.get(f, 0):
                a = a * f ** (e - mine.get(f, 0))
            if e - theirs.get(f, 0):
                b = b * f ** (e - theirs.get(f, 0))
        return self.num * a, other.num * b, lcm

    def __add__(self, other: RationalFn2) -> RationalFn2:
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return RationalFn2.make(self.num + other.num, self.den)
        x, y, lcm = self._common(other)
        return RationalFn2.make(x + y, lcm.items())

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other: RationalFn2) -> RationalFn2:
        if self.is_zero() or other.is_zero():
            return RationalFn2(self.ring.zero())
        return RationalFn2.make(self.num * other.num, self.den + other.den)

    def inverse(self) -> RationalFn2:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFn2.make(self.den_poly(), ((self.num, 1),))

    def __truediv__(self, other: RationalFn2) -> RationalFn2:
        return self * other.inverse()

    def square(self) -> RationalFn2:
        return RationalFn2(self.num.square(), tuple((f, 2 * e) for f, e in self.den))

    def __pow__(self, e: int) -> RationalFn2:
        out = RationalFn2(self.ring.one())
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFn2):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        x, y, _ = self._common(other)
        return x == y

    __hash__ = None  # equality is by cross-multiplication

    def derivative(self, var: Hashable) -> RationalFn2:
        """Formal partial derivative (quotient rule, characteristic 2)."""
        r = self.ring
        odd = [f for f, e in self.den if e & 1]
        prod_odd = r.one()
        for f in odd:
            prod_odd = prod_odd * f
        top = self.num.derivative(var) * prod_odd
        for i, f in enumerate(odd):
            rest = r.one()
            for j, g in enumerate(odd):
                if j != i:
                    rest = rest * g
            top = top + self.num * f.derivative(var) * rest
        return RationalFn2.make(top, self.den + tuple((f, 1) for f in odd))

    def evaluate(self, field: Field, values: Sequence):
        d = field.one
        for f, e in self.den:
            d = field.mul(d, field.power(f.evaluate(field, values), e))
        if field.is_zero(d):
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return field.div(self.num.evaluate(field, values), d)

    def __repr__(self):
        if not self.den:
            return f"({self.num!r})"
        den = " * ".join(f"({f!r})" + (f"^{e}" if e > 1 else "") for f, e in self.den)
        return f"({self.num!r}) / {den}"


class RationalFunctionField2(Field):
    """GF(2)(variables) as a field backend for the generic linear algebra."""

    characteristic = 2
    order = None

    def __init__(self, ring: PolyRing2):
        self.ring = ring
        self.zero = RationalFn2(ring.zero())
        self.one = RationalFn2(ring.one())
        self.name = f"GF(2)({ring.nvars} vars)"

    def var(self, v: Hashable) -> RationalFn2:
        return RationalFn2(self.ring.var(v))

    def add(self, a, b):
        return a + b

    sub = add

    def neg(self, a):
        return a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def eq(self, a, b) -> bool:
        return a == b

    def from_int(self, n: int):
        return self.one if n & 1 else self.zero

    def choose_pivot(self, column: np.ndarray) -> int:
        return int(np.argmin([x.size() for x in column]))

    def to_json(self, a):
        return repr(a)

    def element_from_key(self, *parts):
        raise FieldError("symbolic backend has no random elements")


def square_free_split(p: Poly2) -> dict[int, Poly2]:
    """Write p = sum_e m_e * g_e(squares) with m_e square-free.

    Returns ``{parity_monomial: g}`` where g is expressed in the *halved*
    exponents, i.e. ``p = sum_e m_e * g_e(theta^2)``.
    """
    r = p.ring
    out: dict[int, set[int]] = {}
    for t in p.terms:
        parity = 0
        for i in range(r.nvars):
            if r.exponent(t, i) & 1:
                parity += 1 << r._shift[i]
        out.setdefault(parity, set()).add(_halve(r, t - parity))
    return {k: Poly2(r, frozenset(v)) for k, v in out.items()}


def _halve(r: PolyRing2, t: int) -> int:
    out = 0
    for i in range(r.nvars):
        e = r.exponent(t, i)
        out += (e // 2) << r._shift[i]
    return out
