"""Exact scalar arithmetic for the algebra layers.

Three coefficient rings are used:

* characteristic 0: plain ``int`` values, widened to ``fractions.Fraction``
  only when a division makes it necessary (the two types mix freely);
* characteristic p: ``prime_field(p)`` returns an ``int`` subclass whose
  arithmetic is reduced mod p;
* deformation polynomials: ``TPoly`` is a sparse polynomial in one formal
  variable t over any of the above, used by the quantized product.

No floating point is ever used here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict


@lru_cache(maxsize=None)
def prime_field(p: int) -> type:
    """Return the field GF(p) as an int subclass (p prime, not checked)."""

    class Fp(int):
        __slots__ = ()
        characteristic = p

        def __new__(cls, value=0):
            return super().__new__(cls, int(value) % p)

        def __add__(self, other):
            return Fp(int(self) + int(other))

        __radd__ = __add__

        def __sub__(self, other):
            return Fp(int(self) - int(other))

        def __rsub__(self, other):
            return Fp(int(other) - int(self))

        def __mul__(self, other):
            return Fp(int(self) * int(other))

        __rmul__ = __mul__

        def __neg__(self):
            return Fp(-int(self))

        def __truediv__(self, other):
            o = int(other) % p
            if o == 0:
                raise ZeroDivisionError("division by zero in GF(%d)" % p)
            return Fp(int(self) * pow(o, -1, p))

        def __pow__(self, n):
            return Fp(pow(int(self), n, p))

        def __repr__(self):
            return "%d" % int(self)

    Fp.__name__ = "GF%d" % p
    return Fp


def coercer(char: int):
    """Return a function mapping ints into the coefficient ring for ``char``."""
    if char == 0:
        return lambda v: v
    return prime_field(char)


def scalar_is_zero(c) -> bool:
    return not c


def format_scalar(c) -> str:
    """Render a coefficient the way the CLI prints it (ints and fractions)."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return "%d/%d" % (c.numerator, c.denominator)
    return str(c)


def parse_scalar(text: str, char: int):
    """Parse an integer or a/b fraction literal into the ring for ``char``."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        if char == 0:
            return Fraction(int(num), int(den))
        fp = prime_field(char)
        return fp(int(num)) / fp(int(den))
    value = int(text)
    return value if char == 0 else prime_field(char)(value)


class TPoly:
    """Sparse exact polynomial in the formal variable t.

    Coefficients live in any of the scalar rings above. Instances are
    immutable in practice: all operations return new objects.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[int, object] | None = None):
        cleaned = {}
        if coeffs:
            for e, c in coeffs.items():
                if c:
                    cleaned[e] = c
        self.coeffs = cleaned

    @staticmethod
    def const(c) -> "TPoly":
        return TPoly({0: c} if c else {})

    @staticmethod
    def t() -> "TPoly":
        return TPoly({1: 1})

    def _as_poly(self, other) -> "TPoly":
        if isinstance(other, TPoly):
            return other
        return TPoly.const(other)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TPoly):
            other = TPoly.const(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        other = self._as_poly(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __rsub__(self, other):
        return self._as_poly(other) + (-self)

    def __mul__(self, other):
        other = self._as_poly(other)
        out: Dict[int, object] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return TPoly(out)

    __rmul__ = __mul__

    def divisible_by_t(self, k: int) -> bool:
        """True when every monomial has t-exponent at least k."""
        return all(e >= k for e in self.coeffs)

    def subs_t(self, value):
        """Evaluate at t = value (exact scalar arithmetic)."""
        total = 0
        for e, c in self.coeffs.items():
            term = c
            for _ in range(e):
                term = term * value
            total = total + term
        return total

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            cs = format_scalar(c)
            if e == 0:
                parts.append(cs)
            elif e == 1:
                parts.append("t" if cs == "1" else ("-t" if cs == "-1" else cs + "*t"))
            else:
                base = "t^%d" % e
                parts.append(base if cs == "1" else ("-" + base if cs == "-1" else cs + "*" + base))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out
