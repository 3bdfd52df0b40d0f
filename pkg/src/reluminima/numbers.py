"""Exact rational scalars, high-precision reals, and outward-rounded intervals.

Rationals are gmpy2 ``mpq`` values (always reduced, positive denominator).
High-precision reals are mpmath ``mpf`` values evaluated under an explicit
working precision.  Intervals wrap mpmath's outward-rounded interval
arithmetic so that the true value is always enclosed.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from gmpy2 import mpq, mpz

from .errors import ParseError

DEFAULT_PRECISION = 256  # bits


def parse_rational(text):
    """Parse "p/q", an integer, or a finite decimal string into an exact mpq.

    Decimal strings convert exactly ("0.44" -> 11/25).  Anything else
    (floats with exponents, irrational markers) is rejected.
    """
    if isinstance(text, (int, mpz)):
        return mpq(text)
    if isinstance(text, mpq):
        return text
    s = str(text).strip()
    if not s:
        raise ParseError("empty rational literal")
    if "e" in s.lower():
        raise ParseError(f"exponent notation is not exact: {text!r}")
    try:
        if "." in s:
            return mpq(Fraction(s))
        return mpq(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed rational literal: {text!r}") from exc


def format_rational(q):
    """Canonical text form: "p" for integers, "p/q" otherwise."""
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def to_mpf(value, prec=DEFAULT_PRECISION):
    """Convert an exact rational (or mpf) to an mpf at the given binary precision."""
    with mpmath.workprec(prec):
        if isinstance(value, mpq):
            return mpmath.mpf(value.numerator) / mpmath.mpf(value.denominator)
        return mpmath.mpf(value)


def rational_from_mpf(x):
    """Exact dyadic rational equal to the given mpf (mpf values are m * 2**e)."""
    if hasattr(x, "_mpf_"):
        sign, man, exp, _ = x._mpf_
    else:
        sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return mpq(0)
    q = mpq(int(man))
    if exp >= 0:
        q = q * (mpz(2) ** exp)
    else:
        q = q / (mpz(2) ** (-exp))
    return -q if sign else q


class RealInterval:
    """Closed interval [lower, upper] with outward-rounded arithmetic."""

    __slots__ = ("_iv",)

    def __init__(self, lower, upper=None, prec=DEFAULT_PRECISION):
        if upper is None:
            if isinstance(lower, RealInterval):
                self._iv = lower._iv
                return
            self._iv = lower  # an mpmath iv value
            return
        lo = to_mpf(lower, prec) if isinstance(lower, mpq) else lower
        hi = to_mpf(upper, prec) if isinstance(upper, mpq) else upper
        self._iv = mpmath.iv.mpf([lo, hi])

    @classmethod
    def from_rational(cls, q, prec=DEFAULT_PRECISION):
        q = mpq(q)
        num = mpmath.iv.mpf(int(q.numerator))
        den = mpmath.iv.mpf(int(q.denominator))
        return cls(num / den)

    @property
    def lower(self):
        return mpmath.mpf(self._iv.a)

    @property
    def upper(self):
        return mpmath.mpf(self._iv.b)

    def contains(self, value):
        if isinstance(value, mpq):
            lo = rational_from_mpf(self.lower)
            hi = rational_from_mpf(self.upper)
            return lo <= value <= hi
        return self.lower <= value <= self.upper

    def contains_zero(self):
        return self.contains(mpq(0))

    def width(self):
        return self.upper - self.lower

    def _coerce(self, other):
        if isinstance(other, RealInterval):
            return other._iv
        if isinstance(other, mpq):
            return RealInterval.from_rational(other)._iv
        return mpmath.iv.mpf(other)

    def __add__(self, other):
        return RealInterval(self._iv + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RealInterval(self._iv - self._coerce(other))

    def __mul__(self, other):
        return RealInterval(self._iv * self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k):
        result = mpmath.iv.mpf(1)
        for _ in range(k):
            result = result * self._iv
        return RealInterval(result)

    def __repr__(self):
        return f"RealInterval([{self.lower}, {self.upper}])"
