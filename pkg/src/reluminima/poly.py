"""Sparse multivariate polynomials and rational functions over exact rationals.

Variables live in a fixed ``VariableSet`` listed in decreasing significance;
monomials are exponent tuples aligned with that list.  Two monomial orders are
provided (lexicographic and graded reverse lexicographic).  Rational functions
are numerator/denominator pairs that are never reduced by multivariate GCD —
only integer content is normalized.
"""

from __future__ import annotations

import re
from functools import reduce

import mpmath
from gmpy2 import gcd as _zgcd
from gmpy2 import lcm as _zlcm
from gmpy2 import mpq, mpz

from .errors import ParseError, PoleError, StructuralError, ZeroPolynomialError
from .numbers import RealInterval, format_rational, to_mpf

ROLE_PARAMETER = "parameter"
ROLE_MULTIPLIER = "multiplier"
ROLE_SATURATION = "saturation"


class VariableSet:
    """An ordered list of named variables with per-variable roles.

    Names are listed in DECREASING significance: position 0 is the greatest
    variable under every monomial order built on this set.  Auxiliary
    variables (the saturation variable, then the multiplier) always precede
    the network parameters b_11 .. b_Ld, c_1 .. c_L.
    """

    __slots__ = ("names", "roles", "_index")

    def __init__(self, names, roles=None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise StructuralError(f"duplicate variable names in {self.names}")
        if roles is None:
            roles = {name: ROLE_PARAMETER for name in self.names}
        self.roles = dict(roles)
        self._index = {name: i for i, name in enumerate(self.names)}

    @classmethod
    def network(cls, L, d, multiplier=False, saturation=False):
        """Variables for a width-L, input-dimension-d network.

        Parameter order is b_11, ..., b_1d, b_21, ..., b_Ld, c_1, ..., c_L
        (most significant first among parameters); the multiplier and the
        saturation variable, when present, are strictly greater.
        """
        names = []
        roles = {}
        if saturation:
            names.append("Y")
            roles["Y"] = ROLE_SATURATION
        if multiplier:
            names.append("beta")
            roles["beta"] = ROLE_MULTIPLIER
        for ell in range(1, L + 1):
            for j in range(1, d + 1):
                name = f"b_{ell}{j}"
                names.append(name)
                roles[name] = ROLE_PARAMETER
        for ell in range(1, L + 1):
            name = f"c_{ell}"
            names.append(name)
            roles[name] = ROLE_PARAMETER
        return cls(names, roles)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError(f"unknown variable {name!r}") from None

    def parameters(self):
        return [n for n in self.names if self.roles[n] == ROLE_PARAMETER]

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, VariableSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableSet({list(self.names)})"

    def extended(self, extra_names, role):
        """A new set with extra (more significant) variables prepended."""
        names = list(extra_names) + list(self.names)
        roles = dict(self.roles)
        for n in extra_names:
            roles[n] = role
        return VariableSet(names, roles)

    def restricted(self, keep_names):
        """A new set containing only the kept names, significance preserved."""
        keep = set(keep_names)
        names = [n for n in self.names if n in keep]
        roles = {n: self.roles[n] for n in names}
        return VariableSet(names, roles)


def monomial_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a, b):
    """True if monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(a, b):
    """Quotient a / b; caller must ensure divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def monomial_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_degree(a):
    return sum(a)


class MonomialOrder:
    """Lexicographic, graded reverse lexicographic, or block elimination order.

    Lex: the greater monomial has a positive leftmost nonzero entry in the
    exponent difference.  Grevlex: higher total degree wins; on equal degree
    the greater monomial has a NEGATIVE rightmost nonzero entry in the
    difference.  "elim:k" compares the first k exponents lexicographically and
    breaks ties by grevlex on the remaining variables; any monomial touching
    the first k variables is greater than any monomial free of them, so the
    block-free basis elements form a grevlex basis of the elimination ideal.
    """

    __slots__ = ("tag", "block")

    def __init__(self, tag):
        self.block = 0
        if tag.startswith("elim:"):
            self.block = int(tag[5:])
            if self.block < 1:
                raise StructuralError("elimination block must be positive")
        elif tag not in ("lex", "grevlex"):
            raise StructuralError(f"unknown monomial order {tag!r}")
        self.tag = tag

    def key(self, m):
        """Sort key: ascending in this order."""
        if self.tag == "lex":
            return m
        if self.block:
            rest = m[self.block:]
            return (m[:self.block], sum(rest),
                    tuple(-e for e in reversed(rest)))
        return (sum(m), tuple(-e for e in reversed(m)))

    def compare(self, a, b):
        """-1, 0, or +1 as a <, =, > b."""
        if len(a) != len(b):
            raise StructuralError("monomials over different variable sets")
        ka, kb = self.key(a), self.key(b)
        if ka < kb:
            return -1
        if ka > kb:
            return 1
        return 0

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f"MonomialOrder({self.tag!r})"


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


class Polynomial:
    """Sparse polynomial: map from exponent tuple to nonzero rational coefficient."""

    __slots__ = ("varset", "terms")

    def __init__(self, varset, terms=None):
        self.varset = varset
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = mpq(coeff)
                if coeff != 0:
                    mono = tuple(int(e) for e in mono)
                    if len(mono) != len(varset):
                        raise StructuralError("monomial length mismatch")
                    clean[mono] = clean.get(mono, mpq(0)) + coeff
                    if clean[mono] == 0:
                        del clean[mono]
        self.terms = clean

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, varset):
        return cls(varset, {})

    @classmethod
    def constant(cls, varset, value):
        value = mpq(value)
        if value == 0:
            return cls.zero(varset)
        return cls(varset, {(0,) * len(varset): value})

    @classmethod
    def variable(cls, varset, name):
        mono = [0] * len(varset)
        mono[varset.index(name)] = 1
        return cls(varset, {tuple(mono): mpq(1)})

    @classmethod
    def monomial(cls, varset, mono, coeff=1):
        return cls(varset, {tuple(mono): mpq(coeff)})

    # ---- predicates ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(monomial_degree(m) == 0 for m in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.varset), mpq(0))

    def total_degree(self):
        if not self.terms:
            return -1
        return max(monomial_degree(m) for m in self.terms)

    def variables_used(self):
        used = set()
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e:
                    used.add(self.varset.names[i])
        return used

    # ---- arithmetic ---------------------------------------------------

    def _check(self, other):
        if self.varset != other.varset:
            raise StructuralError("operands use different variable sets")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.varset, other)
        self._check(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = terms.get(mono, mpq(0)) + coeff
            if s == 0:
                terms.pop(mono, None)
            else:
                terms[mono] = s
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.varset, other)
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.constant(self.varset, other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = monomial_mul(m1, m2)
                s = terms.get(m, mpq(0)) + c1 * c2
                if s == 0:
                    terms.pop(m, None)
                else:
                    terms[m] = s
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = terms
        return out

    __rmul__ = __mul__

    def scale(self, k):
        k = mpq(k)
        if k == 0:
            return Polynomial.zero(self.varset)
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = {m: c * k for m, c in self.terms.items()}
        return out

    def __pow__(self, k):
        if k < 0:
            raise StructuralError("negative polynomial power")
        result = Polynomial.constant(self.varset, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if self.is_constant():
                return self.constant_value() == mpq(other)
            return False
        return self.varset == other.varset and self.terms == other.terms

    def __hash__(self):
        return hash((self.varset, frozenset(self.terms.items())))

    # ---- order-dependent views ----------------------------------------

    def sorted_terms(self, order, reverse=True):
        """Terms sorted by the order (descending by default)."""
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=reverse)

    def leading_term(self, order):
        """(monomial, coefficient) maximal under the order."""
        if not self.terms:
            raise ZeroPolynomialError("zero polynomial has no leading monomial")
        mono = max(self.terms, key=order.key)
        return mono, self.terms[mono]

    def leading_monomial(self, order):
        return self.leading_term(order)[0]

    # ---- calculus and evaluation ---------------------------------------

    def derivative(self, name):
        i = self.varset.index(name)
        terms = {}
        for mono, coeff in self.terms.items():
            e = mono[i]
            if e == 0:
                continue
            lowered = list(mono)
            lowered[i] = e - 1
            terms[tuple(lowered)] = coeff * e
        return Polynomial(self.varset, terms)

    def evaluate(self, point):
        """Evaluate at a full point (mpq / mpf / RealInterval entries)."""
        if len(point) != len(self.varset):
            raise StructuralError("point length does not match variable count")
        exact = all(isinstance(v, (int, type(mpq(0)))) for v in point)
        interval = any(isinstance(v, RealInterval) for v in point)
        if exact:
            total = mpq(0)
            for mono, coeff in self.terms.items():
                term = coeff
                for v, e in zip(point, mono):
                    if e:
                        term = term * mpq(v) ** e
                total += term
            return total
        if interval:
            pt = [v if isinstance(v, RealInterval) else RealInterval.from_rational(mpq(v))
                  if isinstance(v, (int, type(mpq(0)))) else RealInterval(mpmath.iv.mpf(v))
                  for v in point]
            total = RealInterval(mpmath.iv.mpf(0))
            for mono, coeff in self.terms.items():
                term = RealInterval.from_rational(coeff)
                for v, e in zip(pt, mono):
                    if e:
                        term = term * (v ** e)
                total = total + term
            return total
        total = mpmath.mpf(0)
        for mono, coeff in self.terms.items():
            term = to_mpf(coeff, mpmath.mp.prec)
            for v, e in zip(point, mono):
                if e:
                    term = term * mpmath.mpf(v) ** e
            total += term
        return total

    def substitute(self, name, replacement):
        """Replace one variable by a polynomial (same or compatible varset)."""
        i = self.varset.index(name)
        if replacement.varset != self.varset:
            replacement = replacement.project(self.varset)
        powers = [Polynomial.constant(self.varset, 1)]
        out = Polynomial(self.varset, {})
        for mono, coeff in self.terms.items():
            e = mono[i]
            while len(powers) <= e:
                powers.append(powers[-1] * replacement)
            base = list(mono)
            base[i] = 0
            out = out + Polynomial.monomial(self.varset, tuple(base),
                                            coeff) * powers[e]
        return out

    def substitute_partial(self, bindings):
        """Substitute exact rationals for a subset of variables."""
        indices = {self.varset.index(name): mpq(val) for name, val in bindings.items()}
        terms = {}
        for mono, coeff in self.terms.items():
            value = coeff
            new_mono = list(mono)
            for i, val in indices.items():
                e = mono[i]
                if e:
                    value = value * val ** e
                new_mono[i] = 0
            if value == 0:
                continue
            key = tuple(new_mono)
            s = terms.get(key, mpq(0)) + value
            if s == 0:
                terms.pop(key, None)
            else:
                terms[key] = s
        out = Polynomial.__new__(Polynomial)
        out.varset = self.varset
        out.terms = terms
        return out

    def project(self, new_varset):
        """Re-express over a sub- or super- variable set (shared names)."""
        positions = []
        for name in new_varset.names:
            positions.append(self.varset._index.get(name, -1))
        back = {name: i for i, name in enumerate(new_varset.names)}
        terms = {}
        for mono, coeff in self.terms.items():
            new_mono = [0] * len(new_varset)
            ok = True
            for i, e in enumerate(mono):
                if not e:
                    continue
                j = back.get(self.varset.names[i])
                if j is None:
                    ok = False
                    break
                new_mono[j] = e
            if not ok:
                raise StructuralError(
                    f"polynomial uses variable absent from target set")
            terms[tuple(new_mono)] = coeff
        return Polynomial(new_varset, terms)

    # ---- normalization -------------------------------------------------

    def content(self):
        """Positive rational content: gcd of coefficient numerators over lcm of denominators."""
        if not self.terms:
            return mpq(1)
        nums = [abs(c.numerator) for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = reduce(_zgcd, nums)
        l = reduce(_zlcm, dens)
        return mpq(g, l)

    def primitive(self, order=GREVLEX):
        """Divide out the content and make the leading coefficient positive."""
        if not self.terms:
            return self
        c = self.content()
        _, lead = self.leading_term(order)
        if lead < 0:
            c = -c
        return self.scale(1 / c)

    def monic(self, order):
        _, lead = self.leading_term(order)
        return self.scale(1 / lead)

    # ---- text form -----------------------------------------------------

    def to_text(self, order=GREVLEX):
        """Canonical text: terms descending in the order, explicit rationals."""
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms(order):
            factors = []
            for name, e in zip(self.varset.names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = format_rational(abs(coeff))
            if factors:
                body = "*".join(factors)
                if mag != "1":
                    body = mag + "*" + body
            else:
                body = mag
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    @classmethod
    def from_text(cls, varset, text):
        """Parse the canonical text form (also tolerant of missing '*' before '(')."""
        s = text.strip()
        if not s:
            raise ParseError("empty polynomial text")
        if s == "0":
            return cls.zero(varset)
        # Split into signed terms at top level.
        s = s.replace("**", "^")
        tokens = re.split(r"(?=[+-])", s.replace(" ", ""))
        poly = cls.zero(varset)
        for token in tokens:
            if not token:
                continue
            sign = 1
            while token and token[0] in "+-":
                if token[0] == "-":
                    sign = -sign
                token = token[1:]
            if not token:
                raise ParseError(f"dangling sign in {text!r}")
            coeff = mpq(sign)
            mono = [0] * len(varset)
            for factor in token.split("*"):
                if not factor:
                    raise ParseError(f"empty factor in {text!r}")
                if factor[0].isdigit():
                    m = re.fullmatch(r"(\d+(?:/\d+)?)(?:\^(\d+))?", factor)
                    if not m:
                        raise ParseError(f"bad numeric factor {factor!r}")
                    base = mpq(m.group(1))
                    exp = int(m.group(2) or 1)
                    coeff *= base ** exp
                else:
                    m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*?)(?:\^(\d+))?", factor)
                    if not m:
                        raise ParseError(f"bad variable factor {factor!r}")
                    name = m.group(1)
                    exp = int(m.group(2) or 1)
                    mono[varset.index(name)] += exp
            poly = poly + cls.monomial(varset, mono, coeff)
        return poly

    def __repr__(self):
        return f"Polynomial({self.to_text()})"


def _normalize_pair(num, den, order=GREVLEX):
    """Scale num/den by a common rational so that both have integer
    coefficients with overall content 1 and den's leading coefficient is
    positive.  No multivariate GCD is performed."""
    if den.is_zero():
        raise ZeroPolynomialError("rational function with zero denominator")
    coeffs = list(num.terms.values()) + list(den.terms.values())
    nums = [abs(c.numerator) for c in coeffs]
    dens = [c.denominator for c in coeffs]
    g = reduce(_zgcd, nums) if any(nums) else mpz(1)
    if g == 0:
        g = mpz(1)
    l = reduce(_zlcm, dens)
    scale = mpq(l, g)
    _, lead = den.leading_term(order)
    if lead < 0:
        scale = -scale
    return num.scale(scale), den.scale(scale)


class RationalFunction:
    """A quotient num/den of polynomials over the same variable set.

    The representation is not reduced (no multivariate GCD); integer content
    is normalized and the denominator's leading coefficient is positive.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = Polynomial.constant(num.varset, 1)
        if num.varset != den.varset:
            raise StructuralError("numerator and denominator variable sets differ")
        self.num, self.den = _normalize_pair(num, den)

    @property
    def varset(self):
        return self.num.varset

    def derivative(self, name):
        """Quotient rule: (num'·den − num·den') / den²."""
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point):
        den_val = self.den.evaluate(point)
        if isinstance(den_val, type(mpq(0))) and den_val == 0:
            raise PoleError("denominator vanishes at evaluation point")
        num_val = self.num.evaluate(point)
        if isinstance(den_val, RealInterval):
            raise StructuralError("interval evaluation of quotients is unsupported")
        return num_val / den_val

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(
                self.num * other.den + other.num * self.den, self.den * other.den)
        other_poly = other if isinstance(other, Polynomial) else \
            Polynomial.constant(self.varset, other)
        return RationalFunction(self.num + other_poly * self.den, self.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other if isinstance(other, RationalFunction) else \
            self + (-(other if isinstance(other, Polynomial) else
                      Polynomial.constant(self.varset, other)))

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self.num * other.num, self.den * other.den)
        if isinstance(other, Polynomial):
            return RationalFunction(self.num * other, self.den)
        return RationalFunction(self.num.scale(other), self.den)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __repr__(self):
        return f"RationalFunction(({self.num.to_text()}) / ({self.den.to_text()}))"
