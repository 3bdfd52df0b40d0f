"""Division, Buchberger bases, saturation, elimination, and FGLM conversion."""

import random

import pytest
from gmpy2 import mpq

from conftest import random_polynomial
from reluminima.errors import ResourceLimitError
from reluminima.groebner import (GroebnerLimits, Ideal, buchberger,
                                 convert_order, divide_reduce, eliminate,
                                 groebner_basis, is_zero_dimensional,
                                 s_polynomial, saturate)
from reluminima.poly import GREVLEX, LEX, Polynomial, VariableSet

VS = VariableSet(["x", "y", "z"])


def poly(text, vs=VS):
    return Polynomial.from_text(vs, text)


def ideal(*texts, vs=VS):
    return Ideal(vs, [poly(t, vs) for t in texts])


class TestDivision:
    def test_remainder_identity(self):
        f = poly("x^2*y + x*y^2 + y^2")
        divisors = [poly("x*y - 1"), poly("y^2 - 1")]
        r, zero = divide_reduce(f, divisors, LEX)
        assert not zero
        assert r == poly("x + y + 1")

    def test_no_remainder_term_divisible(self, rng):
        for _ in range(30):
            f = random_polynomial(rng, VS)
            divisors = [random_polynomial(rng, VS) for _ in range(2)]
            divisors = [d for d in divisors if not d.is_zero()]
            if not divisors or f.is_zero():
                continue
            r, _ = divide_reduce(f, divisors, GREVLEX)
            leads = [d.leading_monomial(GREVLEX) for d in divisors]
            for mono in r.terms:
                assert not any(all(a <= b for a, b in zip(lm, mono))
                               for lm in leads)


class TestSPolynomial:
    def test_known_value(self):
        f = poly("x^3 - 2*x*y")
        g = poly("x^2*y - 2*y^2 + x")
        s = s_polynomial(f, g, GREVLEX)
        assert s == poly("-x^2")


class TestBuchberger:
    def test_known_basis(self):
        vs = VariableSet(["x", "y"])
        basis = buchberger(ideal("x - y", "x^2 + y^2 - 1", vs=vs), LEX)
        texts = [p.to_text(LEX) for p in basis]
        assert texts == ["x - y", "y^2 - 1/2"]

    def test_buchberger_criterion_random(self):
        """Every S-polynomial of the computed basis reduces to zero."""
        rng = random.Random(7)
        vs = VariableSet(["x", "y", "z"])
        checked = 0
        while checked < 50:
            gens = [random_polynomial(rng, vs, max_terms=3, max_degree=4)
                    for _ in range(rng.randint(1, 3))]
            gens = [g for g in gens if not g.is_zero()]
            if not gens:
                continue
            order = rng.choice([LEX, GREVLEX])
            try:
                basis = buchberger(Ideal(vs, gens),
                                   order, GroebnerLimits(timeout=20))
            except ResourceLimitError:
                continue
            polys = list(basis)
            for i in range(len(polys)):
                for j in range(i + 1, len(polys)):
                    s = s_polynomial(polys[i], polys[j], order)
                    _, zero = divide_reduce(s, polys, order)
                    assert zero
            # original generators belong to the ideal of the basis
            for g in gens:
                _, zero = divide_reduce(g, polys, order)
                assert zero
            checked += 1

    def test_reduced_basis_unique_under_shuffle(self):
        rng = random.Random(11)
        vs = VariableSet(["x", "y", "z"])
        checked = 0
        while checked < 25:
            gens = [random_polynomial(rng, vs, max_terms=3, max_degree=3)
                    for _ in range(3)]
            gens = [g for g in gens if not g.is_zero()]
            if len(gens) < 2:
                continue
            try:
                ref = buchberger(Ideal(vs, gens), GREVLEX,
                                 GroebnerLimits(timeout=20))
            except ResourceLimitError:
                continue
            shuffled = list(gens)
            rng.shuffle(shuffled)
            again = buchberger(Ideal(vs, shuffled), GREVLEX,
                               GroebnerLimits(timeout=20))
            assert list(ref) == list(again)
            checked += 1

    def test_unit_ideal(self):
        basis = buchberger(ideal("x", "x + 1"), LEX)
        assert basis.is_unit_ideal()

    def test_limits_raise(self):
        limits = GroebnerLimits(max_degree=2)
        with pytest.raises(ResourceLimitError):
            buchberger(ideal("x^3*y - z", "y^3 - x*z", "x^5 - z^2"), LEX,
                       limits)


class TestSaturation:
    def test_removes_component(self):
        vs = VariableSet(["x", "y"])
        # <x*y> : x^inf = <y>
        sat = saturate(Ideal(vs, [poly("x*y", vs)]), poly("x", vs))
        assert [p.to_text(LEX) for p in sat] == ["y"]

    def test_saturation_by_nonvanishing_is_identity(self):
        vs = VariableSet(["x", "y"])
        sat = saturate(Ideal(vs, [poly("x", vs)]), poly("y", vs))
        assert [p.to_text(LEX) for p in sat] == ["x"]

    def test_embedded_multiplicity(self):
        vs = VariableSet(["x", "y"])
        # <x^2, x*y> : x^inf is the whole ring
        sat = saturate(Ideal(vs, [poly("x^2", vs), poly("x*y", vs)]),
                       poly("x", vs))
        assert sat.is_unit_ideal()

    def test_drop_block_eliminates_leading_variable(self):
        vs = VariableSet(["t", "x", "y"])
        # x = t, y = t^2; dropping t yields the parabola y - x^2... with
        # saturation by 1 this is plain elimination.
        i = ideal("x - t", "y - t^2", vs=vs)
        basis = saturate(i, Polynomial.constant(vs, 1), drop=["t"])
        assert basis.varset.names == ("x", "y")
        assert [p.to_text(LEX) for p in basis] == ["x^2 - y"]


class TestElimination:
    def test_twisted_cubic(self):
        vs = VariableSet(["x", "y", "z"])
        basis = buchberger(ideal("x^2 - y", "x^3 - z", vs=vs), LEX)
        out = eliminate(basis, ["y", "z"])
        assert [p.to_text(LEX) for p in out] == ["y^3 - z^2"]

    def test_requires_leading_block(self):
        basis = buchberger(ideal("x - y"), LEX)
        with pytest.raises(Exception):
            eliminate(basis, ["x"])  # dropped y is less significant than x


class TestZeroDimensional:
    def test_finite_variety(self):
        basis = buchberger(ideal("x^2 - 1", "y^3 - y", "z - x*y"), LEX)
        flag, free = is_zero_dimensional(basis)
        assert flag and free == []

    def test_positive_dimensional(self):
        basis = buchberger(ideal("x - y"), LEX)
        flag, free = is_zero_dimensional(basis)
        assert not flag
        assert free  # at least one free variable


class TestOrderConversion:
    def test_fglm_matches_direct_lex(self):
        rng = random.Random(23)
        vs = VariableSet(["x", "y"])
        checked = 0
        while checked < 10:
            # build a random zero-dimensional system
            gens = [random_polynomial(rng, vs, max_terms=3, max_degree=3),
                    random_polynomial(rng, vs, max_terms=3, max_degree=3)]
            if any(g.is_zero() for g in gens):
                continue
            try:
                grev = buchberger(Ideal(vs, gens), GREVLEX,
                                  GroebnerLimits(timeout=20))
            except ResourceLimitError:
                continue
            flag, _ = is_zero_dimensional(grev)
            if not flag or grev.is_unit_ideal():
                continue
            direct = buchberger(Ideal(vs, gens), LEX,
                                GroebnerLimits(timeout=20))
            via_fglm = convert_order(grev, LEX)
            assert list(direct) == list(via_fglm)
            checked += 1

    def test_groebner_basis_front_door(self):
        vs = VariableSet(["x", "y"])
        b = groebner_basis(ideal("x^2 + y^2 - 1", "x - y", vs=vs), LEX)
        assert [p.to_text(LEX) for p in b] == ["x - y", "y^2 - 1/2"]
