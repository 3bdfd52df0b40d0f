"""Sparse polynomial arithmetic, monomial orders, and rational functions."""

import pytest
from gmpy2 import mpq

from conftest import random_polynomial
from reluminima.errors import PoleError, StructuralError
from reluminima.numbers import RealInterval
from reluminima.poly import (GREVLEX, LEX, MonomialOrder, Polynomial,
                             RationalFunction, VariableSet)

VS = VariableSet(["x", "y", "z"])


def poly(text):
    return Polynomial.from_text(VS, text)


class TestVariableSet:
    def test_network_layout_most_significant_first(self):
        vs = VariableSet.network(2, 1)
        assert vs.names == ("b_11", "b_21", "c_1", "c_2")
        vs3 = VariableSet.network(2, 3)
        assert vs3.names == ("b_11", "b_12", "b_13", "b_21", "b_22", "b_23",
                             "c_1", "c_2")

    def test_extended_prepends(self):
        vs = VariableSet.network(1, 1).extended(["beta"], "multiplier")
        assert vs.names[0] == "beta"

    def test_restricted_preserves_order(self):
        vs = VariableSet(["a", "b", "c"]).restricted(["b", "c"])
        assert vs.names == ("b", "c")


class TestMonomialOrders:
    def test_lex_prefers_leading_variable(self):
        # x > y^5 under lex
        assert LEX.compare((1, 0, 0), (0, 5, 0)) == 1

    def test_grevlex_prefers_total_degree(self):
        # y^5 > x under grevlex
        assert GREVLEX.compare((0, 5, 0), (1, 0, 0)) == 1

    def test_grevlex_tie_break(self):
        # equal degree: x*z < y^2 because z appears in the smaller one
        assert GREVLEX.compare((1, 0, 1), (0, 2, 0)) == -1

    def test_elimination_block_dominates(self):
        order = MonomialOrder("elim:1")
        # any power of x beats anything x-free
        assert order.compare((1, 0, 0), (0, 9, 9)) == 1
        # x-free monomials compare by grevlex on the rest
        assert order.compare((0, 0, 2), (0, 1, 0)) == 1

    @pytest.mark.parametrize("order", [LEX, GREVLEX, MonomialOrder("elim:1")])
    def test_order_axioms(self, rng, order):
        monos = [tuple(rng.randint(0, 4) for _ in range(3)) for _ in range(60)]
        one = (0, 0, 0)
        for m in monos:
            # 1 is minimal
            assert order.compare(m, one) >= 0
        for a in monos[:15]:
            for b in monos[:15]:
                c = order.compare(a, b)
                assert c == -order.compare(b, a)
                # multiplicative: order respected under multiplication
                t = (1, 2, 0)
                shifted = order.compare(tuple(x + y for x, y in zip(a, t)),
                                        tuple(x + y for x, y in zip(b, t)))
                assert shifted == c


class TestPolynomialArithmetic:
    def test_text_round_trip(self):
        p = poly("3*x^2*y - 1/2*z + 7")
        assert Polynomial.from_text(VS, p.to_text(LEX)) == p

    def test_known_product(self):
        assert poly("x + y") * poly("x - y") == poly("x^2 - y^2")

    def test_power(self):
        assert poly("x + 1") ** 3 == poly("x^3 + 3*x^2 + 3*x + 1")

    def test_ring_axioms_random(self, rng):
        for _ in range(60):
            a = random_polynomial(rng, VS)
            b = random_polynomial(rng, VS)
            c = random_polynomial(rng, VS)
            assert a + b == b + a
            assert a * b == b * a
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + Polynomial.zero(VS) == a
            assert a * Polynomial.constant(VS, 1) == a
            assert a - a == Polynomial.zero(VS)

    def test_derivative_product_rule(self, rng):
        for _ in range(60):
            a = random_polynomial(rng, VS)
            b = random_polynomial(rng, VS)
            for name in VS.names:
                lhs = (a * b).derivative(name)
                rhs = a.derivative(name) * b + a * b.derivative(name)
                assert lhs == rhs

    def test_evaluate_matches_structure(self):
        p = poly("x^2*y - 3*z + 1")
        assert p.evaluate([mpq(2), mpq(3), mpq(5)]) == 4 * 3 - 15 + 1

    def test_evaluate_homomorphism_random(self, rng):
        for _ in range(40):
            a = random_polynomial(rng, VS)
            b = random_polynomial(rng, VS)
            pt = [mpq(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3)]
            assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
            assert (a + b).evaluate(pt) == a.evaluate(pt) + b.evaluate(pt)

    def test_interval_evaluation_encloses_exact(self, rng):
        for _ in range(25):
            a = random_polynomial(rng, VS)
            pt = [mpq(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3)]
            ivs = [RealInterval.from_rational(v) for v in pt]
            enclosed = a.evaluate(ivs)
            assert enclosed.contains(a.evaluate(pt))

    def test_substitute_partial(self):
        p = poly("x^2*y + z")
        q = p.substitute_partial({"x": mpq(2)})
        assert q == poly("4*y + z")

    def test_content_primitive(self):
        p = poly("4*x^2 - 6*y")
        prim = p.primitive(GREVLEX)
        assert prim == poly("2*x^2 - 3*y")
        assert prim.content() == 1

    def test_leading_terms(self):
        p = poly("x*y^2 + x^2 + y^3")
        assert p.leading_term(LEX)[0] == (2, 0, 0)
        # grevlex: among degree-3 terms x*y^2 > y^3
        assert p.leading_term(GREVLEX)[0] == (1, 2, 0)

    def test_project_between_varsets(self):
        big = VariableSet(["w", "x", "y", "z"])
        p = poly("x + y^2")
        q = p.project(big)
        assert q.varset == big
        assert q.to_text(LEX) == "x + y^2"  # x outranks y in the larger set
        with pytest.raises(StructuralError):
            q2 = Polynomial.from_text(big, "w + x")
            q2.project(VS)  # w does not exist in the smaller set


class TestRationalFunction:
    def test_quotient_rule(self, rng):
        for _ in range(25):
            num = random_polynomial(rng, VS)
            den = random_polynomial(rng, VS)
            if den.is_zero():
                continue
            f = RationalFunction(num, den)
            for name in VS.names:
                d = f.derivative(name)
                lhs = d.num * (den * den)
                rhs = (num.derivative(name) * den
                       - num * den.derivative(name)) * d.den
                assert lhs == rhs

    def test_normalization_cancels_scalars(self):
        a = RationalFunction(poly("2*x"), poly("4*y"))
        b = RationalFunction(poly("x"), poly("2*y"))
        assert a == b

    def test_pole_detection(self):
        f = RationalFunction(poly("x"), poly("y"))
        with pytest.raises(PoleError):
            f.evaluate([mpq(1), mpq(0), mpq(0)])

    def test_evaluate(self):
        f = RationalFunction(poly("x^2 - 1"), poly("x - 1"))
        assert f.evaluate([mpq(3), mpq(0), mpq(0)]) == mpq(8, 2)
