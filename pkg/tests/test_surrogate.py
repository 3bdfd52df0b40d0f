"""Datasets, activation patterns, the rational surrogate loss, head-weight
elimination, and the interior/boundary stationarity systems."""

import pytest
from gmpy2 import mpq

from reluminima.errors import StructuralError, UnsupportedError
from reluminima.poly import LEX, Polynomial
from reluminima.surrogate import (AlgebraicSystem, BoundaryComponent, Dataset,
                                  IndicatorMatrix, PartitionRegion,
                                  build_boundary_system, build_interior_system,
                                  build_surrogate, center_outcomes,
                                  hyperplane_form, loss_eval,
                                  optimal_head_weights, region_membership,
                                  relu_features, solve_exact)

TWO_POINT = dict(x=[["-17/100"], ["11/25"]], y=["-11/25", "19/20"],
                 lam="1/10", hidden_units=1)


def two_point():
    return Dataset(**TWO_POINT)


def random_psi(rng, dataset, bound=4):
    return [mpq(rng.randint(-bound * 8, bound * 8), 8)
            for _ in range(dataset.width)]


def pattern_of(dataset, psi):
    """The strict activation pattern at psi, or None on a tie."""
    rows = []
    for i in range(dataset.n):
        row = []
        for ell in range(dataset.L):
            val = dataset.preactivation(psi, i, ell)
            if val == 0:
                return None
            row.append(1 if val > 0 else -1)
        rows.append(row)
    return IndicatorMatrix(rows)


class TestDataset:
    def test_centering_sums_to_zero(self):
        ds = Dataset(x=[["1"], ["2"], ["3"]], y=["1", "2", "6"], lam="1/10",
                     hidden_units=2)
        assert sum(ds.y_centered, mpq(0)) == 0
        assert ds.y_mean == mpq(3)

    def test_center_false_keeps_outcomes(self):
        ds = Dataset(x=[["1"], ["2"]], y=["1", "3"], lam="1/10",
                     hidden_units=1, center=False)
        assert ds.y_centered == [mpq(1), mpq(3)]

    def test_rejects_bad_shapes(self):
        with pytest.raises(StructuralError):
            Dataset(x=[["1"], ["2"]], y=["1"], lam="1/10", hidden_units=1)
        with pytest.raises(StructuralError):
            Dataset(x=[["1"], ["2", "3"]], y=["1", "2"], lam="1/10",
                    hidden_units=1)
        with pytest.raises(StructuralError):
            Dataset(x=[["1"]], y=["1"], lam="0", hidden_units=1)

    def test_split_psi_layout(self):
        ds = Dataset(x=[["1", "2"]], y=["1"], lam="1", hidden_units=2)
        B, c = ds.split_psi([1, 2, 3, 4, 5, 6])
        assert B == [[1, 2], [3, 4]]
        assert c == [5, 6]

    def test_center_outcomes_rejects_empty(self):
        with pytest.raises(StructuralError):
            center_outcomes([])


class TestIndicatorMatrix:
    def test_pattern_round_trip(self):
        E = IndicatorMatrix.from_pattern("+-+--+", n=3, L=2)
        assert E.pattern() == "+-+--+"
        assert E.rows == ((1, -1), (1, -1), (-1, 1))

    def test_rejects_bad_pattern(self):
        with pytest.raises(StructuralError):
            IndicatorMatrix.from_pattern("+-", n=3, L=2)
        with pytest.raises(StructuralError):
            IndicatorMatrix.from_pattern("+0+-", n=2, L=2)

    def test_negate_and_permute(self):
        E = IndicatorMatrix.from_pattern("+-+-", n=2, L=2)
        assert E.negate().pattern() == "-+-+"
        swapped = E.permute_columns([1, 0])
        assert swapped.pattern() == "-+-+"

    def test_columns(self):
        E = IndicatorMatrix.from_pattern("+--+", n=2, L=2)
        assert E.columns() == ((1, -1), (-1, 1))


class TestHyperplaneForm:
    def test_matches_preactivation(self, rng):
        ds = Dataset(x=[["1/2", "-3"], ["2", "5"]], y=["1", "-1"], lam="1/10",
                     hidden_units=2)
        for _ in range(20):
            psi = random_psi(rng, ds)
            for i in range(ds.n):
                for ell in range(ds.L):
                    form = hyperplane_form(ds, i, ell)
                    assert form.evaluate(psi) == ds.preactivation(psi, i, ell)

    def test_out_of_range(self):
        with pytest.raises(StructuralError):
            hyperplane_form(two_point(), 5, 0)


class TestSurrogateLoss:
    def test_equals_eliminated_loss_inside_partition(self, rng):
        """On its own partition the surrogate is exactly the head-eliminated
        loss (the head weights are minimized out in closed form)."""
        ds = two_point()
        checked = 0
        while checked < 30:
            psi = random_psi(rng, ds)
            E = pattern_of(ds, psi)
            if E is None:
                continue
            lhs = loss_eval(ds, "surrogate", psi, E=E)
            rhs = loss_eval(ds, "r3_mse", psi)
            assert lhs == rhs
            checked += 1

    def test_matches_explicit_head_loss(self, rng):
        """r3_mse equals rr_mse at the exact optimal head minus |y~|^2, and
        any other head does at least as badly."""
        ds = two_point()
        ynorm = sum((v * v for v in ds.y_centered), mpq(0))
        for _ in range(10):
            psi = random_psi(rng, ds)
            a = optimal_head_weights(ds, psi)
            best = loss_eval(ds, "rr_mse", psi, head=a)
            assert loss_eval(ds, "r3_mse", psi) == best - ynorm
            for _ in range(5):
                other = [v + mpq(rng.randint(-4, 4), 8) for v in a]
                assert loss_eval(ds, "rr_mse", psi, head=other) >= best

    def test_denominator_strictly_positive(self, rng):
        """det(Omega^T Omega + lambda I) >= lambda^L everywhere."""
        ds = Dataset(x=[["1"], ["-2"], ["1/3"]], y=["1", "0", "-1"],
                     lam="1/10", hidden_units=2)
        E = IndicatorMatrix.from_pattern("++-+--", n=3, L=2)
        s = build_surrogate(ds, E)
        floor = ds.lam ** ds.L
        for _ in range(50):
            psi = random_psi(rng, ds)
            assert s.det.evaluate(psi) >= floor

    def test_derivative_matches_finite_difference(self, rng):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("+-", n=2, L=1)
        s = build_surrogate(ds, E)
        h = mpq(1, 2**14)
        for _ in range(10):
            psi = random_psi(rng, ds)
            for k, name in enumerate(ds.varset.names):
                num, den = s.derivatives[name]
                exact = num.evaluate(psi) / den.evaluate(psi)
                up = list(psi)
                dn = list(psi)
                up[k] += h
                dn[k] -= h
                fd = (s.loss.evaluate(up) - s.loss.evaluate(dn)) / (2 * h)
                assert abs(float(fd - exact)) < 1e-4 * max(1.0,
                                                           abs(float(exact)))

    def test_width_guard(self):
        ds = Dataset(x=[["1"]], y=["1"], lam="1", hidden_units=5)
        E = IndicatorMatrix([[1] * 5])
        with pytest.raises(UnsupportedError):
            build_surrogate(ds, E)

    def test_boundary_exclusion_is_product_of_hyperplanes(self):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("++", n=2, L=1)
        s = build_surrogate(ds, E)
        prod = Polynomial.constant(ds.varset, 1)
        for xi in s.xi_forms.values():
            prod = prod * xi
        assert s.boundary_exclusion() == prod


class TestReluFeatures:
    def test_negative_preactivations_clamp_to_zero(self):
        ds = two_point()
        feats = relu_features(ds, [mpq(1), mpq(0)])
        # x = -17/100 and 11/25: first preactivation negative, clamped
        assert feats[0][0] == 0
        assert feats[1][0] == mpq(11, 25)


class TestSolveExact:
    def test_known_system(self):
        sol = solve_exact([[2, 1], [1, 3]], [5, 10])
        assert sol == [mpq(1), mpq(3)]

    def test_singular_raises(self):
        with pytest.raises(StructuralError):
            solve_exact([[1, 2], [2, 4]], [1, 1])


class TestSystems:
    def test_interior_system_shape(self):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("-+", n=2, L=1)
        s = build_surrogate(ds, E)
        sys = build_interior_system(s)
        assert isinstance(sys, AlgebraicSystem)
        assert len(sys.equations.generators) == ds.width
        assert sys.varset == ds.varset
        assert sys.provenance == ("interior",)
        # exclusions: one denominator per parameter plus every hyperplane
        assert len(sys.exclusion_factors) == ds.width + ds.n * ds.L

    def test_interior_saturation_dedupes_denominators(self):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("-+", n=2, L=1)
        sys = build_interior_system(build_surrogate(ds, E))
        # det appears once, not once per parameter
        assert len(sys.saturation_factors) == 1 + ds.n * ds.L

    def test_boundary_system_shape(self):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("-+", n=2, L=1)
        s = build_surrogate(ds, E)
        sys = build_boundary_system(s, 0, 0)
        assert sys.varset.names[0] == "beta"
        assert len(sys.equations.generators) == ds.width + 1
        # the last equation is the binding hyperplane itself
        last = sys.equations.generators[-1]
        assert last == s.xi_forms[(0, 0)].project(sys.varset)
        assert sys.provenance == ("boundary", 0, 0)

    def test_boundary_stationarity_holds_at_constrained_optimum(self):
        """On the face xi_{0,0} = 0 the multiplier equations vanish at the
        1-D minimizer of the restricted surrogate, for some beta."""
        ds = two_point()
        E = IndicatorMatrix.from_pattern("-+", n=2, L=1)
        s = build_surrogate(ds, E)
        # parametrize the face xi_{0,0} = 0 as c_1 = (17/100) b_11, minimize
        # the restricted loss by ternary search, and check the full gradient
        # is parallel to grad xi there (which is what the multiplier
        # equations of the boundary system assert).
        def restricted(t):
            return s.loss.evaluate([t, mpq(17, 100) * t])
        lo, hi = mpq(-4), mpq(4)
        for _ in range(60):
            m1 = lo + (hi - lo) / 3
            m2 = hi - (hi - lo) / 3
            if restricted(m1) <= restricted(m2):
                hi = m2
            else:
                lo = m1
        t = (lo + hi) / 2
        psi = [t, mpq(17, 100) * t]
        num0, den0 = s.derivatives["b_11"]
        num1, den1 = s.derivatives["c_1"]
        g0 = num0.evaluate(psi) / den0.evaluate(psi)
        g1 = num1.evaluate(psi) / den1.evaluate(psi)
        # gradient must be parallel to grad xi = (-17/100, 1): their 2x2
        # determinant with the gradient is ~0 at the face optimum
        cross = g0 * 1 - g1 * mpq(-17, 100)
        assert abs(float(cross)) < 1e-10


class TestRegionMembership:
    def test_strict_interior_point(self, rng):
        ds = two_point()
        checked = 0
        while checked < 20:
            psi = random_psi(rng, ds)
            E = pattern_of(ds, psi)
            if E is None:
                continue
            region = PartitionRegion(ds, E)
            verdict, detail = region_membership(region, psi)
            assert verdict == "inside_interior" and detail == []
            # the complementary pattern rejects the same point
            other = PartitionRegion(ds, E.negate())
            verdict, _ = region_membership(other, psi)
            assert verdict == "outside"
            checked += 1

    def test_cone_property(self, rng):
        """Membership is scale invariant: the partitions are cones."""
        ds = two_point()
        checked = 0
        while checked < 20:
            psi = random_psi(rng, ds)
            E = pattern_of(ds, psi)
            if E is None:
                continue
            region = PartitionRegion(ds, E)
            for t in (mpq(1, 7), mpq(3), mpq(50)):
                scaled = [t * v for v in psi]
                verdict, _ = region_membership(region, scaled)
                assert verdict == "inside_interior"
            checked += 1

    def test_boundary_component_requires_binding(self):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("-+", n=2, L=1)
        region = PartitionRegion(ds, E)
        comp = BoundaryComponent(region, 0, 0)
        # on the face: c_1 = (17/100) b_11 with the other sign respected
        psi = [mpq(1), mpq(17, 100)]
        verdict, binding = region_membership(comp, psi)
        assert verdict == "on_boundary" and (0, 0) in binding
        # strictly interior point is "outside" the face
        verdict, _ = region_membership(comp, [mpq(0), mpq(1)])
        assert verdict == "outside"

    def test_float_points_use_tolerance(self):
        ds = two_point()
        E = IndicatorMatrix.from_pattern("-+", n=2, L=1)
        region = PartitionRegion(ds, E)
        # xi_0 = -0.17*1 + 0.17 = 0 up to float rounding: counts as binding
        verdict, binding = region_membership(region, [1.0, 0.17])
        assert verdict == "on_boundary" and (0, 0) in binding
        # a clear sign violation is still rejected
        verdict, _ = region_membership(region, [0.0, 1.0])
        assert verdict == "outside"


class TestLossEvalErrors:
    def test_unknown_mode(self):
        with pytest.raises(StructuralError):
            loss_eval(two_point(), "nope", [mpq(0), mpq(0)])

    def test_rr_mse_needs_head(self):
        with pytest.raises(StructuralError):
            loss_eval(two_point(), "rr_mse", [mpq(0), mpq(0)])

    def test_surrogate_needs_pattern(self):
        with pytest.raises(StructuralError):
            loss_eval(two_point(), "surrogate", [mpq(0), mpq(0)])
