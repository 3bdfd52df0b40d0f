"""Problem construction: datasets, activation-sign partitions, the rational
surrogate loss, head-weight projection, and the interior/boundary critical
systems handed to the Gröbner machinery.

The loss of a width-L ReLU network with frozen activation pattern E is a
single rational function of the hidden parameters psi = (B, c): the head
weights are eliminated in closed form, and the remaining L x L matrix inverse
is carried out symbolically by adjugate over determinant.
"""

from __future__ import annotations

import itertools

from gmpy2 import mpq

from .errors import StructuralError, UnsupportedError
from .groebner import Ideal
from .numbers import parse_rational
from .poly import (GREVLEX, ROLE_MULTIPLIER, Polynomial, VariableSet)


def center_outcomes(raw_y):
    """Subtract the exact mean so the outcomes sum to zero."""
    ys = [mpq(v) for v in raw_y]
    if not ys:
        raise StructuralError("empty outcome vector")
    mean = sum(ys, mpq(0)) / len(ys)
    return [v - mean for v in ys]


class Dataset:
    """An exact regression problem: inputs, centered outcomes, ridge weight,
    and hidden-layer width."""

    __slots__ = ("n", "d", "L", "x", "y", "y_mean", "y_centered", "lam",
                 "varset")

    def __init__(self, x, y, lam, hidden_units, center=True):
        self.x = [[mpq(parse_rational(v)) for v in row] for row in x]
        self.y = [mpq(parse_rational(v)) for v in y]
        self.n = len(self.x)
        if self.n == 0 or self.n != len(self.y):
            raise StructuralError("need equally many inputs and outcomes")
        self.d = len(self.x[0])
        if self.d == 0 or any(len(row) != self.d for row in self.x):
            raise StructuralError("inconsistent input dimensions")
        self.lam = mpq(parse_rational(lam))
        if self.lam <= 0:
            raise StructuralError("ridge weight must be strictly positive")
        self.L = int(hidden_units)
        if self.L < 1:
            raise StructuralError("need at least one hidden unit")
        if center:
            self.y_mean = sum(self.y, mpq(0)) / self.n
            self.y_centered = center_outcomes(self.y)
        else:
            # Outcomes are taken as already centered.
            self.y_mean = mpq(0)
            self.y_centered = list(self.y)
        self.varset = VariableSet.network(self.L, self.d)

    @property
    def width(self):
        """Number of hidden parameters w = L(d+1)."""
        return self.L * (self.d + 1)

    def split_psi(self, psi):
        """(B, c) from a flat psi in the fixed variable order."""
        psi = list(psi)
        if len(psi) != self.width:
            raise StructuralError("psi length does not match parameter count")
        B = [psi[ell * self.d:(ell + 1) * self.d] for ell in range(self.L)]
        c = psi[self.L * self.d:]
        return B, c

    def preactivation(self, psi, i, ell):
        """xi_{i,ell}(psi) = <b_ell, x_i> + c_ell as a scalar."""
        B, c = self.split_psi(psi)
        total = c[ell]
        for j in range(self.d):
            total = total + B[ell][j] * self.x[i][j]
        return total


class IndicatorMatrix:
    """A +-1 activation-sign pattern over (sample, hidden unit) pairs."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(int(e) for e in row) for row in rows)
        if not self.rows or any(len(r) != len(self.rows[0]) for r in self.rows):
            raise StructuralError("ragged indicator matrix")
        if any(e not in (1, -1) for r in self.rows for e in r):
            raise StructuralError("indicator entries must be +1 or -1")

    @classmethod
    def from_pattern(cls, pattern, n, L):
        """Row-major '+'/'-' string of length n*L."""
        s = pattern.strip()
        if len(s) != n * L or any(ch not in "+-" for ch in s):
            raise StructuralError(
                f"pattern must be {n * L} characters of '+'/'-': {pattern!r}")
        signs = [1 if ch == "+" else -1 for ch in s]
        return cls([signs[i * L:(i + 1) * L] for i in range(n)])

    def pattern(self):
        return "".join("+" if e == 1 else "-" for row in self.rows for e in row)

    @property
    def n(self):
        return len(self.rows)

    @property
    def L(self):
        return len(self.rows[0])

    def entry(self, i, ell):
        return self.rows[i][ell]

    def columns(self):
        return tuple(tuple(row[ell] for row in self.rows)
                     for ell in range(self.L))

    def negate(self):
        return IndicatorMatrix([[-e for e in row] for row in self.rows])

    def permute_columns(self, perm):
        return IndicatorMatrix([[row[perm[ell]] for ell in range(self.L)]
                                for row in self.rows])

    def __eq__(self, other):
        return isinstance(other, IndicatorMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"IndicatorMatrix({self.pattern()!r})"


class PartitionRegion:
    """The closed convex cone of parameters whose activation signs match E."""

    __slots__ = ("dataset", "E")

    def __init__(self, dataset, E):
        if E.n != dataset.n or E.L != dataset.L:
            raise StructuralError("indicator shape does not match dataset")
        self.dataset = dataset
        self.E = E


class BoundaryComponent:
    """The face of a partition where one constraint binds: xi_{i,ell} = 0."""

    __slots__ = ("region", "i", "ell")

    def __init__(self, region, i, ell):
        if not (0 <= i < region.dataset.n and 0 <= ell < region.dataset.L):
            raise StructuralError("boundary indices out of range")
        self.region = region
        self.i = i
        self.ell = ell


def hyperplane_form(dataset, i, ell, varset=None):
    """The linear form xi_{i,ell}(psi) = <b_ell, x_i> + c_ell."""
    if not (0 <= i < dataset.n and 0 <= ell < dataset.L):
        raise StructuralError("hyperplane indices out of range")
    vs = varset or dataset.varset
    poly = Polynomial.variable(vs, f"c_{ell + 1}")
    for j in range(dataset.d):
        xij = dataset.x[i][j]
        if xij != 0:
            poly = poly + Polynomial.variable(vs, f"b_{ell + 1}{j + 1}").scale(xij)
    return poly


def _det(matrix):
    """Determinant of a small square matrix of polynomials, by cofactors."""
    k = len(matrix)
    if k == 1:
        return matrix[0][0]
    varset = matrix[0][0].varset
    total = Polynomial.zero(varset)
    for col in range(k):
        entry = matrix[0][col]
        if entry.is_zero():
            continue
        minor = [[row[c] for c in range(k) if c != col] for row in matrix[1:]]
        cof = _det(minor)
        term = entry * cof
        total = total + (term if col % 2 == 0 else -term)
    return total


def _adjugate(matrix):
    """Adjugate of a small square polynomial matrix: transpose of cofactors."""
    k = len(matrix)
    varset = matrix[0][0].varset
    if k == 1:
        return [[Polynomial.constant(varset, 1)]]
    adj = [[None] * k for _ in range(k)]
    for r in range(k):
        for c in range(k):
            minor = [[matrix[i][j] for j in range(k) if j != c]
                     for i in range(k) if i != r]
            cof = _det(minor)
            adj[c][r] = cof if (r + c) % 2 == 0 else -cof
    return adj


class SurrogateLoss:
    """The globally-defined rational loss attached to one activation pattern.

    ``loss`` is (lambda*|psi|^2 * det - N) / det with det = det(Omega^T Omega
    + lambda I).  Derivatives are stored as (numerator, denominator) pairs per
    hidden parameter; ``xi_forms`` are the n*L partition hyperplanes.
    """

    __slots__ = ("dataset", "E", "loss", "det", "derivatives", "xi_forms")

    def __init__(self, dataset, E, loss, det, derivatives, xi_forms):
        self.dataset = dataset
        self.E = E
        self.loss = loss
        self.det = det
        self.derivatives = derivatives
        self.xi_forms = xi_forms

    def boundary_exclusion(self):
        """The product of all partition hyperplanes (h_{w+1})."""
        varset = self.dataset.varset
        prod = Polynomial.constant(varset, 1)
        for xi in self.xi_forms.values():
            prod = prod * xi
        return prod


def build_surrogate(dataset, E, max_width=4):
    """Construct the surrogate loss for pattern E by symbolic head-weight
    elimination (adjugate-over-determinant inverse of the L x L system)."""
    if dataset.L > max_width:
        raise UnsupportedError(
            f"symbolic inversion guard: width {dataset.L} > {max_width}")
    if E.n != dataset.n or E.L != dataset.L:
        raise StructuralError("indicator shape does not match dataset")
    varset = dataset.varset
    lam = dataset.lam
    L = dataset.L
    zero = Polynomial.zero(varset)
    xi_forms = {}
    omega = [[zero] * L for _ in range(dataset.n)]
    for i in range(dataset.n):
        for ell in range(L):
            xi = hyperplane_form(dataset, i, ell)
            xi_forms[(i, ell)] = xi
            if E.entry(i, ell) == 1:
                omega[i][ell] = xi
    # M = Omega^T Omega + lambda I, an L x L symmetric polynomial matrix.
    M = [[None] * L for _ in range(L)]
    for k in range(L):
        for l in range(k, L):
            entry = Polynomial.zero(varset)
            for i in range(dataset.n):
                if not omega[i][k].is_zero() and not omega[i][l].is_zero():
                    entry = entry + omega[i][k] * omega[i][l]
            if k == l:
                entry = entry + Polynomial.constant(varset, lam)
            M[k][l] = entry
            M[l][k] = entry
    det = _det(M)
    adj = _adjugate(M)
    # v_k = sum_i ytilde_i * omega_{ik}; N = v^T adj(M) v.
    v = []
    for k in range(L):
        entry = Polynomial.zero(varset)
        for i in range(dataset.n):
            if not omega[i][k].is_zero():
                entry = entry + omega[i][k].scale(dataset.y_centered[i])
        v.append(entry)
    N = Polynomial.zero(varset)
    for k in range(L):
        if v[k].is_zero():
            continue
        for l in range(L):
            if not v[l].is_zero() and not adj[k][l].is_zero():
                N = N + v[k] * adj[k][l] * v[l]
    ridge = Polynomial.zero(varset)
    for name in varset.names:
        var = Polynomial.variable(varset, name)
        ridge = ridge + var * var
    ridge = ridge.scale(lam)
    from .poly import RationalFunction
    loss = RationalFunction(ridge * det - N, det)
    # Per-parameter derivative numerators and denominators via the quotient
    # rule; the denominator is det^2 for every parameter.
    derivatives = {}
    for name in varset.names:
        dr = loss.derivative(name)
        derivatives[name] = (dr.num, dr.den)
    return SurrogateLoss(dataset, E, loss, det, derivatives, xi_forms)


class AlgebraicSystem:
    """Equations plus exclusion factors defining a variety difference."""

    __slots__ = ("equations", "exclusion_factors", "varset", "provenance",
                 "saturation_factors")

    def __init__(self, equations, exclusion_factors, varset, provenance,
                 saturation_factors=None):
        self.equations = equations
        self.exclusion_factors = tuple(exclusion_factors)
        self.varset = varset
        self.provenance = provenance
        # Factors to saturate by: same real zero set as the exclusion
        # product, but with squared factors reduced to first powers (the
        # saturation I : h^inf only depends on the radical of h).
        if saturation_factors is None:
            saturation_factors = self.distinct_exclusion_factors()
        self.saturation_factors = tuple(saturation_factors)

    def saturation_product(self):
        prod = Polynomial.constant(self.varset, 1)
        for f in self.saturation_factors:
            prod = prod * f
        return prod.primitive(GREVLEX)

    def exclusion_product(self):
        prod = Polynomial.constant(self.varset, 1)
        for f in self.exclusion_factors:
            prod = prod * f
        return prod

    def distinct_exclusion_factors(self):
        """Exclusion factors deduplicated up to a rational scalar.

        Saturating by a product with repeated factors equals saturating by
        the deduplicated product, and the smaller degree is much cheaper.
        """
        seen = {}
        for f in self.exclusion_factors:
            key = frozenset(f.primitive(GREVLEX).terms.items())
            seen.setdefault(key, f)
        return list(seen.values())

    def exclusion_ideal(self):
        return Ideal(self.varset, [self.exclusion_product()])


def build_interior_system(surrogate):
    """Stationarity of the surrogate inside the open partition: derivative
    numerators as equations, denominators and hyperplanes as exclusions."""
    varset = surrogate.dataset.varset
    equations = []
    exclusions = []
    for name in varset.names:
        num, den = surrogate.derivatives[name]
        equations.append(num.primitive(GREVLEX))
        exclusions.append(den)
    exclusions.extend(surrogate.xi_forms.values())
    sat = [surrogate.det] + list(surrogate.xi_forms.values())
    return AlgebraicSystem(Ideal(varset, equations), exclusions, varset,
                           ("interior",), saturation_factors=sat)


def build_boundary_system(surrogate, i, ell):
    """Constrained stationarity on the face xi_{i,ell} = 0, with a multiplier
    variable beta greater than all parameters."""
    dataset = surrogate.dataset
    if not (0 <= i < dataset.n and 0 <= ell < dataset.L):
        raise StructuralError("boundary indices out of range")
    base = dataset.varset
    extended = base.extended(["beta"], ROLE_MULTIPLIER)
    beta = Polynomial.variable(extended, "beta")
    xi = surrogate.xi_forms[(i, ell)]
    equations = []
    exclusions = []
    for name in base.names:
        num, den = surrogate.derivatives[name]
        dxi = xi.derivative(name)  # a constant polynomial
        f = num.project(extended) + beta * dxi.project(extended) * den.project(extended)
        equations.append(f.primitive(GREVLEX))
        exclusions.append(den.project(extended))
    equations.append(xi.project(extended))
    sat = [surrogate.det.project(extended)]
    return AlgebraicSystem(Ideal(extended, equations), exclusions, extended,
                           ("boundary", i, ell), saturation_factors=sat)


def build_boundary_reduced(surrogate, i, ell):
    """The face-(i, ell) stationarity system with the multiplier removed.

    In the multiplier formulation every stationarity equation reads
    num_p + beta·(dxi/dp)·den = 0 with den everywhere positive, so the bias
    equation of the binding unit (dxi/dc = 1) determines beta and
    cross-multiplying removes it from the others; the det-saturations of the
    two systems coincide.  Staying in the original parameters makes the
    downstream basis computation much cheaper than eliminating beta there.
    """
    dataset = surrogate.dataset
    if not (0 <= i < dataset.n and 0 <= ell < dataset.L):
        raise StructuralError("boundary indices out of range")
    base = dataset.varset
    xi = surrogate.xi_forms[(i, ell)]
    origin = (0,) * len(base)
    slopes = {name: xi.derivative(name).terms.get(origin, mpq(0))
              for name in base.names}
    pivot = next(n for n in reversed(base.names) if slopes[n] != 0)
    pivot_num, pivot_den = surrogate.derivatives[pivot]
    equations = []
    exclusions = []
    for name in base.names:
        if name == pivot:
            continue
        num, den = surrogate.derivatives[name]
        a = slopes[name] / slopes[pivot]
        if a == 0:
            f = num
        else:
            # cross-multiplied so the (per-name normalized) denominators
            # cancel: a*(num_pivot/den_pivot) = num_name/den_name.  The
            # normalization only moves rational content, so the quotient of
            # the two denominators is a constant; dividing by it keeps the
            # equation at the numerator degree.
            lead = den.leading_term(GREVLEX)
            plead = pivot_den.leading_term(GREVLEX)
            ratio = lead[1] / plead[1]
            scaled = Polynomial.constant(base, ratio) * pivot_den
            if scaled.terms == den.terms:
                f = Polynomial.constant(base, a * ratio) * pivot_num - num
            else:
                f = (Polynomial.constant(base, a) * pivot_num * den
                     - num * pivot_den)
        equations.append(f.primitive(GREVLEX))
        exclusions.append(den)
    equations.append(xi)
    return AlgebraicSystem(Ideal(base, equations), exclusions, base,
                           ("boundary", i, ell),
                           saturation_factors=[surrogate.det])


def solve_exact(matrix, rhs):
    """Gaussian elimination over exact rationals for a small linear system."""
    k = len(matrix)
    A = [[mpq(matrix[r][c]) for c in range(k)] + [mpq(rhs[r])]
         for r in range(k)]
    for col in range(k):
        pivot = next((r for r in range(col, k) if A[r][col] != 0), None)
        if pivot is None:
            raise StructuralError("singular linear system")
        A[col], A[pivot] = A[pivot], A[col]
        pv = A[col][col]
        for r in range(k):
            if r != col and A[r][col] != 0:
                factor = A[r][col] / pv
                for c in range(col, k + 1):
                    A[r][c] -= factor * A[col][c]
    return [A[r][k] / A[r][r] for r in range(k)]


def relu_features(dataset, psi):
    """The true piecewise-linear feature matrix Omega(psi), n x L."""
    feats = []
    for i in range(dataset.n):
        row = []
        for ell in range(dataset.L):
            val = dataset.preactivation(psi, i, ell)
            row.append(val if val > 0 else mpq(0))
        feats.append(row)
    return feats


def optimal_head_weights(dataset, psi):
    """Exact ridge solution a = (Omega^T Omega + lambda I)^{-1} Omega^T y."""
    psi = [mpq(v) for v in psi]
    omega = relu_features(dataset, psi)
    L = dataset.L
    gram = [[sum((omega[i][k] * omega[i][l] for i in range(dataset.n)),
                 mpq(0)) + (dataset.lam if k == l else mpq(0))
             for l in range(L)] for k in range(L)]
    rhs = [sum((omega[i][k] * dataset.y_centered[i]
                for i in range(dataset.n)), mpq(0)) for k in range(L)]
    return solve_exact(gram, rhs)


def loss_eval(dataset, mode, psi, head=None, E=None):
    """Evaluate a loss at an exact rational point.

    Modes: "rr_mse" (head weights + psi, ridge on both), "r3_mse" (head
    weights eliminated; equals rr_mse at the optimal head minus |y~|^2),
    "surrogate" (the pattern-E rational function).
    """
    psi = [mpq(v) for v in psi]
    if mode == "rr_mse":
        if head is None:
            raise StructuralError("rr_mse needs head weights")
        a = [mpq(v) for v in head]
        omega = relu_features(dataset, psi)
        total = mpq(0)
        for i in range(dataset.n):
            pred = sum((a[ell] * omega[i][ell] for ell in range(dataset.L)),
                       mpq(0))
            r = pred - dataset.y_centered[i]
            total += r * r
        ridge = sum((v * v for v in itertools.chain(a, psi)), mpq(0))
        return total + dataset.lam * ridge
    if mode == "r3_mse":
        a = optimal_head_weights(dataset, psi)
        ynorm = sum((v * v for v in dataset.y_centered), mpq(0))
        return loss_eval(dataset, "rr_mse", psi, head=a) - ynorm
    if mode == "surrogate":
        if E is None:
            raise StructuralError("surrogate mode needs an indicator matrix")
        s = build_surrogate(dataset, E)
        return s.loss.evaluate(psi)
    raise StructuralError(f"unknown loss mode {mode!r}")


def region_membership(target, psi, tol=mpq(1, 10**9)):
    """Classify a point against a partition (or one of its faces).

    Returns ("inside_interior", []) / ("on_boundary", binding) / ("outside",
    violated).  Rational points classify exactly; float points use the
    tolerance for both binding and violation."""
    if isinstance(target, BoundaryComponent):
        region = target.region
    else:
        region = target
    dataset = region.dataset
    exact = all(isinstance(v, (int, type(mpq(0)))) for v in psi)
    if not exact:
        # inexact points may mix float/mpf/mpfr scalars; compare in float
        # to avoid silent cross-library comparison failures
        tol = float(tol)
    binding = []
    for i in range(dataset.n):
        for ell in range(dataset.L):
            val = dataset.preactivation(psi, i, ell)
            e = region.E.entry(i, ell)
            if exact:
                if val == 0:
                    binding.append((i, ell))
                elif (val > 0) != (e == 1):
                    return ("outside", [(i, ell)])
            else:
                val = float(val)
                if abs(val) <= tol:
                    binding.append((i, ell))
                elif (val > 0) != (e == 1):
                    return ("outside", [(i, ell)])
    if isinstance(target, BoundaryComponent) and \
            (target.i, target.ell) not in binding:
        return ("outside", [(target.i, target.ell)])
    if binding:
        return ("on_boundary", binding)
    return ("inside_interior", [])
