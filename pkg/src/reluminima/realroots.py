"""Real solution extraction.

Univariate real roots are isolated with Sturm sequences over exact rationals
(on the square-free part, with multiplicities from Yun's decomposition) and
refined by bisection to arbitrary precision.  Zero-dimensional triangular lex
systems are solved by back-substitution of refined values, guarded by a
residual check on every generator; positive-dimensional varieties are sampled
by randomly specializing the free variables.
"""

from __future__ import annotations

import random

import mpmath
from gmpy2 import mpq

from .errors import StructuralError, ZeroPolynomialError
from .numbers import DEFAULT_PRECISION, rational_from_mpf, to_mpf
from .surrogate import region_membership

# ---------------------------------------------------------------------------
# dense univariate helpers (coefficient lists, ascending degree, exact mpq)
# ---------------------------------------------------------------------------


def univariate_coeffs(poly, name):
    """Ascending coefficient list of a polynomial using only one variable."""
    idx = poly.varset.index(name)
    coeffs = {}
    for mono, c in poly.terms.items():
        if any(e and i != idx for i, e in enumerate(mono)):
            raise StructuralError(
                f"polynomial is not univariate in {name}: {poly!r}")
        coeffs[mono[idx]] = c
    if not coeffs:
        return []
    out = [mpq(0)] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return out


def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _eval(c, x):
    total = mpq(0)
    for coeff in reversed(c):
        total = total * x + coeff
    return total


def _eval_f(c, x, prec):
    with mpmath.workprec(prec):
        total = mpmath.mpf(0)
        for coeff in reversed(c):
            total = total * x + to_mpf(coeff, prec)
        return total


def _deriv(c):
    return [c[i] * i for i in range(1, len(c))]


def _divmod(a, b):
    """Exact polynomial division with remainder over the rationals."""
    a = list(a)
    q = [mpq(0)] * max(0, len(a) - len(b) + 1)
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] = factor
        for i in range(len(b)):
            a[shift + i] -= factor * b[i]
        a.pop()
    return _trim(q), _trim(a)


def _gcd(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [x / lead for x in a]
    return a


def square_free_decomposition(c):
    """Yun's algorithm: list of (factor, multiplicity) with distinct roots."""
    c = _trim(list(c))
    if len(c) <= 1:
        raise ZeroPolynomialError("square-free decomposition needs degree >= 1")
    d = _deriv(c)
    g = _gcd(c, d)
    if len(g) <= 1:
        return [(c, 1)]
    out = []
    b, _ = _divmod(c, g)
    cpart, _ = _divmod(d, g)
    k = 1
    minus = [x - y for x, y in
             zip(cpart + [mpq(0)] * len(b), _deriv(b) + [mpq(0)] * len(cpart))]
    minus = _trim(minus)
    while len(b) > 1:
        h = _gcd(b, minus) if minus else [x / b[-1] for x in b]
        if not h:
            h = [mpq(1)]
        if len(h) > 1:
            out.append((h, k))
        b, _ = _divmod(b, h)
        if minus:
            cpart, _ = _divmod(minus, h)
        else:
            cpart = []
        minus = [x - y for x, y in
                 zip(cpart + [mpq(0)] * len(b),
                     _deriv(b) + [mpq(0)] * len(cpart))]
        minus = _trim(minus)
        k += 1
    return out


def _sturm_chain(c):
    chain = [_trim(list(c))]
    d = _trim(_deriv(c))
    if d:
        chain.append(d)
        while True:
            _, r = _divmod(chain[-2], chain[-1])
            if not r:
                break
            chain.append([-x for x in r])
    return chain


def _variations(chain, x):
    signs = []
    for p in chain:
        v = _eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    count = 0
    for a, b in zip(signs, signs[1:]):
        if a != b:
            count += 1
    return count


def cauchy_bound(c):
    """All real roots lie in [-bound, bound]."""
    lead = abs(c[-1])
    m = max((abs(x) for x in c[:-1]), default=mpq(0))
    return 1 + m / lead


class IsolatingInterval:
    """A rational interval containing exactly one distinct real root."""

    __slots__ = ("low", "high", "multiplicity", "exact")

    def __init__(self, low, high, multiplicity=1, exact=False):
        self.low = mpq(low)
        self.high = mpq(high)
        self.multiplicity = multiplicity
        self.exact = exact

    def midpoint(self):
        return (self.low + self.high) / 2

    def __repr__(self):
        return (f"IsolatingInterval([{self.low}, {self.high}], "
                f"mult={self.multiplicity})")


def _isolate_square_free(c):
    """Disjoint isolating intervals for the roots of a square-free polynomial."""
    chain = _sturm_chain(c)
    bound = cauchy_bound(c)
    results = []

    def count(a, b):
        return _variations(chain, a) - _variations(chain, b)

    def recurse(a, b):
        k = count(a, b)
        if k == 0:
            return
        if k == 1:
            if _eval(c, b) == 0:
                results.append(IsolatingInterval(b, b, exact=True))
            else:
                results.append(IsolatingInterval(a, b))
            return
        # Split at a non-root point: Sturm variation counts are only valid
        # at points where the polynomial does not vanish.
        m = (a + b) / 2
        shift = (b - a) / 4
        while _eval(c, m) == 0:
            m = m + shift
            shift = shift / 2
        recurse(a, m)
        recurse(m, b)

    recurse(-bound, bound)
    results.sort(key=lambda r: r.low)
    return results


def isolate_univariate_roots(poly, name=None):
    """Isolating intervals (with multiplicities) for all distinct real roots."""
    if poly.is_zero():
        raise ZeroPolynomialError("cannot isolate roots of the zero polynomial")
    if name is None:
        used = poly.variables_used()
        if len(used) != 1:
            raise StructuralError("polynomial is not univariate")
        name = next(iter(used))
    c = univariate_coeffs(poly, name)
    return isolate_roots_of_coeffs(c)


def isolate_roots_of_coeffs(c):
    c = _trim(list(c))
    if not c:
        raise ZeroPolynomialError("cannot isolate roots of the zero polynomial")
    if len(c) == 1:
        return []
    out = []
    for factor, mult in square_free_decomposition(c):
        for iv in _isolate_square_free(factor):
            iv.multiplicity = mult
            out.append((iv, factor))

    def shrink(iv, factor):
        if iv.exact:
            return
        m = iv.midpoint()
        fm = _eval(factor, m)
        if fm == 0:
            iv.low = iv.high = m
            iv.exact = True
            return
        fa = _eval(factor, iv.low)
        if (fm > 0) == (fa > 0):
            iv.low = m
        else:
            iv.high = m

    # Intervals from different square-free factors may overlap; bisect until
    # all intervals are pairwise disjoint.
    changed = True
    while changed:
        changed = False
        out.sort(key=lambda t: (t[0].low, t[0].high))
        for (a, fa), (b, fb) in zip(out, out[1:]):
            # Overlapping interiors, or a shared endpoint that is itself a
            # root (the other interval would then contain two roots).
            if a.high > b.low or (a.exact and b.exact and a.low == b.low) \
                    or (a.high == b.low and (a.exact or b.exact)):
                shrink(a, fa)
                shrink(b, fb)
                changed = True
    return [iv for iv, _ in out]


def refine_root_of_coeffs(c, interval, target_bits=DEFAULT_PRECISION):
    """Bisect an isolating interval until its width is below
    2^-target_bits * max(1, |root|); returns a high-precision real."""
    if interval.exact:
        return to_mpf(interval.low, target_bits + 8)
    # Work on the square-free factor containing this root.
    parts = square_free_decomposition(c)
    factor = None
    for f, _ in parts:
        if _eval(f, interval.low) == 0 or _eval(f, interval.high) == 0:
            continue
        if (_eval(f, interval.low) > 0) != (_eval(f, interval.high) > 0):
            factor = f
            break
    if factor is None:
        factor = c
    a, b = interval.low, interval.high
    fa = _eval(factor, a)
    if fa == 0:
        return to_mpf(a, target_bits + 8)
    scale = max(mpq(1), abs(a), abs(b))
    tol = scale / (mpq(2) ** target_bits)
    while b - a > tol:
        m = (a + b) / 2
        fm = _eval(factor, m)
        if fm == 0:
            return to_mpf(m, target_bits + 8)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return to_mpf((a + b) / 2, target_bits + 8)


def refine_root(poly, interval, target_bits=DEFAULT_PRECISION, name=None):
    if name is None:
        used = poly.variables_used()
        if len(used) != 1:
            raise StructuralError("polynomial is not univariate")
        name = next(iter(used))
    return refine_root_of_coeffs(univariate_coeffs(poly, name), interval,
                                 target_bits)


# ---------------------------------------------------------------------------
# zero-dimensional back-substitution
# ---------------------------------------------------------------------------


class RootBox:
    """One numerically refined solution of a polynomial system."""

    __slots__ = ("varset", "values", "residual", "ill_conditioned")

    def __init__(self, varset, values, residual, ill_conditioned=False):
        self.varset = varset
        self.values = dict(values)  # name -> high-precision real
        self.residual = residual
        self.ill_conditioned = ill_conditioned

    def point(self, names=None):
        names = names or self.varset.names
        return [self.values[n] for n in names]

    def rational_point(self, names=None):
        return [rational_from_mpf(v) for v in self.point(names)]

    def __repr__(self):
        inner = ", ".join(f"{n}={mpmath.nstr(v, 8)}"
                          for n, v in self.values.items())
        return f"RootBox({inner}; residual={mpmath.nstr(self.residual, 3)})"


def _coefficient_scale(poly):
    m = max((abs(c) for c in poly.terms.values()), default=mpq(1))
    return max(mpq(1), m)


def _system_residual(generators, values, prec):
    worst = mpmath.mpf(0)
    with mpmath.workprec(prec):
        for g in generators:
            point = [values[n] for n in g.varset.names]
            val = abs(g.evaluate(point)) / to_mpf(_coefficient_scale(g), prec)
            if val > worst:
                worst = val
    return worst


def solve_zero_dimensional(basis, precision=DEFAULT_PRECISION,
                           residual_tol=mpq(1, 10**20), max_precision=2048,
                           reject_tol=mpq(1, 10**8)):
    """All real solutions of a zero-dimensional lex basis.

    Works from the least significant variable upward.  Every generator that
    becomes univariate under the current partial assignment contributes the
    refined roots of its specialization as candidate values; a value is kept
    only if every such generator nearly vanishes there, measured against the
    original generator's coefficient scale.  Taking the union over all
    univariate generators (rather than trusting a single one) matters on
    degenerate fibers: a generator whose leading coefficient vanishes at the
    current assignment specializes to a tiny polynomial whose roots say
    nothing about the fiber, while the scale-relative vanishing test lets it
    impose no constraint, exactly as it should.  Full assignments whose
    residual exceeds the tolerance are retried at higher precision; at the
    precision cap they are kept but flagged ill-conditioned when plausibly
    close, and rejected outright when clearly off the variety.
    """
    from .groebner import is_zero_dimensional
    flag, free = is_zero_dimensional(basis)
    if not flag:
        raise StructuralError(f"system is not zero-dimensional (free: {free})")
    if basis.is_unit_ideal():
        return []
    varset = basis.varset
    names_desc = list(varset.names)          # most significant first
    scales = [_coefficient_scale(g) for g in basis]
    prune_tol = to_mpf(mpq(1, 10**10), 64)

    def solve_at(prec):
        close = mpmath.mpf(2) ** (-(prec // 2))
        partial = [{}]
        for name in reversed(names_desc):    # least significant first
            nxt = []
            for bindings in partial:
                candidates = []
                for g, scale in zip(basis, scales):
                    spec = g.substitute_partial(bindings) if bindings else g
                    if spec.is_zero():
                        continue
                    if spec.variables_used() == {name}:
                        candidates.append(
                            (univariate_coeffs(spec, name), scale))
                if not candidates:
                    continue
                candidates.sort(key=lambda t: len(t[0]))
                values = []
                for coeffs, _ in candidates:
                    for iv in isolate_roots_of_coeffs(coeffs):
                        v = refine_root_of_coeffs(coeffs, iv, prec)
                        if all(abs(v - w) > close for w in values):
                            values.append(v)
                for v in values:
                    ok = True
                    for coeffs, scale in candidates:
                        val = abs(_eval_f(coeffs, v, prec))
                        if val > prune_tol * to_mpf(scale, prec):
                            ok = False
                            break
                    if ok:
                        nb = dict(bindings)
                        nb[name] = rational_from_mpf(v)
                        nxt.append(nb)
            partial = nxt
        boxes = []
        for bindings in partial:
            if set(bindings) != set(names_desc):
                continue
            values = {n: to_mpf(bindings[n], prec) for n in names_desc}
            res = _system_residual(list(basis), values, prec)
            boxes.append(RootBox(varset, values, res))
        return boxes

    tol = to_mpf(mpq(residual_tol), 64)
    coarse = to_mpf(mpq(reject_tol), 64)
    prec = precision
    while True:
        boxes = solve_at(prec)
        bad = [b for b in boxes if b.residual > tol]
        if not bad or prec >= max_precision:
            break
        prec = min(max_precision, prec * 2)
    accepted = []
    for b in boxes:
        if b.residual > tol:
            if b.residual > coarse:
                continue
            b.ill_conditioned = True
        accepted.append(b)
    return dedup_rootboxes(accepted)


def dedup_rootboxes(boxes, tol=mpq(1, 10**9)):
    """Merge boxes whose coordinates all agree within the tolerance."""
    tol_f = to_mpf(mpq(tol), 64)
    kept = []
    for b in boxes:
        merged = False
        for k in kept:
            if all(abs(b.values[n] - k.values[n]) <= tol_f
                   for n in b.varset.names):
                merged = True
                break
        if not merged:
            kept.append(b)
    kept.sort(key=lambda b: tuple(b.values[n] for n in b.varset.names))
    return kept


def filter_exclusions(points, exclusion_generators, tol=mpq(1, 10**9)):
    """Drop points lying on the exclusion variety: a point is dropped when
    every exclusion generator evaluates within the tolerance of zero."""
    gens = [g for g in exclusion_generators if not g.is_zero()]
    if not gens:
        return list(points)
    tol_f = to_mpf(mpq(tol), 64)
    kept = []
    for box in points:
        on_variety = True
        for g in gens:
            point = [box.values.get(n, mpmath.mpf(0)) for n in g.varset.names]
            with mpmath.workprec(DEFAULT_PRECISION):
                val = abs(g.evaluate(point)) / to_mpf(_coefficient_scale(g),
                                                      DEFAULT_PRECISION)
            if val > tol_f:
                on_variety = False
                break
        if not on_variety:
            kept.append(box)
    return kept


class VarietySample:
    """Sampled points from a positive-dimensional solution component."""

    __slots__ = ("basis", "free_variables", "boxes", "requested", "diagnostic")

    def __init__(self, basis, free_variables, boxes, requested,
                 diagnostic=None):
        self.basis = basis
        self.free_variables = list(free_variables)
        self.boxes = list(boxes)
        self.requested = requested
        self.diagnostic = diagnostic


def sample_positive_dimensional(basis, free_variables, count=10000,
                                box=(mpq(-10), mpq(10)), region=None,
                                seed=0, precision=DEFAULT_PRECISION):
    """Uniformly specialize the free variables inside the box and solve for
    the rest; keeps residual-passing (and, optionally, region-member) points
    until the count or a 10x attempt budget is reached."""
    from .groebner import is_zero_dimensional
    flag, free = is_zero_dimensional(basis)
    if flag:
        raise StructuralError("variety is finite; sampling needs free variables")
    free_variables = list(free_variables or free)
    rng = random.Random(seed)
    lo, hi = mpq(box[0]), mpq(box[1])
    grain = 10**9
    boxes = []
    attempts = 0
    budget = 10 * count
    while len(boxes) < count and attempts < budget:
        attempts += 1
        bindings = {}
        for name in free_variables:
            t = mpq(rng.randrange(grain + 1), grain)
            bindings[name] = lo + (hi - lo) * t
        specialized = []
        for g in basis:
            s = g.substitute_partial(bindings)
            if not s.is_zero():
                specialized.append(s)
        sub_names = [n for n in basis.varset.names if n not in bindings]
        if not sub_names:
            continue
        sub_vs = basis.varset.restricted(sub_names)
        try:
            sub_polys = [p.project(sub_vs) for p in specialized]
        except StructuralError:
            continue
        from .groebner import GroebnerBasis, Ideal, buchberger
        try:
            sub_basis = buchberger(Ideal(sub_vs, sub_polys), basis.order)
        except Exception:
            continue
        sub_flag, _ = is_zero_dimensional(sub_basis)
        if not sub_flag:
            continue
        for sol in solve_zero_dimensional(sub_basis, precision):
            if sol.ill_conditioned:
                continue
            values = {n: to_mpf(v, precision) for n, v in bindings.items()}
            values.update(sol.values)
            full = RootBox(basis.varset, values,
                           _system_residual(list(basis), values, precision))
            if full.residual > to_mpf(mpq(1, 10**12), 64):
                continue
            if region is not None:
                verdict, _ = region_membership(
                    region, full.point(basis.varset.names))
                if verdict == "outside":
                    continue
            boxes.append(full)
            if len(boxes) >= count:
                break
    diagnostic = None
    if not boxes:
        diagnostic = f"no samples accepted in {attempts} attempts"
    return VarietySample(basis, free_variables, boxes, count, diagnostic)
