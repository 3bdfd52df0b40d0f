"""Ideals and Gröbner bases: multivariate division, Buchberger's algorithm,
reduced-basis normalization, saturation, elimination, zero-dimensionality, and
FGLM order conversion.

All computations are deterministic and exact over the rationals.  Long-running
basis computations honor resource limits (wall-clock, total degree, pair count)
and raise ``ResourceLimitError`` when exceeded; callers treat that as an
"unresolved" outcome rather than a failure.
"""

from __future__ import annotations

import heapq
import itertools
import time

from gmpy2 import mpq

from .errors import (ResourceLimitError, StructuralError, UnsupportedError,
                     ZeroPolynomialError)
from .poly import (GREVLEX, LEX, ROLE_SATURATION, MonomialOrder, Polynomial,
                   VariableSet, monomial_degree, monomial_div,
                   monomial_divides, monomial_lcm, monomial_mul)


class GroebnerLimits:
    """Resource budget for one basis computation."""

    __slots__ = ("max_pairs", "max_degree", "timeout")

    def __init__(self, max_pairs=10**6, max_degree=64, timeout=300.0):
        self.max_pairs = max_pairs
        self.max_degree = max_degree
        self.timeout = timeout

    def start_clock(self):
        return time.monotonic()

    def check(self, started, pairs_done, degree):
        if self.timeout is not None and time.monotonic() - started > self.timeout:
            raise ResourceLimitError(f"timeout after {self.timeout:g}s")
        if pairs_done > self.max_pairs:
            raise ResourceLimitError(f"pair budget {self.max_pairs} exceeded")
        if degree > self.max_degree:
            raise ResourceLimitError(
                f"degree {degree} exceeds limit {self.max_degree}")


class Ideal:
    """A finitely generated polynomial ideal."""

    __slots__ = ("varset", "generators")

    def __init__(self, varset, generators=()):
        self.varset = varset
        gens = []
        for g in generators:
            if g.varset != varset:
                raise StructuralError("generator over a different variable set")
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)

    def __repr__(self):
        inner = ", ".join(g.to_text() for g in self.generators) or "0"
        return f"Ideal(<{inner}>)"


class GroebnerBasis:
    """A list of basis polynomials together with the order they satisfy."""

    __slots__ = ("varset", "polynomials", "order", "reduced")

    def __init__(self, varset, polynomials, order, reduced=False):
        self.varset = varset
        self.polynomials = tuple(polynomials)
        self.order = order
        self.reduced = reduced

    def is_unit_ideal(self):
        return any(p.is_constant() and not p.is_zero() for p in self.polynomials)

    def __iter__(self):
        return iter(self.polynomials)

    def __len__(self):
        return len(self.polynomials)

    def __repr__(self):
        inner = ", ".join(p.to_text(self.order) for p in self.polynomials) or "0"
        return f"GroebnerBasis(<{inner}>, {self.order.tag})"


def divide_reduce(f, divisors, order):
    """Multivariate division: remainder of f by the divisor list.

    Returns (remainder, reduced_to_zero).  No term of the remainder is
    divisible by any divisor's leading monomial.
    """
    divisors = [d for d in divisors if not d.is_zero()]
    leads = [(d.leading_term(order), d) for d in divisors]
    varset = f.varset
    p = f
    rem_terms = {}
    while not p.is_zero():
        mono, coeff = p.leading_term(order)
        for (dm, dc), d in leads:
            if monomial_divides(dm, mono):
                factor = Polynomial.monomial(varset, monomial_div(mono, dm),
                                             coeff / dc)
                p = p - factor * d
                break
        else:
            rem_terms[mono] = coeff
            p = p - Polynomial.monomial(varset, mono, coeff)
    remainder = Polynomial(varset, rem_terms)
    return remainder, remainder.is_zero()


def s_polynomial(f, g, order):
    """Buchberger's S-polynomial: the lcm-scaled combination cancelling both
    leading terms."""
    fm, fc = f.leading_term(order)
    gm, gc = g.leading_term(order)
    l = monomial_lcm(fm, gm)
    tf = Polynomial.monomial(f.varset, monomial_div(l, fm), mpq(1) / fc)
    tg = Polynomial.monomial(g.varset, monomial_div(l, gm), mpq(1) / gc)
    return tf * f - tg * g


def _coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _update_pairs(basis, pairs, new_index, order):
    """Gebauer-Möller pair update: add pairs with the new element, pruning via
    the product and chain criteria."""
    lm = [g.leading_monomial(order) for g in basis]
    h = new_index
    lmh = lm[h]
    candidates = list(range(h))
    kept = []
    while candidates:
        i = candidates.pop()
        lcm_ih = monomial_lcm(lm[i], lmh)
        if _coprime(lm[i], lmh):
            continue  # product criterion
        strictly_smaller = False
        for j in itertools.chain(candidates, (k for k, _ in kept)):
            lcm_jh = monomial_lcm(lm[j], lmh)
            if lcm_jh != lcm_ih and monomial_divides(lcm_jh, lcm_ih):
                strictly_smaller = True
                break
        if not strictly_smaller:
            kept.append((i, lcm_ih))
    surviving = []
    for (i, j, lcm_ij) in pairs:
        if (not monomial_divides(lmh, lcm_ij)
                or monomial_lcm(lm[i], lmh) == lcm_ij
                or monomial_lcm(lm[j], lmh) == lcm_ij):
            surviving.append((i, j, lcm_ij))
    for i, lcm_ih in kept:
        surviving.append((i, h, lcm_ih))
    return surviving


def interreduce(polynomials, order):
    """Reduce a basis to the unique reduced, monic, order-sorted form."""
    polys = [p for p in polynomials if not p.is_zero()]
    # Minimalize: drop any element whose leading monomial is divisible by
    # another's.
    polys.sort(key=lambda p: order.key(p.leading_monomial(order)))
    minimal = []
    for p in polys:
        lm = p.leading_monomial(order)
        if not any(monomial_divides(q.leading_monomial(order), lm)
                   for q in minimal):
            minimal.append(p)
    # Fully reduce each element against the others.
    reduced = []
    for i, p in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r, _ = divide_reduce(p, others, order)
        if not r.is_zero():
            reduced.append(r.monic(order))
    reduced.sort(key=lambda p: order.key(p.leading_monomial(order)),
                 reverse=True)
    return reduced


def buchberger(ideal, order, limits=None):
    """Buchberger's algorithm with the normal selection strategy and
    Gebauer-Möller pair pruning; result is the reduced monic basis."""
    if limits is None:
        limits = GroebnerLimits()
    started = limits.start_clock()
    basis = []
    pairs = []
    for g in ideal.generators:
        basis.append(g.primitive(order))
        pairs = _update_pairs(basis, pairs, len(basis) - 1, order)
    pairs_done = 0
    while pairs:
        # Normal strategy: smallest lcm under the active order.
        best = min(range(len(pairs)), key=lambda k: order.key(pairs[k][2]))
        i, j, lcm_ij = pairs.pop(best)
        pairs_done += 1
        limits.check(started, pairs_done, monomial_degree(lcm_ij))
        s = s_polynomial(basis[i], basis[j], order)
        remainder, zero = divide_reduce(s, basis, order)
        if zero:
            continue
        remainder = remainder.primitive(order)
        limits.check(started, pairs_done, remainder.total_degree())
        basis.append(remainder)
        pairs = _update_pairs(basis, pairs, len(basis) - 1, order)
    reduced = interreduce(basis, order)
    return GroebnerBasis(ideal.varset, reduced, order, reduced=True)


def _fresh_saturation_name(varset):
    name = "Y"
    while name in varset.names:
        name += "_"
    return name


def _saturation_step(varset, generators, factor, limits):
    """One Rabinowitsch pass: eliminate a fresh Y from
    <generators, 1 - Y*factor>; returns the interreduced grevlex basis of the
    result, i.e. a basis of <generators> : factor^∞.

    The pass is run in the Y-elimination block order; when that basis comes
    out zero-dimensional along the way the cheaper grevlex-then-FGLM route is
    not needed, and when the Y-elimination order diverges the caller's
    resource limits stop it.
    """
    yname = _fresh_saturation_name(varset)
    extended = varset.extended([yname], ROLE_SATURATION)
    y = Polynomial.variable(extended, yname)
    gens = [g.project(extended) for g in generators]
    gens.append(Polynomial.constant(extended, 1) - y * factor.project(extended))
    basis = buchberger(Ideal(extended, gens), MonomialOrder("elim:1"), limits)
    kept = []
    for p in basis:
        if all(mono[0] == 0 for mono in p.terms):
            kept.append(p.project(varset))
    return GroebnerBasis(varset, interreduce(kept, GREVLEX), GREVLEX,
                         reduced=True)


def _bounded_staircase(basis, cap):
    """Standard monomials of a grevlex basis with total degree at most the
    cap, in ascending grevlex order."""
    leads = [p.leading_monomial(GREVLEX) for p in basis]
    n = len(basis.varset)
    origin = (0,) * n
    seen = {origin}
    stack = [origin]
    out = []
    while stack:
        m = stack.pop()
        if sum(m) > cap:
            continue
        if any(monomial_divides(lm, m) for lm in leads):
            continue
        out.append(m)
        for i in range(n):
            nxt = tuple(e + 1 if k == i else e for k, e in enumerate(m))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    out.sort(key=GREVLEX.key)
    return out


def _quotient_elements(basis, factor, cap):
    """Low-degree elements of <basis> : factor found by linear algebra.

    For each bounded-staircase monomial m in ascending grevlex order, the
    normal form of m*factor is eliminated against those seen so far; a
    vanishing residual exhibits a combination g = m - sum(...) with g*factor
    in the ideal.  Monomials under an already-found lead are skipped, so the
    returned elements have pairwise indivisible leading monomials.
    """
    gblist = list(basis)
    varset = basis.varset
    rows = []          # (pivot monomial, sparse vector, combo) echelon rows
    inserted = []      # monomials whose normal-form vectors are independent
    found = []
    found_leads = []
    for m in _bounded_staircase(basis, cap):
        if any(monomial_divides(lm, m) for lm in found_leads):
            continue
        prod = Polynomial.monomial(varset, m, mpq(1)) * factor
        nf, _ = divide_reduce(prod, gblist, GREVLEX)
        v = dict(nf.terms)
        combo = {}
        for pivot, rvec, rcombo in rows:
            c = v.get(pivot)
            if c:
                f = c / rvec[pivot]
                for k, val in rvec.items():
                    nv = v.get(k, mpq(0)) - f * val
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
                for idx, cc in rcombo.items():
                    combo[idx] = combo.get(idx, mpq(0)) + f * cc
        if not v:
            terms = {m: mpq(1)}
            for idx, c in combo.items():
                mm = inserted[idx]
                terms[mm] = terms.get(mm, mpq(0)) - c
            found.append(Polynomial(varset, terms))
            found_leads.append(m)
        else:
            pivot = max(v, key=GREVLEX.key)
            rows.append((pivot, v,
                         {len(inserted): mpq(1),
                          **{k: -c for k, c in combo.items()}}))
            inserted.append(m)
    return found


def _enlarge_toward_saturation(varset, generators, factor, limits):
    """Grow an ideal toward its factor-saturation by adjoining quotient
    elements round by round.

    Every intermediate ideal K satisfies I ⊆ K ⊆ I : factor^∞, so a final
    Rabinowitsch pass on K still yields exactly I : factor^∞ — but starting
    from a far tighter ideal, which is what makes the pass affordable when
    the raw saturation is not.  Rounds stop when no new elements appear.
    """
    gb = buchberger(Ideal(varset, list(generators)), GREVLEX, limits)
    for _ in range(24):
        if gb.is_unit_ideal():
            break
        cap = max(p.total_degree() for p in gb) + 1
        found = _quotient_elements(gb, factor, cap)
        if not found:
            break
        gb = buchberger(Ideal(varset, list(gb.polynomials) + found),
                        GREVLEX, limits)
    return gb


def saturate(ideal, h, limits=None, drop=(), precondition=False):
    """The saturation I : <h>^∞ as a reduced lex basis over the non-dropped
    variables.

    ``h`` is a single polynomial or a sequence of factors; saturation by a
    product is the iterated saturation by its factors, and iterating keeps
    every Rabinowitsch generator 1 − Y·f small.  Factors are processed in
    ascending degree (cheap wall factors first).  Any ``drop`` variables
    (which must be the greatest variables of the ideal) ride along through
    the passes and are eliminated by the final lex conversion, whose
    drop-free subset is the reduced lex basis of the elimination ideal.
    With ``precondition`` each factor's ideal is first enlarged by cheap
    quotient elements, which leaves the result unchanged but can make an
    otherwise intractable Rabinowitsch pass fast.
    """
    factors = [h] if isinstance(h, Polynomial) else list(h)
    if not factors:
        factors = [Polynomial.constant(ideal.varset, 1)]
    if any(f.is_zero() for f in factors):
        raise ZeroPolynomialError("cannot saturate by the zero polynomial")
    drop = list(drop)
    if list(ideal.varset.names[:len(drop)]) != drop:
        raise StructuralError(
            "dropped variables must be the greatest variables of the ideal")
    factors = sorted(factors, key=lambda f: f.total_degree())
    varset = ideal.varset
    target_vs = varset if not drop else \
        varset.restricted(varset.names[len(drop):])
    grev = None
    for factor in factors:
        if factor.varset != varset:
            factor = factor.project(varset)
        gens = ideal.generators if grev is None else grev.polynomials
        if precondition:
            gens = _enlarge_toward_saturation(varset, gens, factor,
                                              limits).polynomials
        grev = _saturation_step(varset, gens, factor, limits)
        if grev.is_unit_ideal():
            one = Polynomial.constant(target_vs, 1)
            return GroebnerBasis(target_vs, [one], LEX, reduced=True)
    flag, _ = is_zero_dimensional(grev)
    if flag:
        lex_full = convert_order(grev, LEX, limits)
    else:
        lex_full = buchberger(Ideal(varset, grev.polynomials), LEX, limits)
    if not drop:
        return lex_full
    block = len(drop)
    kept = [p.project(target_vs) for p in lex_full
            if all(all(m[i] == 0 for i in range(block)) for m in p.terms)]
    return GroebnerBasis(target_vs, interreduce(kept, LEX), LEX, reduced=True)


def eliminate(basis, keep_names):
    """Subset of a lex basis involving only the kept (least significant)
    variables: a lex Gröbner basis of the elimination ideal."""
    if basis.order != LEX:
        raise StructuralError("elimination requires a lex basis")
    varset = basis.varset
    keep = set(keep_names)
    dropped_idx = [i for i, n in enumerate(varset.names) if n not in keep]
    kept_idx = [i for i, n in enumerate(varset.names) if n in keep]
    if dropped_idx and kept_idx and max(dropped_idx) > min(kept_idx):
        raise StructuralError(
            "every dropped variable must be greater than every kept variable")
    sub = varset.restricted(keep)
    kept_polys = []
    for p in basis:
        if all(all(mono[i] == 0 for i in dropped_idx) for mono in p.terms):
            kept_polys.append(p.project(sub))
    return GroebnerBasis(sub, kept_polys, LEX, reduced=basis.reduced)


def is_zero_dimensional(basis):
    """(flag, free_variables): true iff every variable has a pure-power
    leading monomial in some basis element."""
    n = len(basis.varset)
    covered = set()
    for p in basis:
        mono = p.leading_monomial(basis.order)
        nonzero = [i for i, e in enumerate(mono) if e]
        if len(nonzero) == 1:
            covered.add(nonzero[0])
        elif len(nonzero) == 0:
            return True, []  # unit ideal: empty variety
    free = [basis.varset.names[i] for i in range(n) if i not in covered]
    return (not free), free


def _staircase(basis):
    """Monomials below the leading-term staircase (the quotient-ring basis)."""
    order = basis.order
    leads = [p.leading_monomial(order) for p in basis]
    n = len(basis.varset)
    origin = (0,) * n
    seen = {origin}
    stack = [origin]
    standard = []
    while stack:
        m = stack.pop()
        if any(monomial_divides(lm, m) for lm in leads):
            continue
        standard.append(m)
        for i in range(n):
            nxt = tuple(e + 1 if k == i else e for k, e in enumerate(m))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return standard


def convert_order(basis, target=LEX, limits=None):
    """FGLM conversion of a zero-dimensional reduced basis to another order."""
    flag, free = is_zero_dimensional(basis)
    if not flag:
        raise UnsupportedError(
            f"order conversion requires a finite variety (free: {free})")
    if basis.is_unit_ideal():
        one = Polynomial.constant(basis.varset, 1)
        return GroebnerBasis(basis.varset, [one], target, reduced=True)
    varset = basis.varset
    n = len(varset)
    standard = _staircase(basis)
    position = {m: i for i, m in enumerate(standard)}
    dim = len(standard)

    def normal_form_vector(mono):
        poly = Polynomial.monomial(varset, mono, 1)
        rem, _ = divide_reduce(poly, list(basis), basis.order)
        vec = [mpq(0)] * dim
        for m, c in rem.terms.items():
            vec[position[m]] = c
        return vec

    # Row-reduced independent set: rows[k] = (pivot_index, vector, combo)
    # where combo expresses the row as a combination of inserted monomials.
    inserted = []          # monomials whose NF vectors are independent
    rows = []              # (pivot, vector, combo) in echelon form

    def try_insert(vec):
        """Eliminate vec against rows; return (residual, combo) where combo
        maps inserted-monomial index -> coefficient used."""
        v = list(vec)
        combo = {}
        for pivot, rvec, rcombo in rows:
            if v[pivot] != 0:
                factor = v[pivot] / rvec[pivot]
                for k in range(dim):
                    if rvec[k] != 0:
                        v[k] -= factor * rvec[k]
                for idx, c in rcombo.items():
                    combo[idx] = combo.get(idx, mpq(0)) + factor * c
        return v, combo

    new_basis = []
    new_leads = []
    heap = [(target.key((0,) * n), (0,) * n)]
    queued = {(0,) * n}
    while heap:
        _, mono = heapq.heappop(heap)
        if any(monomial_divides(lm, mono) for lm in new_leads):
            continue
        vec = normal_form_vector(mono)
        residual, combo = try_insert(vec)
        if all(x == 0 for x in residual):
            # Dependent: mono - sum combo_i * inserted_i is in the ideal.
            terms = {mono: mpq(1)}
            for idx, c in combo.items():
                m = inserted[idx]
                terms[m] = terms.get(m, mpq(0)) - c
            g = Polynomial(varset, terms)
            new_basis.append(g)
            new_leads.append(mono)
        else:
            pivot = next(k for k in range(dim) if residual[k] != 0)
            # residual = NF(mono) - sum_i combo[i]*NF(inserted[i]).
            rows.append((pivot, residual,
                         {len(inserted): mpq(1),
                          **{k: -v for k, v in combo.items()}}))
            inserted.append(mono)
            for i in range(n):
                nxt = tuple(e + 1 if k == i else e for k, e in enumerate(mono))
                if nxt not in queued:
                    queued.add(nxt)
                    heapq.heappush(heap, (target.key(nxt), nxt))
    reduced = interreduce(new_basis, target)
    return GroebnerBasis(varset, reduced, target, reduced=True)


def groebner_basis(ideal, target=LEX, limits=None, force_direct=False):
    """Default basis path: grevlex first, FGLM to the target when the variety
    is finite, otherwise recompute directly in the target order."""
    if force_direct or target == GREVLEX:
        return buchberger(ideal, target, limits)
    g = buchberger(ideal, GREVLEX, limits)
    flag, _ = is_zero_dimensional(g)
    if flag:
        return convert_order(g, target, limits)
    return buchberger(ideal, target, limits)
