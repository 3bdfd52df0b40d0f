"""End-to-end enumeration: walk every activation pattern, extract its interior
and boundary critical points by saturation/elimination, merge duplicates
across overlapping partitions, lift head weights, and filter candidates by a
randomized local-minimality test.

Partition jobs are pure functions of (dataset, pattern, config) and may run in
a process pool; determinism is restored by canonical sorting and by deriving
every random seed from stable hashes of the global seed and the object it
perturbs, never from scheduling order.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath
from gmpy2 import mpq

from .errors import ResourceLimitError, StructuralError
from .groebner import (GroebnerBasis, GroebnerLimits, Ideal, interreduce,
                       is_zero_dimensional, saturate)
from .numbers import DEFAULT_PRECISION, to_mpf
from .poly import GREVLEX, LEX, Polynomial
from .realroots import (filter_exclusions, sample_positive_dimensional,
                        solve_zero_dimensional)
from .surrogate import (BoundaryComponent, IndicatorMatrix, PartitionRegion,
                        build_boundary_reduced, build_interior_system,
                        build_surrogate, loss_eval, optimal_head_weights,
                        region_membership)

DEDUP_TOL = mpq(1, 10**9)


class PipelineConfig:
    """Knobs for one enumeration run."""

    __slots__ = ("seed", "threads", "timeout", "max_degree", "max_pairs",
                 "perturb_count", "perturb_radius", "sample_count",
                 "sample_box", "prune_symmetry", "partition", "force_lex",
                 "display_precision", "indicator_cap", "cap_override")

    def __init__(self, seed=0, threads=1, timeout=300.0, max_degree=64,
                 max_pairs=10**6, perturb_count=20,
                 perturb_radius=mpq(1, 1000), sample_count=10000,
                 sample_box=(mpq(-10), mpq(10)), prune_symmetry=False,
                 partition=None, force_lex=False, display_precision=6,
                 indicator_cap=20, cap_override=False):
        self.seed = int(seed)
        self.threads = int(threads)
        self.timeout = timeout
        self.max_degree = max_degree
        self.max_pairs = max_pairs
        self.perturb_count = int(perturb_count)
        self.perturb_radius = mpq(perturb_radius)
        self.sample_count = int(sample_count)
        self.sample_box = (mpq(sample_box[0]), mpq(sample_box[1]))
        self.prune_symmetry = bool(prune_symmetry)
        self.partition = partition
        self.force_lex = bool(force_lex)
        self.display_precision = int(display_precision)
        self.indicator_cap = int(indicator_cap)
        self.cap_override = bool(cap_override)
        if self.perturb_count < 1 or self.perturb_radius <= 0:
            raise StructuralError("perturbation parameters must be positive")

    def limits(self):
        return GroebnerLimits(self.max_pairs, self.max_degree, self.timeout)


def derive_seed(*parts):
    """Stable 64-bit seed from string parts (independent of hash randomization)."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def enumerate_indicators(n, L, prune_symmetry=False, cap=20, override=False):
    """All 2^(nL) activation patterns, or one canonical representative per
    unordered multiset of columns when pruning hidden-unit symmetry.

    Yields (IndicatorMatrix, arrangements) where arrangements lists the
    distinct column orderings (tuples of indices into the canonical column
    list) realizing the orbit; without pruning each orbit is the identity.
    """
    if n * L > cap and not override:
        raise StructuralError(
            f"2^{n * L} patterns exceeds the cap of 2^{cap}; "
            "pass the override flag to proceed")
    identity = (tuple(range(L)),)
    if not prune_symmetry:
        for bits in itertools.product((1, -1), repeat=n * L):
            rows = [bits[i * L:(i + 1) * L] for i in range(n)]
            yield IndicatorMatrix(rows), identity
        return
    columns = sorted(itertools.product((1, -1), repeat=n))
    for combo in itertools.combinations_with_replacement(range(len(columns)), L):
        cols = [columns[k] for k in combo]
        rows = [[cols[ell][i] for ell in range(L)] for i in range(n)]
        # Distinct orderings of the column multiset.
        seen = set()
        distinct = []
        for perm in sorted(itertools.permutations(range(L))):
            arranged = tuple(cols[p] for p in perm)
            if arranged not in seen:
                seen.add(arranged)
                distinct.append(perm)
        yield IndicatorMatrix(rows), tuple(distinct)


class Component:
    """A positive-dimensional family of critical points inside one partition."""

    __slots__ = ("pattern", "provenance", "basis", "free_variables", "sample",
                 "sample_verdicts")

    def __init__(self, pattern, provenance, basis, free_variables, sample):
        self.pattern = pattern
        self.provenance = provenance
        self.basis = basis
        self.free_variables = list(free_variables)
        self.sample = sample
        self.sample_verdicts = []


class PartitionOutcome:
    """Everything one partition job produced."""

    __slots__ = ("pattern", "interior_points", "boundary_points",
                 "components", "unresolved")

    def __init__(self, pattern):
        self.pattern = pattern
        self.interior_points = []       # list of psi coordinate lists (mpf)
        self.boundary_points = []       # list of ((i, ell), psi list)
        self.components = []            # list of Component
        self.unresolved = []            # list of (stage, reason)


def boundary_face_basis(surrogate, i, ell, limits):
    """Reduced lex basis of the det-saturated face stationarity ideal.

    Computed on the face itself: the stationarity multiplier is removed by
    cross-multiplying the binding unit's stationarity pair, and the binding
    hyperplane is linear, so its lex-leading variable is substituted away
    before saturating (one variable fewer for the basis computation) and the
    hyperplane is restored into the reduced basis afterward.  The result is
    the same reduced lex basis the multiplier formulation yields, only much
    faster to obtain.
    """
    system = build_boundary_reduced(surrogate, i, ell)
    varset = system.varset
    xi = surrogate.xi_forms[(i, ell)]
    lead, coeff = xi.leading_term(LEX)
    idx = next(k for k, e in enumerate(lead) if e)
    name = varset.names[idx]
    # name -> name - xi/coeff, the (exact) solution of xi = 0 for name
    repl = (Polynomial.variable(varset, name)
            - Polynomial.constant(varset, 1 / coeff) * xi)
    sub_vs = varset.restricted([n for n in varset.names if n != name])
    gens = []
    for g in system.equations.generators:
        s = g.substitute(name, repl).project(sub_vs)
        if not s.is_zero():
            gens.append(s.primitive(GREVLEX))
    factors = [f.substitute(name, repl).project(sub_vs).primitive(GREVLEX)
               for f in system.saturation_factors]
    basis = saturate(Ideal(sub_vs, gens), factors, limits, precondition=True)
    if basis.is_unit_ideal():
        one = Polynomial.constant(varset, 1)
        return GroebnerBasis(varset, [one], LEX, reduced=True)
    polys = [p.project(varset) for p in basis] + [xi.monic(LEX)]
    return GroebnerBasis(varset, interreduce(polys, LEX), LEX, reduced=True)


def process_partition(dataset, E, config):
    """Run the interior and all boundary critical systems of one partition."""
    outcome = PartitionOutcome(E.pattern())
    limits = config.limits()
    surrogate = build_surrogate(dataset, E)
    region = PartitionRegion(dataset, E)
    names = dataset.varset.names

    try:
        system = build_interior_system(surrogate)
        sat = saturate(system.equations, system.saturation_factors, limits)
        if not sat.is_unit_ideal() and len(sat) > 0:
            finite, free = is_zero_dimensional(sat)
            if finite:
                boxes = solve_zero_dimensional(sat)
                boxes = filter_exclusions(boxes, [system.exclusion_product()])
                for box in boxes:
                    verdict, _ = region_membership(region, box.point(names))
                    if verdict == "inside_interior":
                        outcome.interior_points.append(box.point(names))
            else:
                seed = derive_seed(config.seed, E.pattern(), "interior-sample")
                sample = sample_positive_dimensional(
                    sat, free, config.sample_count, config.sample_box,
                    region=region, seed=seed)
                sample.boxes = [
                    b for b in sample.boxes
                    if region_membership(region, b.point(names))[0]
                    == "inside_interior"]
                outcome.components.append(Component(
                    E.pattern(), ("interior",), sat, free, sample))
        elif len(sat) == 0:
            # Zero ideal after saturation: the whole space is critical;
            # report as a full-dimensional component without samples.
            outcome.unresolved.append(("interior", "saturation is the zero ideal"))
    except ResourceLimitError as exc:
        outcome.unresolved.append(("interior", exc.reason))

    for i in range(dataset.n):
        for ell in range(dataset.L):
            stage = f"boundary({i},{ell})"
            try:
                basis = boundary_face_basis(surrogate, i, ell, limits)
                if basis.is_unit_ideal() or len(basis) == 0:
                    continue
                finite, free = is_zero_dimensional(basis)
                face = BoundaryComponent(region, i, ell)
                if finite:
                    for box in solve_zero_dimensional(basis):
                        verdict, binding = region_membership(
                            face, box.point(names))
                        if verdict == "on_boundary":
                            outcome.boundary_points.append(
                                ((i, ell), box.point(names)))
                else:
                    seed = derive_seed(config.seed, E.pattern(),
                                       f"boundary-sample-{i}-{ell}")
                    sample = sample_positive_dimensional(
                        basis, free, config.sample_count, config.sample_box,
                        region=face, seed=seed)
                    outcome.components.append(Component(
                        E.pattern(), ("boundary", i, ell), basis, free,
                        sample))
            except ResourceLimitError as exc:
                outcome.unresolved.append((stage, exc.reason))
    return outcome


def _partition_worker(args):
    dataset, pattern, config = args
    E = IndicatorMatrix.from_pattern(pattern, dataset.n, dataset.L)
    return process_partition(dataset, E, config)


def permute_point(dataset, psi, perm):
    """Apply a hidden-unit permutation to flat psi: new block k is old block
    perm[k] for both the b-rows and the biases."""
    L, d = dataset.L, dataset.d
    out = [None] * len(psi)
    for k in range(L):
        src = perm[k]
        for j in range(d):
            out[k * d + j] = psi[src * d + j]
        out[L * d + k] = psi[L * d + src]
    return out


def permute_polynomial_units(dataset, poly, perm):
    """Rename unit variables of a polynomial under a hidden-unit permutation."""
    varset = poly.varset
    L, d = dataset.L, dataset.d
    mapping = {}
    for k in range(L):
        src = perm[k]
        for j in range(d):
            mapping[varset.index(f"b_{src + 1}{j + 1}")] = \
                varset.index(f"b_{k + 1}{j + 1}")
        mapping[varset.index(f"c_{src + 1}")] = varset.index(f"c_{k + 1}")
    terms = {}
    for mono, coeff in poly.terms.items():
        new = list(mono)
        for old_idx, new_idx in mapping.items():
            new[new_idx] = mono[old_idx]
        terms[tuple(new)] = coeff
    from .poly import Polynomial
    return Polynomial(varset, terms)


class CandidatePoint:
    """One merged stationary point with lifted head weights and a verdict."""

    __slots__ = ("psi", "psi_rational", "provenance", "head", "loss", "bias",
                 "verdict")

    def __init__(self, psi, psi_rational, provenance):
        self.psi = list(psi)
        self.psi_rational = list(psi_rational)
        self.provenance = sorted(set(provenance))
        self.head = None
        self.loss = None
        self.bias = None
        self.verdict = "undetermined"


class EnumerationResult:
    """The full output of one run."""

    __slots__ = ("dataset", "candidates", "components", "unresolved",
                 "metadata")

    def __init__(self, dataset, candidates, components, unresolved, metadata):
        self.dataset = dataset
        self.candidates = candidates
        self.components = components
        self.unresolved = unresolved
        self.metadata = metadata

    def minima(self):
        return [c for c in self.candidates if c.verdict == "minimum"]


def merge_and_dedup(entries, tol=DEDUP_TOL):
    """Merge (psi, provenance) pairs whose coordinates all agree within the
    tolerance; provenance lists are concatenated, output is canonically
    sorted by coordinates."""
    tol_f = to_mpf(mpq(tol), 64)
    merged = []
    for psi, prov in entries:
        hit = None
        for m in merged:
            if all(abs(a - b) <= tol_f for a, b in zip(psi, m[0])):
                hit = m
                break
        if hit is None:
            merged.append([list(psi), list(prov)])
        else:
            hit[1].extend(prov)
    merged.sort(key=lambda m: tuple(m[0]))
    return [(psi, prov) for psi, prov in merged]


def _rationalize(value):
    """Exact dyadic rational of a high-precision real."""
    from .numbers import rational_from_mpf
    return rational_from_mpf(value)


def lift_candidate(dataset, candidate):
    """Attach exact head weights, the loss value, and the outcome mean."""
    psi_q = candidate.psi_rational
    candidate.head = optimal_head_weights(dataset, psi_q)
    candidate.loss = loss_eval(dataset, "r3_mse", psi_q)
    candidate.bias = dataset.y_mean
    return candidate


def verify_local_minimality(dataset, psi_rational, M=20,
                            radius=mpq(1, 1000), seed=0):
    """The randomized filter: "minimum" iff the loss at M uniform points on
    the radius-eps sphere around psi never drops below the loss at psi.
    All evaluations are exact rational."""
    if M < 1 or radius <= 0:
        raise StructuralError("need M >= 1 and a positive radius")
    base = loss_eval(dataset, "r3_mse", psi_rational)
    rng = random.Random(seed)
    w = len(psi_rational)
    radius_f = float(Fraction(radius.numerator, radius.denominator))
    for _ in range(M):
        direction = [rng.gauss(0.0, 1.0) for _ in range(w)]
        norm = sum(v * v for v in direction) ** 0.5
        if norm == 0:
            direction = [1.0] + [0.0] * (w - 1)
            norm = 1.0
        delta = [mpq(Fraction(v / norm * radius_f)) for v in direction]
        perturbed = [p + d for p, d in zip(psi_rational, delta)]
        if loss_eval(dataset, "r3_mse", perturbed) < base:
            return "rejected"
    return "minimum"


def run_enumeration(dataset, config=None):
    """The complete divide-enumerate-merge run."""
    if config is None:
        config = PipelineConfig()
    if config.partition is not None:
        reps = [(IndicatorMatrix.from_pattern(config.partition, dataset.n,
                                              dataset.L),
                 (tuple(range(dataset.L)),))]
    else:
        reps = list(enumerate_indicators(
            dataset.n, dataset.L, prune_symmetry=config.prune_symmetry,
            cap=config.indicator_cap, override=config.cap_override))

    jobs = [(dataset, E.pattern(), config) for E, _ in reps]
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(_partition_worker, jobs))
    else:
        outcomes = [_partition_worker(job) for job in jobs]

    # Expand symmetry orbits back to full coverage.
    entries = []        # (psi, [(pattern, tag)])
    components = []
    unresolved = []
    for (E, arrangements), outcome in zip(reps, outcomes):
        for stage, reason in outcome.unresolved:
            unresolved.append({"pattern": outcome.pattern, "stage": stage,
                               "reason": reason})
        for perm in arrangements:
            permuted_E = E.permute_columns(perm)
            pattern = permuted_E.pattern()
            for psi in outcome.interior_points:
                entries.append((permute_point(dataset, psi, perm),
                                [(pattern, "interior")]))
            for (i, ell), psi in outcome.boundary_points:
                new_ell = perm.index(ell)
                entries.append((permute_point(dataset, psi, perm),
                                [(pattern, f"boundary({i},{new_ell})")]))
            for comp in outcome.components:
                if perm == tuple(range(dataset.L)):
                    components.append(comp)
                else:
                    polys = [permute_polynomial_units(dataset, p, perm)
                             for p in comp.basis]
                    basis = GroebnerBasis(
                        comp.basis.varset,
                        interreduce(polys, comp.basis.order),
                        comp.basis.order, reduced=True)
                    free = sorted(
                        permute_varnames(dataset, comp.free_variables, perm))
                    sample = comp.sample
                    tag = comp.provenance
                    if tag[0] == "boundary":
                        tag = ("boundary", tag[1], perm.index(tag[2]))
                    new_comp = Component(pattern, tag, basis, free, sample)
                    new_comp.sample = _permute_sample(dataset, sample, perm,
                                                      basis)
                    components.append(new_comp)

    merged = merge_and_dedup(entries)
    candidates = []
    for psi, prov in merged:
        cand = CandidatePoint(psi, [_rationalize(v) for v in psi], prov)
        lift_candidate(dataset, cand)
        key = ",".join(mpmath.nstr(v, 12) for v in cand.psi)
        cand.verdict = verify_local_minimality(
            dataset, cand.psi_rational, config.perturb_count,
            config.perturb_radius, derive_seed(config.seed, "minimality", key))
        candidates.append(cand)

    components.sort(key=lambda c: (c.pattern, c.provenance))
    unresolved.sort(key=lambda u: (u["pattern"], u["stage"]))

    for comp in components:
        comp.sample_verdicts = []
        for j, box in enumerate(comp.sample.boxes):
            psi_q = [_rationalize(v) for v in box.point(dataset.varset.names)]
            seed = derive_seed(config.seed, "component", comp.pattern,
                               comp.provenance, j)
            comp.sample_verdicts.append(verify_local_minimality(
                dataset, psi_q, config.perturb_count, config.perturb_radius,
                seed))

    metadata = {
        "seed": config.seed,
        "dedup_tolerance": "1e-9",
        "membership_tolerance": "1e-9",
        "residual_tolerance": "1e-20",
        "perturb_count": config.perturb_count,
        "perturb_radius": str(config.perturb_radius),
        "sample_count": config.sample_count,
        "sample_box": [str(config.sample_box[0]), str(config.sample_box[1])],
        "prune_symmetry": config.prune_symmetry,
        "display_precision": config.display_precision,
        "version": "0.1.0",
    }
    return EnumerationResult(dataset, candidates, components, unresolved,
                             metadata)


def permute_varnames(dataset, names, perm):
    """Rename unit-indexed variable names under a hidden-unit permutation."""
    out = []
    inverse = {perm[k]: k for k in range(dataset.L)}
    for name in names:
        if name.startswith("b_"):
            src = int(name[2:-1]) - 1
            out.append(f"b_{inverse[src] + 1}{name[-1]}")
        elif name.startswith("c_"):
            src = int(name[2:]) - 1
            out.append(f"c_{inverse[src] + 1}")
        else:
            out.append(name)
    return out


def _permute_sample(dataset, sample, perm, basis):
    from .realroots import RootBox, VarietySample
    names = dataset.varset.names
    boxes = []
    for box in sample.boxes:
        psi = box.point(names)
        new_psi = permute_point(dataset, psi, perm)
        values = dict(zip(names, new_psi))
        boxes.append(RootBox(box.varset, values, box.residual,
                             box.ill_conditioned))
    return VarietySample(basis, sample.free_variables, boxes,
                         sample.requested, sample.diagnostic)
