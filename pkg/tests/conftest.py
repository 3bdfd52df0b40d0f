"""Shared helpers for the test suite.

Reference polynomials transcribed from the published worked examples are
stored under ``tests/fixtures`` as one signed term per line, e.g.
``+48b_1^4c_1``.  ``load_fixture_polynomial`` parses such a file into a
:class:`reluminima.poly.Polynomial` over a given variable set; single-indexed
weight names like ``b_2`` map onto the package's ``b_21`` convention (all
fixtures have input dimension one).
"""

import os
import random
import re

import pytest
from gmpy2 import mpq

from reluminima.poly import GREVLEX, Polynomial

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

_FACTOR = re.compile(r"([bc])_(\d)(?:\^(\d+))?")
_TERM = re.compile(r"([+-])(\d*)((?:[bc]_\d(?:\^\d+)?)*)$")


def fixture_lines(name, corrections=()):
    """Signed term lines of a fixture file with optional corrections applied.

    Each correction is an exact ``(old_line, new_line)`` pair; the old line
    must occur exactly once so that a stale correction fails loudly.
    """
    with open(os.path.join(FIXTURES, name)) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    for old, new in corrections:
        assert lines.count(old) >= 1, f"correction target missing: {old}"
        lines[lines.index(old)] = new
    return lines


def parse_terms(term_lines, varset):
    """Signed term lines -> {exponent tuple: coefficient} over ``varset``."""
    index = {}
    for i, nm in enumerate(varset.names):
        index[nm] = i
        if nm.startswith("b_") and nm.endswith("1"):
            index[nm[:-1]] = i  # single-indexed alias b_2 -> b_21
    terms = {}
    for line in term_lines:
        m = _TERM.match(line)
        assert m, f"malformed fixture term: {line}"
        coeff = mpq(m.group(2) or 1)
        if m.group(1) == "-":
            coeff = -coeff
        expo = [0] * len(varset.names)
        for f in _FACTOR.finditer(m.group(3)):
            expo[index[f.group(1) + "_" + f.group(2)]] += int(f.group(3) or 1)
        key = tuple(expo)
        terms[key] = terms.get(key, mpq(0)) + coeff
    return {k: v for k, v in terms.items() if v != 0}


def load_fixture_polynomial(name, varset, corrections=()):
    return Polynomial(varset, parse_terms(fixture_lines(name, corrections), varset))


def proportional(a, b):
    """True when a == q*b for one nonzero rational q."""
    if not a.terms or not b.terms:
        return not a.terms and not b.terms
    ma, ca = a.leading_term(GREVLEX)
    mb, cb = b.leading_term(GREVLEX)
    if ma != mb:
        return False
    return a == b.scale(ca / cb)


@pytest.fixture
def rng():
    return random.Random(20240817)


def random_polynomial(rng, varset, max_terms=5, max_degree=3, coeff_bound=9):
    terms = {}
    n = len(varset.names)
    for _ in range(rng.randint(1, max_terms)):
        expo = [0] * n
        for _ in range(rng.randint(0, max_degree)):
            expo[rng.randrange(n)] += 1
        c = mpq(rng.randint(-coeff_bound, coeff_bound), rng.randint(1, 4))
        if c:
            key = tuple(expo)
            terms[key] = terms.get(key, mpq(0)) + c
    return Polynomial(varset, {k: v for k, v in terms.items() if v != 0})
