import math
import random
from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from slg import fixtures
from slg.derivation import derive, render_derivation, validate_derivation
from slg.grammar import parse_grammar
from slg.models import Slg1Params, score_derivation
from slg.search import (SearchBounds, enumerate_derivations, nbest, sentence_probability,
                        total_mass)

SENT = "John drives the car slowly".split()


def test_no_adjunction_count(g0):
    ds = list(enumerate_derivations(g0, SearchBounds(4, 0)))
    # alpha2/alpha2, alpha2/alpha3+delta, alpha3+delta/alpha2; alpha3/alpha3 needs 5 uses
    assert [render_derivation(d) for d in ds] == [
        "(alpha1 (1 sub (alpha2)) (2.2 sub (alpha2)))",
        "(alpha1 (1 sub (alpha2)) (2.2 sub (alpha3 (1 sub (delta)))))",
        "(alpha1 (1 sub (alpha3 (1 sub (delta)))) (2.2 sub (alpha2)))"]


def test_single_derivation_grammar():
    g = parse_grammar('tree t initial\n(S "x")\n')
    assert len(list(enumerate_derivations(g, SearchBounds(3, 0)))) == 1


def test_bounds_too_small(g0):
    assert list(enumerate_derivations(g0, SearchBounds(2))) == []


def test_enumerated_are_valid_and_distinct(g0):
    ds = list(enumerate_derivations(g0, SearchBounds(6)))
    assert len(set(ds)) == len(ds)
    assert all(validate_derivation(g0, d) == [] and d.size() <= 6 for d in ds)


def test_canonical_order_stable(g0):
    b = SearchBounds(5)
    assert list(enumerate_derivations(g0, b)) == list(enumerate_derivations(g0, b))


def _mul(a, b, n):
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= n:
                out[i + j] += x * y
    return out


def size_distribution(n):
    """P(derivation uses exactly k trees), k <= n, from generating functions.

    An NP is alpha2 (1 tree) or alpha3 + delta (2 trees), each 1/2.  The VP
    site draws beta with 1/5 until STOP; each beta brings its own VP site,
    so the site series solves v = (4/5) / (1 - (1/5) x v).
    """
    np_ = [0, Fraction(1, 2), Fraction(1, 2)] + [Fraction(0)] * n
    v = [Fraction(4, 5)] + [Fraction(0)] * n
    for _ in range(n + 1):
        xv = [Fraction(0)] + v[:n]
        # 1 / (1 - q) as a truncated geometric series
        q = [c / 5 for c in xv]
        inv, term = [Fraction(1)] + [Fraction(0)] * n, [Fraction(1)] + [Fraction(0)] * n
        for _ in range(n):
            term = _mul(term, q, n)
            inv = [a + b for a, b in zip(inv, term)]
        v = [c * Fraction(4, 5) for c in inv]
    total = _mul(_mul(np_[:n + 1], np_[:n + 1], n), v, n)
    return [Fraction(0)] + total[:n]  # the root tree shifts sizes by one


def test_mass_matches_generating_function(g0, p1):
    dist = size_distribution(10)
    for n in range(3, 9):
        assert total_mass(p1, g0, SearchBounds(n)) == pytest.approx(float(sum(dist[:n + 1])), abs=1e-12)
    assert float(sum(dist[:7])) == pytest.approx(0.962816, abs=1e-12)


def test_mass_monotone(g0, p1):
    masses = [total_mass(p1, g0, SearchBounds(n)) for n in range(1, 9)]
    assert all(a <= b for a, b in zip(masses, masses[1:]))
    assert masses[-1] <= 1 + 1e-9


def test_sentence_probability_unique_parse(g0, p1):
    b = SearchBounds(8)
    parses = [d for d, _ in nbest(p1, g0, SENT, 10, b)]
    assert parses == [fixtures.d2()]
    assert sentence_probability(p1, g0, SENT, b) == pytest.approx(0.032, rel=1e-12)


def test_oov_sentence(g0, p1):
    assert sentence_probability(p1, g0, ["Mary", "drives"], SearchBounds(6)) == 0


def test_partition(g0, p1):
    b = SearchBounds(6)
    by_yield = defaultdict(float)
    for d in enumerate_derivations(g0, b):
        by_yield[tuple(derive(g0, d).yield_())] += math.exp(score_derivation(p1, g0, d))
    total = math.fsum(sentence_probability(p1, g0, s, b) for s in by_yield)
    assert total == pytest.approx(total_mass(p1, g0, b), abs=1e-12)


def test_k_larger_than_parses(g0, p1):
    assert len(nbest(p1, g0, SENT, 50, SearchBounds(8))) == 1


def _ambiguous(p_a):
    g = parse_grammar(fixtures.G0_TEXT + 'tree alpha1b initial\n(S NP! (VP (V "drives") NP!))\n')
    p = fixtures.g0_params()
    p = Slg1Params(dists={**p.dists, ("S", "sub"): {"alpha1": p_a, "alpha1b": 1 - p_a}})
    return g, p


def test_ranking_flips_with_root_probabilities():
    sent = "John drives John".split()
    g, p = _ambiguous(0.7)
    assert [d.tree_name for d, _ in nbest(p, g, sent, 2, SearchBounds(4))] == ["alpha1", "alpha1b"]
    g, p = _ambiguous(0.3)
    assert [d.tree_name for d, _ in nbest(p, g, sent, 2, SearchBounds(4))] == ["alpha1b", "alpha1"]


def test_ties_keep_canonical_order():
    g, p = _ambiguous(0.5)
    ranked = nbest(p, g, "John drives John".split(), 2, SearchBounds(4))
    assert [d.tree_name for d, _ in ranked] == ["alpha1", "alpha1b"]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_grammar_properties(seed):
    rng = random.Random(seed)
    g = fixtures.random_grammar(rng, n_aux=(0, 2))
    p = fixtures.random_level1_params(rng, g)
    prev = 0.0
    for n in range(1, 5):
        b = SearchBounds(n, 1)
        ds = list(enumerate_derivations(g, b))
        assert len({render_derivation(d) for d in ds}) == len(ds)
        m = total_mass(p, g, b)
        assert prev - 1e-12 <= m <= 1 + 1e-9
        prev = m
    if ds:
        sent = derive(g, ds[0]).yield_()
        full = nbest(p, g, sent, 10 ** 6, SearchBounds(4, 1))
        for k in range(1, len(full) + 1):
            assert nbest(p, g, sent, k, SearchBounds(4, 1)) == full[:k]
