import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from slg import fixtures
from slg.derivation import ADJ, ROOT, SUB, MetaProduction, derive, extract_events
from slg.estimation import BudgetExceeded, estimate, sample_corpus, sample_derivation
from slg.grammar import STOP, parse_tree_text
from slg.models import (IllFormedError, InducedSlg3, MissingContextError, ParamsSyntaxError,
                        Slg1Params, Slg2Params, Slg4Params, check_well_formed,
                        derivation_probability, lift, parse_params, render_params,
                        score_derivation, score_derived_tree_dop)


def _errors(params, g=None):
    return [v for v in check_well_formed(params, g) if v.severity == "error"]


def test_well_formed_examples(g0):
    ok = Slg1Params(sub={"NP": {"alpha2": 0.6, "alpha3": 0.4}}, adj={"VP": {"beta": 0.2, STOP: 0.8}})
    assert _errors(ok, g0) == []
    bad = Slg1Params(sub={"NP": {"alpha2": 0.6, "alpha3": 0.3}})
    (v,) = _errors(bad, g0)
    assert "NP/sub" in v.message and "0.9" in v.message


def test_fixture_params_well_formed(g0, p1):
    assert check_well_formed(p1, g0) == []
    assert check_well_formed(fixtures.g0_level2_params(), g0) == []


def test_score_fixture(g0, p1):
    assert math.exp(score_derivation(p1, g0, fixtures.d2())) == pytest.approx(0.032, rel=1e-12)
    assert math.exp(score_derivation(p1, g0, fixtures.d1())) == pytest.approx(0.2, rel=1e-12)


def test_exact_probability(g0):
    p = fixtures.g0_params(exact=True)
    assert derivation_probability(p, g0, fixtures.d2()) == Fraction(4, 125)
    assert derivation_probability(p, g0, fixtures.d1()) == Fraction(1, 5)


def test_zero_probability_is_minus_inf(g0):
    p = fixtures.g0_params()
    p = Slg1Params(dists={**p.dists, ("VP", ADJ): {STOP: 1.0}})
    assert score_derivation(p, g0, fixtures.d2()) == -math.inf


def test_missing_context_raises(g0):
    p = Slg1Params(sub={"S": {"alpha1": 1.0}})
    with pytest.raises(MissingContextError):
        score_derivation(p, g0, fixtures.d1())


def test_level3_unseen_expansion_raises(g0, corpus3):
    p3 = estimate(g0, corpus3[:1], 3)
    with pytest.raises(MissingContextError):
        score_derivation(p3, g0, fixtures.d2())


def test_level3_scores_root_event(g0, corpus3):
    p3 = estimate(g0, corpus3, 3)
    assert math.exp(score_derivation(p3, g0, fixtures.d2())) == pytest.approx(1 / 3)


# -- DOP -------------------------------------------------------------------

def test_dop_absent_label_scores_zero():
    frag = parse_tree_text('(S (A "a") (B "b"))')
    p = Slg4Params({frag: 1.0})
    assert score_derived_tree_dop(p, parse_tree_text('(S (C "c"))')) == 0


def test_dop_full_tree_fragment():
    t = parse_tree_text('(S (A "a") (B "b"))')
    assert score_derived_tree_dop(Slg4Params({t: 1.0}), t) == 1


def test_dop_hand_sum():
    t = parse_tree_text('(S (A "a") (B "b"))')
    frags = [parse_tree_text(s) for s in ('(S A! B!)', '(S (A "a") B!)', '(S A! (B "b"))',
                                          '(S (A "a") (B "b"))')]
    p = Slg4Params({**{f: Fraction(1, 4) for f in frags},
                    parse_tree_text('(A "a")'): Fraction(1), parse_tree_text('(B "b")'): Fraction(1)})
    assert score_derived_tree_dop(p, t) == 1


def test_dop_well_formedness():
    frags = {parse_tree_text('(S A! B!)'): 0.5, parse_tree_text('(S (A "a") B!)'): 0.25}
    assert len(check_well_formed(Slg4Params(frags))) == 1


# -- lifting -----------------------------------------------------------------

def test_lift_copies_label_distribution(g0, p1):
    p2 = lift(p1, g0)
    assert p2.level == 2
    assert p2.prob(("alpha1", (1,), SUB), "alpha2") == 0.5
    assert p2.prob(("alpha1", (2, 2), SUB), "alpha2") == 0.5
    assert p2.prob((ROOT, (), SUB), "alpha1") == 1
    assert check_well_formed(p2, g0) == []


def test_lift_scores_equal(g0, p1, corpus3):
    p2 = lift(p1, g0)
    for d in corpus3:
        assert score_derivation(p2, g0, d) == pytest.approx(score_derivation(p1, g0, d), abs=1e-12)


def test_lift_level2_fixture_to_level3(g0):
    p2 = fixtures.g0_level2_params()
    p3 = lift(p2, g0)
    assert isinstance(p3, InducedSlg3)
    d2 = fixtures.d2()
    assert score_derivation(p3, g0, d2) == pytest.approx(score_derivation(p2, g0, d2), abs=1e-12)


def test_lift_rejects_ill_formed(g0):
    with pytest.raises(IllFormedError):
        lift(Slg1Params(sub={"NP": {"alpha2": 0.2}}), g0)


def test_induced_level3_rejects_foreign_expansions(g0):
    p3 = InducedSlg3(fixtures.g0_level2_params(), g0)
    assert p3.prob("alpha1", MetaProduction("alpha1", (((1,), "alpha2"),))) == 0
    assert p3.prob("alpha1", MetaProduction("alpha2")) == 0


def test_level2_position_asymmetry(g0):
    # level-1 projection of the subject/object choices is uniform, the sites are not
    p2 = Slg2Params(sub={("alpha1", (1,)): {"alpha2": 0.8, "alpha3": 0.2},
                         ("alpha1", (2, 2)): {"alpha2": 0.2, "alpha3": 0.8}})
    pooled = {}
    for ctx in (("alpha1", (1,), SUB), ("alpha1", (2, 2), SUB)):
        for o, p in p2.dists[ctx].items():
            pooled[o] = pooled.get(o, 0) + p / 2
    assert pooled == pytest.approx({"alpha2": 0.5, "alpha3": 0.5})
    assert p2.dists[("alpha1", (1,), SUB)] != p2.dists[("alpha1", (2, 2), SUB)]


def test_level3_coupling_beats_own_level2_factorization():
    g = fixtures.coupling_grammar()
    p3 = fixtures.coupled_params(strength=1.0)
    corpus = sample_corpus(p3, g, 200, seed=3)
    p2 = estimate(g, corpus, 2)
    ll3 = math.fsum(score_derivation(p3, g, d) for d in corpus)
    ll2 = math.fsum(score_derivation(p2, g, d) for d in corpus)
    assert ll3 > ll2 + 1


def _random_triple(seed, level):
    rng = random.Random(seed)
    g = fixtures.random_grammar(rng)
    p = (fixtures.random_level1_params if level == 1 else fixtures.random_level2_params)(rng, g)
    for _ in range(20):
        try:
            return g, p, sample_derivation(p, g, rng, max_nodes=40)
        except BudgetExceeded:
            pass
    return g, p, None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]))
def test_lift_equivalence_property(seed, level):
    g, p, d = _random_triple(seed, level)
    if d is None:
        return
    assert abs(score_derivation(lift(p, g), g, d) - score_derivation(p, g, d)) <= 1e-12


# -- parameter files -------------------------------------------------------------

def test_params_file_round_trip_exact(g0, corpus3):
    for level in (1, 2, 3):
        p = estimate(g0, corpus3, level, exact=True)
        assert parse_params(render_params(p)) == p


def test_params_file_round_trip_float(g0, corpus3):
    for level in (1, 2, 3):
        p = estimate(g0, corpus3, level)
        text = render_params(p)
        q = parse_params(text)
        assert render_params(q) == text
        for d in corpus3:
            assert score_derivation(q, g0, d) == pytest.approx(score_derivation(p, g0, d), rel=1e-11)


def test_params_file_level4():
    p = Slg4Params({parse_tree_text('(S A! (B "b"))'): 0.25, parse_tree_text('(A "a")'): 1.0})
    assert parse_params(render_params(p)) == p


def test_params_file_records():
    p = parse_params("slg1 sub NP alpha2 0.5\nslg1 sub NP alpha3 1/2\nslg1 adj VP STOP 0.8\n")
    assert p.sub["NP"] == {"alpha2": 0.5, "alpha3": Fraction(1, 2)}
    p2 = parse_params("slg2 sub alpha1 2.2 alpha3 0.5\nslg2 root alpha1 1.0\n")
    assert p2.dists[("alpha1", (2, 2), SUB)] == {"alpha3": 0.5}
    assert p2.root == {"alpha1": 1.0}
    p3 = parse_params("slg3 expand alpha1 {1>alpha2; 2.2>alpha3; 2>[beta]} 0.7\n")
    (m,) = p3.expand["alpha1"]
    assert m.adjunctions_at((2,)) == ("beta",)


@pytest.mark.parametrize("text", [
    "slg1 sub NP alpha2", "slg1 sub NP alpha2 x", "slg5 sub NP a 1",
    "slg1 sub NP a 1\nslg2 root a 1", "slg3 expand a 1>b 1"])
def test_params_file_errors(text):
    with pytest.raises(ParamsSyntaxError):
        parse_params(text)


def test_events_match_score(g0, p1):
    d = fixtures.d2()
    lp = math.fsum(math.log(p1.prob(e.context, e.outcome)) for e in extract_events(g0, d, 1))
    assert lp == score_derivation(p1, g0, d)
    assert derive(g0, d).is_complete
