import random

import pytest
from hypothesis import given, settings, strategies as st

from slg import fixtures
from slg.grammar import (AUXILIARY, FOOT, INITIAL, INTERIOR, SUBST, TERMINAL, AddressError,
                         ElementaryTree, Grammar, GrammarError, format_address, interior,
                         node_at, parse_address, parse_grammar, render_grammar, sites_of,
                         terminal, validate_grammar)


def test_initial_tree_anchor(g0):
    t = g0["alpha2"]
    assert t.kind == INITIAL and t.label == "NP"
    assert t.anchor == "John"
    assert t.anchor_address == (1, 1)


def test_auxiliary_foot(g0):
    b = g0["beta"]
    assert b.kind == AUXILIARY
    assert b.foot_address == (1,)
    assert node_at(b, (1,)).kind == FOOT


def test_auxiliary_without_foot_rejected():
    with pytest.raises(GrammarError, match="foot"):
        parse_grammar('tree bad auxiliary\n(VP (Adj "x"))\n')


def test_foot_label_must_match_root():
    with pytest.raises(GrammarError):
        parse_grammar('tree bad auxiliary\n(VP NP* (Adj "x"))\n')


def test_duplicate_tree_name():
    with pytest.raises(GrammarError, match="duplicate"):
        parse_grammar('tree a initial\n(S "x")\ntree a initial\n(S "y")\n')


def test_syntax_error_has_position():
    with pytest.raises(GrammarError) as e:
        parse_grammar('tree a initial\n(S (NP "x")\n')
    assert e.value.line is not None


def test_node_at(g0):
    assert node_at(g0["alpha1"], ()).label == "S"
    n = node_at(g0["alpha1"], (2, 2))
    assert (n.label, n.kind) == ("NP", SUBST)
    with pytest.raises(AddressError):
        node_at(g0["alpha2"], (3,))


def test_sites(g0):
    subs, adjs = sites_of(g0["alpha1"])
    assert subs == [((1,), "NP"), ((2, 2), "NP")]
    assert ((2,), "VP") in adjs
    assert adjs == [((), "S"), ((2,), "VP"), ((2, 1), "V")]
    assert sites_of(g0["alpha2"]) == ([], [((), "NP"), ((1,), "N")])


def test_terminal_only_tree_has_root_site():
    g = parse_grammar('tree t initial\n(S "x")\n')
    assert sites_of(g["t"]) == ([], [((), "S")])


def test_null_adjunction_marker():
    g = parse_grammar('tree t initial\n(S^na (VP^na (V "x")))\n')
    assert sites_of(g["t"]) == ([], [((1, 1), "V")])


def test_validate_fixture_clean(g0):
    assert validate_grammar(g0) == []


def test_validate_unfillable_det():
    g = parse_grammar(fixtures.G0_TEXT.replace('tree delta initial\n(Det "the")\n', ""))
    vs = validate_grammar(g)
    assert [v.severity for v in vs] == ["warning"]
    assert "Det" in vs[0].message


def test_validate_empty_grammar():
    vs = validate_grammar(Grammar({}, "S"))
    assert any("start symbol" in v.message for v in vs)


def test_start_header():
    g = parse_grammar('start X\ntree t initial\n(X "x")\n')
    assert g.start_symbol == "X"


def test_addresses():
    assert format_address(()) == "eps"
    assert parse_address("2.2") == (2, 2)
    assert parse_address("eps") == ()
    with pytest.raises(ValueError):
        parse_address("0.1")


def test_shared_template():
    g = parse_grammar(fixtures.G0_TEXT + 'tree alpha4 initial\n(NP (N "Mary"))\n')
    assert g["alpha4"].template == g["alpha2"].template
    assert g["alpha3"].template != g["alpha2"].template
    assert sorted(g.template_members(g["alpha2"].template)) == ["alpha2", "alpha4"]


def test_inconsistent_explicit_template():
    g = parse_grammar('tree a initial template=T\n(S "x")\ntree b initial template=T\n(S (A "y"))\n')
    assert any(v.severity == "error" for v in validate_grammar(g))


def test_round_trip_fixture(g0):
    assert parse_grammar(render_grammar(g0)) == g0


def test_helpers_build_same_tree(g0):
    t = ElementaryTree("x", INITIAL, interior("NP", interior("N", terminal("John"))))
    assert t.root == g0["alpha2"].root


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip_random(seed):
    g = fixtures.random_grammar(random.Random(seed))
    assert parse_grammar(render_grammar(g)) == g


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sites_consistent_and_ordered(seed):
    g = fixtures.random_grammar(random.Random(seed))
    for t in g.trees.values():
        subs, adjs = sites_of(t)
        for addr, label in subs + adjs:
            assert node_at(t, addr).label == label
        for seq in (subs, adjs):
            addrs = [a for a, _ in seq]
            assert all(a < b for a, b in zip(addrs, addrs[1:]))
        for addr, _ in adjs:
            n = node_at(t, addr)
            assert n.kind == INTERIOR and n.adjoinable
        for addr, _ in subs:
            assert node_at(t, addr).kind == SUBST
        assert all(node_at(t, a).kind != TERMINAL for a, _ in adjs)
