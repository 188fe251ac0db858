"""Small grammars, corpora and parameter sets shared by tests, scripts and docs.

G0 is the four-tree example grammar (a transitive verb tree, two NP trees
and a VP-modifier auxiliary tree) plus a determiner tree so that every
substitution site can be filled.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .derivation import ADJ, SUB, DerivationTree, derivation, parse_derivation
from .grammar import AUXILIARY, INITIAL, STOP, ElementaryTree, Grammar, TreeNode, parse_grammar
from .grammar import FOOT, INTERIOR, SUBST, TERMINAL
from .models import Slg1Params, Slg2Params, Slg3Params

G0_TEXT = """\
# example grammar
start S
tree alpha1 initial
(S NP! (VP (V "drives") NP!))
tree alpha2 initial
(NP (N "John"))
tree alpha3 initial
(NP Det! (N "car"))
tree beta auxiliary
(VP VP* (Adj "slowly"))
tree delta initial
(Det "the")
"""

CORPUS_TEXT = """\
D1 (alpha1 (1 sub (alpha2)) (2.2 sub (alpha3 (1 sub (delta)))))
D2 (alpha1 (1 sub (alpha2)) (2 adj (beta)) (2.2 sub (alpha3 (1 sub (delta)))))
D3 (alpha1 (1 sub (alpha3 (1 sub (delta)))) (2.2 sub (alpha2)))
"""


def g0() -> Grammar:
    return parse_grammar(G0_TEXT)


def d1() -> DerivationTree:
    return parse_derivation("(alpha1 (1 sub (alpha2)) (2.2 sub (alpha3 (1 sub (delta)))))")


def d2() -> DerivationTree:
    return parse_derivation("(alpha1 (1 sub (alpha2)) (2 adj (beta)) (2.2 sub (alpha3 (1 sub (delta)))))")


def d3() -> DerivationTree:
    return parse_derivation("(alpha1 (1 sub (alpha3 (1 sub (delta)))) (2.2 sub (alpha2)))")


def g0_params(exact=False) -> Slg1Params:
    """Hand-set level-1 parameters; these equal the estimate on {D1, D2, D3}."""
    F = Fraction if exact else (lambda a, b=1: a / b)
    return Slg1Params(
        sub={"S": {"alpha1": F(1)}, "NP": {"alpha2": F(1, 2), "alpha3": F(1, 2)},
             "Det": {"delta": F(1)}},
        adj={"VP": {"beta": F(1, 5), STOP: F(4, 5)}, "S": {STOP: F(1)}, "V": {STOP: F(1)},
             "NP": {STOP: F(1)}, "N": {STOP: F(1)}, "Adj": {STOP: F(1)}, "Det": {STOP: F(1)}})


def g0_level2_params() -> Slg2Params:
    """Subcritical level-2 parameters with a subject/object asymmetry."""
    stops = {}
    g = g0()
    for name, t in g.trees.items():
        for addr, _ in t.sites[1]:
            stops[(name, addr)] = {STOP: 1.0}
    stops[("alpha1", (2,))] = {"beta": 0.3, STOP: 0.7}
    stops[("beta", ())] = {"beta": 0.1, STOP: 0.9}
    return Slg2Params(
        sub={("alpha1", (1,)): {"alpha2": 0.7, "alpha3": 0.3},
             ("alpha1", (2, 2)): {"alpha2": 0.2, "alpha3": 0.8},
             ("alpha3", (1,)): {"delta": 1.0}},
        adj=stops, root={"alpha1": 1.0})


# -- subject/object coupling -----------------------------------------------------

COUPLING_TEXT = """\
start S
tree tv initial family=transitive
(S NP! (VP (V "sees") NP!))
tree pron initial family=pronoun
(NP (Pro "he"))
tree name initial family=propername
(NP (PN "John"))
"""


def coupling_grammar() -> Grammar:
    return parse_grammar(COUPLING_TEXT)


def coupled_params(strength=0.8) -> Slg3Params:
    """Level-3 model where subject and object tend to share their NP type.

    ``strength`` is the mass on matching (pron/pron, name/name) expansions.
    """
    from .derivation import MetaProduction
    mp = lambda s, o: MetaProduction("tv", (((1,), s), ((2, 2), o)))
    half, rest = strength / 2, (1 - strength) / 2
    expand = {"tv": {mp("pron", "pron"): half, mp("name", "name"): half,
                     mp("pron", "name"): rest, mp("name", "pron"): rest},
              "pron": {MetaProduction("pron"): 1.0},
              "name": {MetaProduction("name"): 1.0}}
    return Slg3Params(expand=expand, root={"tv": 1.0})


def independent_params(p_pron_subject=0.5, p_pron_object=0.5) -> Slg2Params:
    g = coupling_grammar()
    adj = {(n, a): {STOP: 1.0} for n, t in g.trees.items() for a, _ in t.sites[1]}
    return Slg2Params(
        sub={("tv", (1,)): {"pron": p_pron_subject, "name": 1 - p_pron_subject},
             ("tv", (2, 2)): {"pron": p_pron_object, "name": 1 - p_pron_object}},
        adj=adj, root={"tv": 1.0})


# -- modifier ordering ------------------------------------------------------------------

ORDERING_TEXT = """\
start S
tree rose initial
(S NP! (VP (V "rose")))
tree it initial
(NP (Pro "it"))
tree mnr auxiliary
(VP VP* (PP (P "sharply")))
tree tmp auxiliary
(VP VP* (PP (P "yesterday")))
"""


def ordering_grammar() -> Grammar:
    return parse_grammar(ORDERING_TEXT)


def ordered_pair(first, second) -> DerivationTree:
    return derivation("rose", ("1", SUB, "it"), ("2", ADJ, first), ("2", ADJ, second))


# -- random instances for property tests -------------------------------------------------

_LABELS = ("S", "A", "B", "C")


def random_grammar(rng: random.Random, n_initial=(2, 5), n_aux=(0, 3)) -> Grammar:
    """A small random grammar in which every substitution site is fillable."""
    trees = {}
    labels = list(_LABELS[:rng.randint(2, len(_LABELS))])
    count = [0]

    def word():
        count[0] += 1
        return "w%d" % count[0]

    def subtree(label, depth, foot_label=None):
        kids = []
        n = rng.randint(1, 3)
        foot_at = rng.randrange(n) if foot_label else None
        for i in range(n):
            if i == foot_at:
                kids.append(TreeNode(foot_label, FOOT))
                continue
            r = rng.random()
            if r < 0.35:
                kids.append(TreeNode(word(), TERMINAL))
            elif r < 0.65:
                kids.append(TreeNode(rng.choice(labels), SUBST))
            elif depth > 0:
                kids.append(subtree(rng.choice(labels), depth - 1))
            else:
                kids.append(TreeNode(word(), TERMINAL))
        return TreeNode(label, INTERIOR, rng.random() < 0.85, tuple(kids))

    roots = ["S"] + [rng.choice(labels) for _ in range(rng.randint(*n_initial) - 1)]
    for label in labels:
        if label not in roots:
            roots.append(label)
    for i, label in enumerate(roots):
        root = subtree(label, 2)
        root = TreeNode(root.label, INTERIOR, root.adjoinable,
                        root.children + (TreeNode(word(), TERMINAL),))
        trees["a%d" % i] = ElementaryTree("a%d" % i, INITIAL, root)
    for i in range(rng.randint(*n_aux)):
        label = rng.choice(labels)
        root = subtree(label, 1, foot_label=label)
        trees["b%d" % i] = ElementaryTree("b%d" % i, AUXILIARY, root)
    return Grammar(trees, "S")


def _simplex(rng, n):
    w = [rng.random() + 0.05 for _ in range(n)]
    s = sum(w)
    return [x / s for x in w]


def random_level1_params(rng: random.Random, g: Grammar, min_stop=0.6) -> Slg1Params:
    sub, adj = {}, {}
    for label in sorted(g.labels):
        names = g.initial_trees(label)
        if names:
            sub[label] = dict(zip(names, _simplex(rng, len(names))))
        aux = g.auxiliary_trees(label)
        stop = min_stop + (1 - min_stop) * rng.random()
        if aux:
            adj[label] = {n: (1 - stop) * w for n, w in zip(aux, _simplex(rng, len(aux)))}
            adj[label][STOP] = stop
        else:
            adj[label] = {STOP: 1.0}
    return Slg1Params(sub=sub, adj=adj)


def random_level2_params(rng: random.Random, g: Grammar, min_stop=0.6) -> Slg2Params:
    sub, adj = {}, {}
    for name in sorted(g.trees):
        subs, adjs = g[name].sites
        for addr, label in subs:
            names = g.initial_trees(label)
            sub[(name, addr)] = dict(zip(names, _simplex(rng, len(names))))
        for addr, label in adjs:
            aux = g.auxiliary_trees(label)
            stop = min_stop + (1 - min_stop) * rng.random()
            d = {n: (1 - stop) * w for n, w in zip(aux, _simplex(rng, len(aux)))} if aux else {}
            d[STOP] = stop if aux else 1.0
            adj[(name, addr)] = d
    roots = g.initial_trees(g.start_symbol)
    return Slg2Params(sub=sub, adj=adj, root=dict(zip(roots, _simplex(rng, len(roots)))))
