"""Relative-frequency estimation, DOP fragments and generative sampling."""
from __future__ import annotations

import random
from collections import Counter, defaultdict
from fractions import Fraction

from .derivation import (ADJ, ROOT, SUB, DerivationTree, DerivedTree, Edge,
                         extract_events, root_context, validate_derivation)
from .grammar import INTERIOR, STOP, SUBST, Grammar, TreeNode
from .models import InducedSlg3, Slg1Params, Slg2Params, Slg3Params, Slg4Params

DEFAULT_MAX_DEPTH = 4
DEFAULT_MAX_FRAGMENTS = 10 ** 6


class InvalidCorpusError(ValueError):
    def __init__(self, index, violations):
        self.index, self.violations = index, violations
        super().__init__("corpus entry %d is invalid: %s" % (index, violations[0]))


class EstimationError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class FragmentBlowup(RuntimeError):
    pass


def check_corpus(g: Grammar, corpus) -> None:
    for i, d in enumerate(corpus):
        errors = [v for v in validate_derivation(g, d) if v.severity == "error"]
        if errors:
            raise InvalidCorpusError(i, errors)


def count_events(g: Grammar, corpus, level: int) -> Counter:
    """(context, outcome) counts.  Counters from corpus shards can simply be
    added: the reduction is commutative."""
    counts = Counter()
    for d in corpus:
        if level == 3:
            counts[(ROOT, d.tree_name)] += 1
        for e in extract_events(g, d, level):
            counts[(e.context, e.outcome)] += 1
    return counts


def normalize(counts: Counter, exact=False) -> dict:
    """Context -> {outcome: relative frequency}."""
    totals = Counter()
    for (ctx, _), n in counts.items():
        totals[ctx] += n
    dists = defaultdict(dict)
    for (ctx, outcome), n in counts.items():
        dists[ctx][outcome] = Fraction(n, totals[ctx]) if exact else n / totals[ctx]
    return dict(dists)


def params_from_counts(counts: Counter, level: int, exact=False):
    cls = {1: Slg1Params, 2: Slg2Params, 3: Slg3Params}[level]
    return cls(dists=normalize(counts, exact))


def estimate(g: Grammar, corpus, level: int, exact=False):
    """Direct relative-frequency estimate of a level 1-3 model."""
    corpus = list(corpus)
    if not corpus:
        raise EstimationError("nothing to estimate: empty corpus")
    if level not in (1, 2, 3):
        raise ValueError("estimate handles levels 1-3; use estimate_dop for level 4")
    check_corpus(g, corpus)
    return params_from_counts(count_events(g, corpus, level), level, exact)


# -- DOP fragments -----------------------------------------------------------------

def _n_fragments(node, depth):
    """Number of fragments rooted at ``node`` with depth <= ``depth``."""
    if node.kind != INTERIOR or (depth is not None and depth < 1):
        return 0
    total = 1
    for c in node.children:
        if c.kind == INTERIOR:
            total *= 1 + _n_fragments(c, None if depth is None else depth - 1)
    return total


def _fragments_at(node, depth):
    if node.kind != INTERIOR or (depth is not None and depth < 1):
        return []
    sub_depth = None if depth is None else depth - 1
    options = []
    for c in node.children:
        if c.kind == INTERIOR:
            options.append([TreeNode(c.label, SUBST)] + _fragments_at(c, sub_depth))
        else:
            options.append([c])
    out = [()]
    for opts in options:
        out = [prefix + (o,) for prefix in out for o in opts]
    return [TreeNode(node.label, INTERIOR, True, kids) for kids in out]


def extract_fragments(trees, max_depth=DEFAULT_MAX_DEPTH, max_fragments=DEFAULT_MAX_FRAGMENTS) -> Counter:
    """Every fragment of depth <= ``max_depth`` (None = unbounded), counted
    once per occurrence.  Cuts happen only at nonterminal nodes."""
    counts = Counter()
    for i, t in enumerate(trees):
        root = t.root if isinstance(t, DerivedTree) else t
        n = sum(_n_fragments(node, max_depth) for _, node in root.walk())
        if max_fragments is not None and n > max_fragments:
            raise FragmentBlowup("tree %d has %d fragments (limit %d)" % (i, n, max_fragments))
        for _, node in root.walk():
            counts.update(_fragments_at(node, max_depth))
    return counts


def estimate_dop(trees, max_depth=DEFAULT_MAX_DEPTH, exact=False,
                 max_fragments=DEFAULT_MAX_FRAGMENTS) -> Slg4Params:
    trees = list(trees)
    if not trees:
        raise EstimationError("nothing to estimate: empty tree corpus")
    counts = extract_fragments(trees, max_depth, max_fragments)
    totals = Counter()
    for f, n in counts.items():
        totals[f.label] += n
    if exact:
        return Slg4Params({f: Fraction(n, totals[f.label]) for f, n in counts.items()})
    return Slg4Params({f: n / totals[f.label] for f, n in counts.items()})


# -- sampling -------------------------------------------------------------------------

def _draw(rng, dist, what):
    if not dist:
        raise EstimationError("cannot sample %s: empty distribution" % (what,))
    items = sorted(dist.items(), key=lambda kv: str(kv[0]))
    r = rng.random() * float(sum(p for _, p in items))
    acc = 0.0
    for outcome, p in items:
        acc += float(p)
        if r < acc:
            return outcome
    return next(o for o, p in reversed(items) if p > 0)


def sample_derivation(params, g: Grammar, seed: int, max_nodes: int = 500) -> DerivationTree:
    """Draw one complete derivation from the model's generative process.

    Raises :class:`BudgetExceeded` once more than ``max_nodes`` trees are used.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    level = params.level
    if isinstance(params, InducedSlg3):
        params, level = params.base, 2
    used = [0]

    def dist_for(ctx):
        d = params.distribution(ctx)
        if d is None:
            raise EstimationError("model has no distribution for %s" % (ctx,))
        return d

    def grow(name):
        used[0] += 1
        if used[0] > max_nodes:
            raise BudgetExceeded("derivation exceeded %d tree uses" % max_nodes)
        host = g[name]
        subs, adjs = host.sites
        edges = []
        if level == 3:
            m = _draw(rng, dist_for(name), name)
            for addr, child in m.subs:
                edges.append(Edge(addr, SUB, grow(child)))
            for addr, children in m.adjs:
                edges.extend(Edge(addr, ADJ, grow(c)) for c in children)
            return DerivationTree(name, tuple(edges))
        sites = sorted([(a, l, SUB) for a, l in subs] + [(a, l, ADJ) for a, l in adjs])
        for addr, label, op in sites:
            ctx = (label, op) if level == 1 else (name, addr, op)
            if op == SUB:
                edges.append(Edge(addr, SUB, grow(_draw(rng, dist_for(ctx), ctx))))
                continue
            while True:
                choice = _draw(rng, dist_for(ctx), ctx)
                if choice == STOP:
                    break
                edges.append(Edge(addr, ADJ, grow(choice)))
                if used[0] > max_nodes:
                    raise BudgetExceeded("derivation exceeded %d tree uses" % max_nodes)
        return DerivationTree(name, tuple(edges))

    return grow(_draw(rng, dist_for(root_context(g, level)), "root"))


def sample_corpus(params, g: Grammar, n: int, seed: int, max_nodes: int = 500, skip_overflow=False) -> list:
    """``n`` derivations from one seeded generator."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        try:
            out.append(sample_derivation(params, g, rng, max_nodes))
        except BudgetExceeded:
            if not skip_overflow:
                raise
    return out
