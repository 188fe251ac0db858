"""Bounded exhaustive enumeration of derivations, n-best and sentence probability.

Enumeration order is canonical: root tree name first, then sites in address
order, where each site's choices run through filler names alphabetically
(adjunction sequences by length, then element-wise), each filler's own
expansions following recursively.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .derivation import ADJ, SUB, DerivationTree, Edge, derive
from .grammar import Grammar
from .models import MissingContextError, score_derivation


@dataclass(frozen=True)
class SearchBounds:
    max_tree_uses: int
    max_adj_per_node: Optional[int] = None  # None = unlimited
    max_yield: Optional[int] = None

    def __post_init__(self):
        if self.max_tree_uses < 1:
            raise ValueError("max_tree_uses must be positive")
        if self.max_adj_per_node is not None and self.max_adj_per_node < 0:
            raise ValueError("max_adj_per_node must be >= 0")


class _Enumerator:
    def __init__(self, g: Grammar, bounds: SearchBounds):
        self.g, self.b = g, bounds
        self.memo = {}
        self.unlimited_yield = 10 ** 9 if bounds.max_yield is None else bounds.max_yield

    def expand(self, name, uses_left, yield_left):
        """All completions of ``name`` as (derivation, uses, yield length)."""
        key = (name, uses_left, yield_left)
        if key in self.memo:
            return self.memo[key]
        tree = self.g[name]
        out = []
        if uses_left >= 1 and tree.n_terminals <= yield_left:
            partials = [((), 1, tree.n_terminals)]
            subs, adjs = tree.sites
            sites = sorted([(a, l, SUB) for a, l in subs] + [(a, l, ADJ) for a, l in adjs])
            for addr, label, op in sites:
                nxt = []
                for edges, u, y in partials:
                    for more, du, dy in self.site_options(addr, label, op, uses_left - u, yield_left - y):
                        nxt.append((edges + more, u + du, y + dy))
                partials = nxt
                if not partials:
                    break
            out = [(DerivationTree(name, edges), u, y) for edges, u, y in partials]
        self.memo[key] = out
        return out

    def site_options(self, addr, label, op, uses_left, yield_left):
        if op == SUB:
            for child in self.g.initial_trees(label):
                for d, u, y in self.expand(child, uses_left, yield_left):
                    yield (Edge(addr, SUB, d),), u, y
            return
        level = [((), 0, 0)]
        k = 0
        while level:
            yield from level
            if self.b.max_adj_per_node is not None and k >= self.b.max_adj_per_node:
                return
            nxt = []
            for seq, u, y in level:
                for child in self.g.auxiliary_trees(label):
                    for d, du, dy in self.expand(child, uses_left - u, yield_left - y):
                        nxt.append((seq + (Edge(addr, ADJ, d),), u + du, y + dy))
            level, k = nxt, k + 1


def enumerate_derivations(g: Grammar, bounds: SearchBounds) -> Iterator[DerivationTree]:
    """Every valid complete derivation within ``bounds``, once, in canonical order."""
    e = _Enumerator(g, bounds)
    for root in g.initial_trees(g.start_symbol):
        for d, _, _ in e.expand(root, bounds.max_tree_uses, e.unlimited_yield):
            yield d


def _safe_score(params, g, d):
    try:
        return score_derivation(params, g, d)
    except MissingContextError:
        return -math.inf


def total_mass(params, g: Grammar, bounds: SearchBounds) -> float:
    return math.fsum(math.exp(_safe_score(params, g, d)) for d in enumerate_derivations(g, bounds))


def _with_yield(g, bounds, sentence):
    sentence = list(sentence)
    if bounds.max_yield is None or bounds.max_yield > len(sentence):
        bounds = SearchBounds(bounds.max_tree_uses, bounds.max_adj_per_node, max(len(sentence), 1))
    for d in enumerate_derivations(g, bounds):
        if derive(g, d).yield_() == sentence:
            yield d


def sentence_probability(params, g: Grammar, sentence, bounds: SearchBounds) -> float:
    """Sum of derivation probabilities over parses of ``sentence`` within bounds.

    Derivations that need a context the model lacks contribute nothing.
    """
    return math.fsum(math.exp(_safe_score(params, g, d)) for d in _with_yield(g, bounds, sentence))


def nbest(params, g: Grammar, sentence, k: int, bounds: SearchBounds) -> list:
    """Top ``k`` parses as (derivation, log-probability), best first; ties keep
    canonical enumeration order."""
    if k < 1:
        raise ValueError("k must be positive")
    scored = [(d, _safe_score(params, g, d)) for d in _with_yield(g, bounds, sentence)]
    scored.sort(key=lambda x: -x[1])  # stable
    return scored[:k]
