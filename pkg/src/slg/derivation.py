"""Derivation trees, derived trees, meta-productions and event extraction.

Derivation corpus format: one derivation per line, optionally preceded by an
identifier::

    D2 (alpha1 (1 sub (alpha2)) (2 adj (beta)) (2.2 sub (alpha3 (1 sub (delta)))))

Addresses are dotted integers or ``eps``; ``op`` is ``sub`` or ``adj``.  For
several adjunctions at one address, file order is surface order (first =
outermost).
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .grammar import (AUXILIARY, FOOT, INITIAL, INTERIOR, STOP, SUBST, TERMINAL,
                      AddressError, Grammar, TreeNode, Violation, format_address,
                      node_at, parse_address, render_node)

SUB = "sub"
ADJ = "adj"

ROOT = "<start>"  # host name of the virtual start site


class UnknownTreeError(KeyError):
    pass


class DerivationSyntaxError(ValueError):
    pass


class Edge(NamedTuple):
    addr: tuple
    op: str
    child: "DerivationTree"


@dataclass(frozen=True)
class DerivationTree:
    tree_name: str
    edges: tuple = ()

    def __post_init__(self):
        edges = tuple(Edge(tuple(e[0]), e[1], e[2]) for e in self.edges)
        # stable: same-address adjunctions keep their surface order
        object.__setattr__(self, "edges", tuple(sorted(edges, key=lambda e: e.addr)))

    def nodes(self):
        """Pre-order iterator over derivation-tree nodes."""
        yield self
        for e in self.edges:
            yield from e.child.nodes()

    def size(self) -> int:
        return 1 + sum(e.child.size() for e in self.edges)

    def adjunctions_at(self, addr) -> list:
        return [e.child for e in self.edges if e.addr == addr and e.op == ADJ]

    def substitution_at(self, addr) -> Optional["DerivationTree"]:
        for e in self.edges:
            if e.addr == addr and e.op == SUB:
                return e.child
        return None

    def __str__(self):
        return render_derivation(self)


def derivation(name, *edges) -> DerivationTree:
    """Shorthand: ``derivation('a1', ('1', 'sub', d), ...)``; addresses may be strings."""
    out = []
    for addr, op, child in edges:
        if isinstance(addr, str):
            addr = parse_address(addr)
        if isinstance(child, str):
            child = DerivationTree(child)
        out.append(Edge(addr, op, child))
    return DerivationTree(name, tuple(out))


# -- derived trees -----------------------------------------------------------

@dataclass(frozen=True)
class DerivedTree:
    root: TreeNode

    @property
    def is_complete(self) -> bool:
        return all(n.kind == TERMINAL for n in self.root.frontier())

    def yield_(self) -> list:
        return self.root.leaves()

    def __str__(self):
        return render_node(self.root)


def validate_derivation(g: Grammar, d: DerivationTree) -> list:
    for node in d.nodes():
        if node.tree_name not in g.trees:
            raise UnknownTreeError(node.tree_name)
    out = []
    root = g[d.tree_name]
    if root.kind != INITIAL:
        out.append(Violation("error", "derivation root %s is not an initial tree" % d.tree_name))
    elif root.label != g.start_symbol:
        out.append(Violation("error", "derivation root %s is not rooted in the start symbol %s"
                             % (d.tree_name, g.start_symbol)))
    for node in d.nodes():
        out.extend(_check_node(g, node))
    return out


def _check_node(g, node):
    host = g[node.tree_name]
    out = []
    where = lambda e: "%s@%s" % (host.name, format_address(e.addr))
    filled = Counter()
    for e in node.edges:
        try:
            site = node_at(host, e.addr)
        except AddressError:
            out.append(Violation("error", "%s: no such node" % where(e)))
            continue
        child = g[e.child.tree_name]
        if e.op == SUB:
            filled[e.addr] += 1
            if site.kind != SUBST:
                out.append(Violation("error", "%s: substitution at a non-substitution node" % where(e)))
            if child.kind != INITIAL:
                out.append(Violation("error", "%s: auxiliary tree %s used with substitution" % (where(e), child.name)))
        elif e.op == ADJ:
            if not (site.kind == INTERIOR and site.adjoinable):
                out.append(Violation("error", "%s: adjunction at a non-adjoinable node" % where(e)))
            if child.kind != AUXILIARY:
                out.append(Violation("error", "%s: initial tree %s used with adjunction" % (where(e), child.name)))
        else:
            out.append(Violation("error", "%s: unknown operation %r" % (where(e), e.op)))
            continue
        if child.label != site.label:
            out.append(Violation("error", "%s: label mismatch, site %s vs %s root %s"
                                 % (where(e), site.label, child.name, child.label)))
    for addr, label in host.sites[0]:
        n = filled[addr]
        if n == 0:
            out.append(Violation("error", "%s@%s: unfilled substitution site %s"
                                 % (host.name, format_address(addr), label)))
        elif n > 1:
            out.append(Violation("error", "%s@%s: %d substitutions at one site"
                                 % (host.name, format_address(addr), n)))
    return out


def _compose_adjunctions(aux_trees, inner: TreeNode) -> TreeNode:
    """Wrap ``inner`` in adjoined trees; the first in edge order ends up outermost."""
    for aux in reversed(aux_trees):
        inner = _replace_foot(aux, inner)
    return inner


def _replace_foot(node: TreeNode, filler: TreeNode) -> TreeNode:
    if node.kind == FOOT:
        return filler
    if not node.children:
        return node
    return TreeNode(node.label, node.kind, node.adjoinable,
                    tuple(_replace_foot(c, filler) for c in node.children))


def derive(g: Grammar, d: DerivationTree) -> DerivedTree:
    return DerivedTree(plain_tree(_derive(g, d)))


def plain_tree(node: TreeNode) -> TreeNode:
    """Drop adjoinability marks; derived trees are plain phrase structure."""
    if node.kind != INTERIOR:
        return node
    return TreeNode(node.label, INTERIOR, True, tuple(plain_tree(c) for c in node.children))


def _derive(g, d) -> TreeNode:
    host = g[d.tree_name]
    subs = {e.addr: _derive(g, e.child) for e in d.edges if e.op == SUB}
    adjs = {}
    for e in d.edges:
        if e.op == ADJ:
            adjs.setdefault(e.addr, []).append(_derive(g, e.child))

    def build(node, addr):
        if node.kind == SUBST and addr in subs:
            return subs[addr]
        if node.children:
            node = TreeNode(node.label, node.kind, node.adjoinable,
                            tuple(build(c, addr + (i,)) for i, c in enumerate(node.children, 1)))
        if addr in adjs:
            node = _compose_adjunctions(adjs[addr], node)
        return node

    return build(host.root, ())


# -- meta-productions and events ------------------------------------------------

@dataclass(frozen=True)
class MetaProduction:
    """One full expansion of ``mother``.

    ``subs`` maps every substitution address to its filler; ``adjs`` lists
    only adjunction addresses that received at least one auxiliary tree, in
    address order.  Adjoinable addresses absent from ``adjs`` took no
    adjunction.
    """
    mother: str
    subs: tuple = ()  # ((addr, tree name), ...)
    adjs: tuple = ()  # ((addr, (tree name, ...)), ...)

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(sorted((tuple(a), n) for a, n in self.subs)))
        object.__setattr__(self, "adjs", tuple(sorted((tuple(a), tuple(ns)) for a, ns in self.adjs if ns)))

    def adjunctions_at(self, addr) -> tuple:
        return dict(self.adjs).get(addr, ())

    def daughters(self) -> list:
        return [n for _, n in self.subs] + [n for _, ns in self.adjs for n in ns]

    def map_names(self, fn) -> "MetaProduction":
        return MetaProduction(fn(self.mother), tuple((a, fn(n)) for a, n in self.subs),
                              tuple((a, tuple(fn(n) for n in ns)) for a, ns in self.adjs))

    def __str__(self):
        return render_meta_production(self)


def render_meta_production(m: MetaProduction) -> str:
    parts = [(a, "%s>%s" % (format_address(a), n)) for a, n in m.subs]
    parts += [(a, "%s>[%s]" % (format_address(a), ",".join(ns))) for a, ns in m.adjs]
    parts.sort(key=lambda p: p[0])
    return "{%s}" % "; ".join(p for _, p in parts)


def parse_meta_production(mother: str, text: str) -> MetaProduction:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise DerivationSyntaxError("meta-production must be enclosed in braces: %r" % text)
    subs, adjs = [], []
    body = text[1:-1].strip()
    for item in filter(None, (p.strip() for p in body.split(";"))):
        if ">" not in item:
            raise DerivationSyntaxError("bad meta-production item %r" % item)
        addr, rhs = (s.strip() for s in item.split(">", 1))
        addr = parse_address(addr)
        if rhs.startswith("["):
            if not rhs.endswith("]"):
                raise DerivationSyntaxError("bad adjunction list %r" % rhs)
            names = tuple(n.strip() for n in rhs[1:-1].split(",") if n.strip())
            adjs.append((addr, names))
        else:
            subs.append((addr, rhs))
    return MetaProduction(mother, tuple(subs), tuple(adjs))


class Event(NamedTuple):
    level: int
    context: object
    outcome: object


def root_context(g: Grammar, level: int):
    """Context of the virtual start site at which the root tree is chosen."""
    if level == 1:
        return (g.start_symbol, SUB)
    if level == 2:
        return (ROOT, (), SUB)
    return ROOT


def root_event(g: Grammar, d: DerivationTree, level: int) -> Event:
    return Event(level, root_context(g, level), d.tree_name)


def extract_events(g: Grammar, d: DerivationTree, level: int) -> list:
    """Probabilistic choices made by ``d``.

    Levels 1 and 2 yield the root event, one event per substitution and, at
    every adjoinable node instance, its adjunctions followed by STOP.  Level 3
    yields one meta-production event per derivation-tree node.
    """
    if level not in (1, 2, 3):
        raise ValueError("event level must be 1, 2 or 3")
    if level == 3:
        return [Event(3, m.mother, m) for m in extract_meta_productions(g, d)]
    out = [root_event(g, d, level)]
    for node in d.nodes():
        host = g[node.tree_name]
        for addr, label, op in _site_list(host):
            ctx = (label, op) if level == 1 else (node.tree_name, addr, op)
            if op == SUB:
                out.append(Event(level, ctx, node.substitution_at(addr).tree_name))
            else:
                for child in node.adjunctions_at(addr):
                    out.append(Event(level, ctx, child.tree_name))
                out.append(Event(level, ctx, STOP))
    return out


def _site_list(host):
    subs, adjs = host.sites
    items = [(a, l, SUB) for a, l in subs] + [(a, l, ADJ) for a, l in adjs]
    items.sort(key=lambda x: x[0])
    return items


def extract_meta_productions(g: Grammar, d: DerivationTree) -> list:
    out = []
    for node in d.nodes():
        subs = tuple((e.addr, e.child.tree_name) for e in node.edges if e.op == SUB)
        adjs = {}
        for e in node.edges:
            if e.op == ADJ:
                adjs.setdefault(e.addr, []).append(e.child.tree_name)
        out.append(MetaProduction(node.tree_name, subs, tuple((a, tuple(ns)) for a, ns in adjs.items())))
    return out


def coarsen_context(g: Grammar, context):
    """Project a level-2 context to its level-1 context."""
    host, addr, op = context
    if host == ROOT:
        return (g.start_symbol, op)
    return (node_at(g[host], addr).label, op)


# -- reading and writing -------------------------------------------------------

_DTOK = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _dtokens(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _DTOK.match(text, pos)
        if m is None:
            raise DerivationSyntaxError("cannot tokenize %r" % text[pos:])
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_derivation(text: str) -> DerivationTree:
    toks = _dtokens(text)
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(toks):
            raise DerivationSyntaxError("unexpected end of derivation")
        tok = toks[pos]
        if tok not in "()":
            pos += 1
            return DerivationTree(tok)
        if tok != "(":
            raise DerivationSyntaxError("unexpected ')'")
        pos += 1
        if pos >= len(toks) or toks[pos] in "()":
            raise DerivationSyntaxError("expected a tree name after '('")
        name = toks[pos]
        pos += 1
        edges = []
        while pos < len(toks) and toks[pos] == "(":
            if pos + 2 >= len(toks):
                raise DerivationSyntaxError("truncated edge in %s" % name)
            try:
                addr = parse_address(toks[pos + 1])
            except ValueError as e:
                raise DerivationSyntaxError(str(e)) from None
            op = toks[pos + 2]
            if op not in (SUB, ADJ):
                raise DerivationSyntaxError("edge operation must be sub or adj, got %r" % op)
            pos += 3
            child = node()
            if pos >= len(toks) or toks[pos] != ")":
                raise DerivationSyntaxError("expected ')' closing an edge of %s" % name)
            pos += 1
            edges.append(Edge(addr, op, child))
        if pos >= len(toks) or toks[pos] != ")":
            raise DerivationSyntaxError("expected ')' closing %s" % name)
        pos += 1
        return DerivationTree(name, tuple(edges))

    d = node()
    if pos != len(toks):
        raise DerivationSyntaxError("trailing input after derivation")
    return d


def render_derivation(d: DerivationTree) -> str:
    inner = "".join(" (%s %s %s)" % (format_address(e.addr), e.op, render_derivation(e.child))
                    for e in d.edges)
    return "(%s%s)" % (d.tree_name, inner)


def parse_corpus(text: str) -> list:
    """Parse a derivation corpus into ``(id or None, DerivationTree)`` pairs."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        ident = None
        if not line.startswith("("):
            ident, _, line = line.partition(" ")
            ident = ident.rstrip(":")
        try:
            out.append((ident, parse_derivation(line)))
        except DerivationSyntaxError as e:
            raise DerivationSyntaxError("line %d: %s" % (lineno, e)) from None
    return out


def render_corpus(derivations, ids=None) -> str:
    lines = []
    for i, d in enumerate(derivations):
        prefix = "%s " % ids[i] if ids else ""
        lines.append(prefix + render_derivation(d))
    return "\n".join(lines) + "\n"


def load_corpus(path) -> list:
    with open(path, encoding="utf-8") as f:
        return [d for _, d in parse_corpus(f.read())]


def parse_tree_corpus(text: str) -> list:
    """Derived-tree corpus: one bracketed phrase-structure tree per line."""
    from .grammar import parse_tree_text
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(DerivedTree(plain_tree(parse_tree_text(line))))
    return out
