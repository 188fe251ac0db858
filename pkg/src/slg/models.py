"""Parameter sets for the four stochastic LTAG levels, scoring and lifting.

Contexts, as produced by :func:`slg.derivation.extract_events`:

* level 1: ``(label, op)``; the root choice uses ``(start_symbol, 'sub')``
* level 2: ``(host, addr, op)``; the root choice uses ``(ROOT, (), 'sub')``
* level 3: the mother tree name, or ``ROOT`` for the root choice
* level 4: fragments grouped by root label

Probabilities may be floats or :class:`fractions.Fraction` (exact mode).
"""
from __future__ import annotations

import math
import re
from collections import defaultdict
from fractions import Fraction

from .derivation import (ADJ, ROOT, SUB, DerivedTree, MetaProduction, extract_events,
                         parse_meta_production, render_meta_production, root_event)
from .grammar import (AUXILIARY, INITIAL, INTERIOR, STOP, SUBST, AddressError,
                      Grammar, Violation, format_address, node_at, parse_address,
                      parse_tree_text, render_node)

TOLERANCE = 1e-9


class MissingContextError(LookupError):
    """An unsmoothed model was queried outside its support."""


class IllFormedError(ValueError):
    pass


class ParamsSyntaxError(ValueError):
    pass


class ConditionalParams:
    """A table of conditional distributions, one per context."""

    level = 0

    def __init__(self, dists=None):
        self.dists = {ctx: dict(d) for ctx, d in (dists or {}).items()}

    def __eq__(self, other):
        return type(self) is type(other) and self.dists == other.dists

    def __repr__(self):
        return "%s(%d contexts)" % (type(self).__name__, len(self.dists))

    def contexts(self):
        return self.dists.keys()

    def distribution(self, ctx):
        return self.dists.get(ctx)

    def has_context(self, ctx) -> bool:
        return ctx in self.dists

    def lookup(self, ctx, outcome):
        """P(outcome | ctx), or None when the context is absent."""
        d = self.dists.get(ctx)
        if d is None:
            return None
        return d.get(outcome, 0)

    def prob(self, ctx, outcome):
        p = self.lookup(ctx, outcome)
        if p is None:
            raise MissingContextError("no distribution for context %s" % (format_context(ctx),))
        return p


class Slg1Params(ConditionalParams):
    """Per-nonterminal distributions over substituted / adjoined trees."""

    level = 1

    def __init__(self, sub=None, adj=None, dists=None):
        dists = dict(dists or {})
        for label, d in (sub or {}).items():
            dists[(label, SUB)] = d
        for label, d in (adj or {}).items():
            dists[(label, ADJ)] = d
        super().__init__(dists)

    @property
    def sub(self):
        return {c[0]: d for c, d in self.dists.items() if c[1] == SUB}

    @property
    def adj(self):
        return {c[0]: d for c, d in self.dists.items() if c[1] == ADJ}


class Slg2Params(ConditionalParams):
    """Distributions per (host tree, address) site, plus the root choice."""

    level = 2

    def __init__(self, sub=None, adj=None, root=None, dists=None):
        dists = dict(dists or {})
        for (host, addr), d in (sub or {}).items():
            dists[(host, tuple(addr), SUB)] = d
        for (host, addr), d in (adj or {}).items():
            dists[(host, tuple(addr), ADJ)] = d
        if root is not None:
            dists[(ROOT, (), SUB)] = root
        super().__init__(dists)

    @property
    def sub(self):
        return {c[:2]: d for c, d in self.dists.items() if c[2] == SUB and c[0] != ROOT}

    @property
    def adj(self):
        return {c[:2]: d for c, d in self.dists.items() if c[2] == ADJ}

    @property
    def root(self):
        return self.dists.get((ROOT, (), SUB))


class Slg3Params(ConditionalParams):
    """Extensional meta-production distributions per mother tree.

    Unseen expansions of a known mother raise :class:`MissingContextError`
    from :meth:`prob`; smoothing is the only source of mass for them.
    """

    level = 3

    def __init__(self, expand=None, root=None, dists=None):
        dists = dict(dists or {})
        dists.update(expand or {})
        if root is not None:
            dists[ROOT] = root
        super().__init__(dists)

    @property
    def expand(self):
        return {c: d for c, d in self.dists.items() if c != ROOT}

    @property
    def root(self):
        return self.dists.get(ROOT)

    def prob(self, ctx, outcome):
        p = super().prob(ctx, outcome)
        if ctx != ROOT and outcome not in self.dists[ctx]:
            raise MissingContextError("unseen expansion %s of %s" % (outcome, ctx))
        return p


class InducedSlg3:
    """Level-3 view of a level-2 model: P(m | mother) is the product of the
    site-wise level-2 factors, so the meta-production space is never listed."""

    level = 3

    def __init__(self, base: Slg2Params, grammar: Grammar):
        self.base, self.grammar = base, grammar

    def has_context(self, ctx) -> bool:
        if ctx == ROOT:
            return self.base.root is not None
        return ctx in self.grammar.trees

    def lookup(self, ctx, outcome):
        if ctx == ROOT:
            return self.base.lookup((ROOT, (), SUB), outcome)
        if outcome.mother != ctx:
            return 0
        host = self.grammar[ctx]
        subs, adjs = host.sites
        filled = dict(outcome.subs)
        if set(filled) != {a for a, _ in subs}:
            return 0
        p = 1
        for addr, _ in subs:
            q = self.base.lookup((ctx, addr, SUB), filled[addr])
            if q is None:
                return None
            p *= q
        adjoinable = {a for a, _ in adjs}
        if any(a not in adjoinable for a, _ in outcome.adjs):
            return 0
        for addr, _ in adjs:
            ctx2 = (ctx, addr, ADJ)
            for aux in outcome.adjunctions_at(addr):
                q = self.base.lookup(ctx2, aux)
                if q is None:
                    return None
                p *= q
            q = self.base.lookup(ctx2, STOP)
            if q is None:
                return None
            p *= q
        return p

    def prob(self, ctx, outcome):
        p = self.lookup(ctx, outcome)
        if p is None:
            raise MissingContextError("level-2 base lacks a context needed for %s" % (outcome,))
        return p


class Slg4Params:
    """Stochastic tree-substitution grammar: fragment -> probability,
    normalized per root label."""

    level = 4

    def __init__(self, prob=None):
        self.prob = dict(prob or {})

    def __eq__(self, other):
        return isinstance(other, Slg4Params) and self.prob == other.prob

    @property
    def fragments(self):
        return set(self.prob)

    def by_label(self) -> dict:
        out = defaultdict(list)
        for f, p in self.prob.items():
            out[f.label].append((f, p))
        return dict(out)


def format_context(ctx) -> str:
    if isinstance(ctx, tuple) and len(ctx) == 3:
        return "%s@%s/%s" % (ctx[0], format_address(ctx[1]), ctx[2])
    if isinstance(ctx, tuple):
        return "%s/%s" % ctx
    return str(ctx)


# -- well-formedness -----------------------------------------------------------

def _compatible(g, outcome, label, op):
    """None if fine, else a reason."""
    if outcome == STOP:
        return None if op == ADJ else "STOP outcome in a substitution context"
    if outcome not in g.trees:
        return "unknown tree %s" % outcome
    t = g[outcome]
    want = INITIAL if op == SUB else AUXILIARY
    if t.kind != want:
        return "%s tree %s in a %s context" % (t.kind, outcome, op)
    if t.label != label:
        return "tree %s rooted in %s, context wants %s" % (outcome, t.label, label)
    return None


def _check_sum(where, dist, tol, out):
    bad = [o for o, p in dist.items() if p < 0 or p > 1]
    for o in bad:
        out.append(Violation("error", "%s: probability of %s out of [0,1]: %s" % (where, o, dist[o])))
    total = sum(dist.values())
    if abs(total - 1) > tol:
        out.append(Violation("error", "%s: probabilities sum to %.12g" % (where, float(total))))


def check_well_formed(params, g: Grammar = None, tol: float = TOLERANCE) -> list:
    """Every context whose distribution does not sum to 1, and (given a
    grammar) every outcome whose root label contradicts its context."""
    out = []
    if isinstance(params, InducedSlg3):
        return check_well_formed(params.base, g or params.grammar, tol)
    if isinstance(params, Slg4Params):
        for label, items in sorted(params.by_label().items()):
            _check_sum("fragments rooted in %s" % label, dict(items), tol, out)
        return out
    for ctx in sorted(params.contexts(), key=repr):
        dist = params.distribution(ctx)
        where = format_context(ctx)
        _check_sum(where, dist, tol, out)
        if g is None:
            continue
        for outcome in sorted(dist, key=str):
            reason = _outcome_problem(params.level, g, ctx, outcome)
            if reason:
                out.append(Violation("error", "%s: %s" % (where, reason)))
    return out


def _outcome_problem(level, g, ctx, outcome):
    if level == 1:
        return _compatible(g, outcome, ctx[0], ctx[1])
    if level == 2:
        host, addr, op = ctx
        if host == ROOT:
            return _compatible(g, outcome, g.start_symbol, SUB)
        if host not in g.trees:
            return "unknown host tree %s" % host
        try:
            node = node_at(g[host], addr)
        except AddressError:
            return "no node at that address"
        if op == SUB and node.kind != SUBST:
            return "not a substitution site"
        if op == ADJ and not (node.kind == INTERIOR and node.adjoinable):
            return "not an adjoinable node"
        return _compatible(g, outcome, node.label, op)
    # level 3
    if ctx == ROOT:
        return _compatible(g, outcome, g.start_symbol, SUB)
    if not isinstance(outcome, MetaProduction) or outcome.mother != ctx:
        return "outcome %s is not an expansion of %s" % (outcome, ctx)
    if ctx not in g.trees:
        return "unknown mother tree %s" % ctx
    host = g[ctx]
    subs, adjs = host.sites
    if {a for a, _ in outcome.subs} != {a for a, _ in subs}:
        return "expansion %s does not cover the substitution sites" % outcome
    labels = dict(subs)
    for a, n in outcome.subs:
        reason = _compatible(g, n, labels[a], SUB)
        if reason:
            return reason
    labels = dict(adjs)
    for a, ns in outcome.adjs:
        if a not in labels:
            return "adjunction at non-adjoinable address %s" % format_address(a)
        for n in ns:
            reason = _compatible(g, n, labels[a], ADJ)
            if reason:
                return reason
    return None


# -- scoring ---------------------------------------------------------------------

def _events_for(params, g, d):
    level = params.level
    if level == 3:
        return [root_event(g, d, 3)] + extract_events(g, d, 3)
    return extract_events(g, d, level)


def _log(p):
    return math.log(p) if p > 0 else -math.inf


def score_derivation(params, g: Grammar, d) -> float:
    """Log-probability of a complete derivation under a level 1-3 model.

    Raises :class:`MissingContextError` when the model lacks a needed context.
    """
    return math.fsum(_log(params.prob(e.context, e.outcome)) for e in _events_for(params, g, d))


def derivation_probability(params, g: Grammar, d):
    """Linear-space probability; exact when the parameters are Fractions."""
    p = 1
    for e in _events_for(params, g, d):
        p *= params.prob(e.context, e.outcome)
    return p


def score_derived_tree_dop(params: Slg4Params, t) -> float:
    """Total probability of all tree-substitution derivations of ``t``."""
    root = t.root if isinstance(t, DerivedTree) else t
    index = params.by_label()
    nodes = dict(root.walk())
    memo = {}

    def q(addr):
        if addr in memo:
            return memo[addr]
        node = nodes[addr]
        total = 0
        for frag, p in index.get(node.label, ()):
            sites = []
            if _match(frag, node, addr, sites):
                term = p
                for s in sites:
                    term *= q(s)
                total += term
        memo[addr] = total
        return total

    return q(())


def _match(frag, node, addr, sites) -> bool:
    if frag.kind == SUBST:
        if node.kind == INTERIOR and node.label == frag.label:
            sites.append(addr)
            return True
        return False
    if frag.kind != node.kind or frag.label != node.label:
        return False
    if len(frag.children) != len(node.children):
        return False
    return all(_match(fc, nc, addr + (i,), sites)
               for i, (fc, nc) in enumerate(zip(frag.children, node.children), 1))


# -- lifting -------------------------------------------------------------------------

def lift(params, g: Grammar):
    """Level 1 -> 2 (extensional copy per site) or level 2 -> 3 (induced)."""
    problems = [v for v in check_well_formed(params, g) if v.severity == "error"]
    if problems:
        raise IllFormedError("cannot lift ill-formed parameters: %s" % problems[0].message)
    if params.level == 1:
        return _lift_1_to_2(params, g)
    if params.level == 2:
        return InducedSlg3(params, g)
    raise ValueError("lift is defined for levels 1 and 2 only")


def _restrict(g, dist, label, op):
    kept = {o: p for o, p in dist.items() if _compatible(g, o, label, op) is None}
    if abs(sum(kept.values()) - sum(dist.values())) > 1e-12:
        raise IllFormedError("label restriction dropped mass for %s/%s" % (label, op))
    return kept


def _lift_1_to_2(p1, g):
    dists = {}
    for name in sorted(g.trees):
        subs, adjs = g[name].sites
        for addr, label in subs:
            if (label, SUB) in p1.dists:
                dists[(name, addr, SUB)] = _restrict(g, p1.dists[(label, SUB)], label, SUB)
        for addr, label in adjs:
            if (label, ADJ) in p1.dists:
                dists[(name, addr, ADJ)] = _restrict(g, p1.dists[(label, ADJ)], label, ADJ)
    start = (g.start_symbol, SUB)
    if start in p1.dists:
        dists[(ROOT, (), SUB)] = _restrict(g, p1.dists[start], g.start_symbol, SUB)
    return Slg2Params(dists=dists)


# -- parameter files --------------------------------------------------------------

def format_prob(p) -> str:
    return "%.12g" % float(p)


def _emit(p) -> str:
    """Parameter-file value: exact rationals stay exact, floats get 12 digits."""
    if isinstance(p, Fraction) and p.denominator != 1:
        return "%d/%d" % (p.numerator, p.denominator)
    return format_prob(p)


def _parse_prob(tok):
    try:
        return Fraction(tok) if "/" in tok else float(tok)
    except ValueError:
        raise ParamsSyntaxError("bad probability %r" % tok) from None


def render_params(params) -> str:
    lines = []
    if isinstance(params, Slg4Params):
        rows = sorted((render_node(f), p) for f, p in params.prob.items())
        lines = ["slg4 frag %s %s" % (f, _emit(p)) for f, p in rows]
    elif params.level == 1:
        for (label, op), dist in sorted(params.dists.items()):
            for o in sorted(dist):
                lines.append("slg1 %s %s %s %s" % (op, label, o, _emit(dist[o])))
    elif params.level == 2:
        for (host, addr, op), dist in sorted(params.dists.items()):
            for o in sorted(dist):
                if host == ROOT:
                    lines.append("slg2 root %s %s" % (o, _emit(dist[o])))
                else:
                    lines.append("slg2 %s %s %s %s %s" % (op, host, format_address(addr), o,
                                                         _emit(dist[o])))
    elif isinstance(params, Slg3Params):
        for ctx in sorted(params.dists, key=lambda c: (c != ROOT, c)):
            dist = params.dists[ctx]
            if ctx == ROOT:
                for o in sorted(dist):
                    lines.append("slg3 root %s %s" % (o, _emit(dist[o])))
            else:
                for m in sorted(dist, key=render_meta_production):
                    lines.append("slg3 expand %s %s %s" % (ctx, render_meta_production(m),
                                                          _emit(dist[m])))
    else:
        raise TypeError("cannot write %r as a parameter file" % (params,))
    return "\n".join(lines) + "\n"


_EXPAND = re.compile(r"^slg3\s+expand\s+(\S+)\s+(\{.*\})\s+(\S+)$")
_FRAG = re.compile(r"^slg4\s+frag\s+(\(.*\)|\S+)\s+(\S+)$")


def parse_params(text: str):
    levels = set()
    dists = defaultdict(dict)
    frags = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            level = _parse_line(line, dists, frags)
        except (ParamsSyntaxError, ValueError) as e:
            raise ParamsSyntaxError("line %d: %s" % (lineno, e)) from None
        levels.add(level)
    if len(levels) != 1:
        raise ParamsSyntaxError("parameter file must hold exactly one level, found %s" % sorted(levels))
    level = levels.pop()
    if level == 4:
        return Slg4Params(frags)
    return {1: Slg1Params, 2: Slg2Params, 3: Slg3Params}[level](dists=dict(dists))


def _parse_line(line, dists, frags):
    head = line.split()
    tag = head[0]
    if tag == "slg1":
        if len(head) != 5 or head[1] not in (SUB, ADJ):
            raise ParamsSyntaxError("expected: slg1 sub|adj <label> <tree|STOP> <p>")
        _add(dists, (head[2], head[1]), head[3], _parse_prob(head[4]))
        return 1
    if tag == "slg2":
        if len(head) == 4 and head[1] == "root":
            _add(dists, (ROOT, (), SUB), head[2], _parse_prob(head[3]))
        elif len(head) == 6 and head[1] in (SUB, ADJ):
            _add(dists, (head[2], parse_address(head[3]), head[1]), head[4], _parse_prob(head[5]))
        else:
            raise ParamsSyntaxError("expected: slg2 sub|adj <host> <addr> <tree|STOP> <p> or slg2 root <tree> <p>")
        return 2
    if tag == "slg3":
        if len(head) == 4 and head[1] == "root":
            _add(dists, ROOT, head[2], _parse_prob(head[3]))
            return 3
        m = _EXPAND.match(line)
        if not m:
            raise ParamsSyntaxError("expected: slg3 expand <mother> {...} <p> or slg3 root <tree> <p>")
        mother = m.group(1)
        _add(dists, mother, parse_meta_production(mother, m.group(2)), _parse_prob(m.group(3)))
        return 3
    if tag == "slg4":
        m = _FRAG.match(line)
        if not m:
            raise ParamsSyntaxError("expected: slg4 frag <tree> <p>")
        frag = parse_tree_text(m.group(1))
        if frag in frags:
            raise ParamsSyntaxError("duplicate fragment %s" % m.group(1))
        frags[frag] = _parse_prob(m.group(2))
        return 4
    raise ParamsSyntaxError("unknown record type %r" % tag)


def _add(dists, ctx, outcome, p):
    if outcome in dists[ctx]:
        raise ParamsSyntaxError("duplicate entry for %s in %s" % (outcome, format_context(ctx)))
    dists[ctx][outcome] = p


def load_params(path):
    with open(path, encoding="utf-8") as f:
        return parse_params(f.read())


def save_params(params, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(render_params(params))
