"""Backoff smoothing: unanchored templates, lexical-rule families, lower levels.

A smoothed model interpolates a chain of models::

    p = l1 * primary + (1 - l1) * (l2 * M1 + (1 - l2) * (l3 * M2 + (1 - l3) * M3))

where ``M1..M3`` are the template, family and lower-level models in the
configured order and ``li`` is the lambda of the i-th technique in that order
(the weight kept on the model *before* applying the technique).  The chain
must end with ``level``; its model is the smoothed level-(i-1) model lifted
to level i, and at level 1 it is the terminal fallback, an additively
smoothed level-1 template model that covers every licensed outcome.

A model lacking a context is skipped and its weight passes down the chain.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .derivation import ADJ, ROOT, SUB, MetaProduction, root_context
from .estimation import check_corpus, count_events
from .grammar import STOP, Grammar, node_at
from .models import InducedSlg3

TECHNIQUES = ("anchor", "family", "level")


class CoverageError(ValueError):
    """The terminal fallback cannot cover a context the grammar can reach."""


@dataclass(frozen=True)
class BackoffConfig:
    lambda_anchor: float = 0.8
    lambda_family: float = 0.8
    lambda_level: float = 0.9
    order: tuple = TECHNIQUES
    fallback_add: float = 1.0  # additive pseudo-count of the terminal fallback

    def __post_init__(self):
        for name in ("lambda_anchor", "lambda_family", "lambda_level"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError("%s must lie in [0, 1], got %r" % (name, v))
        order = tuple(self.order)
        object.__setattr__(self, "order", order)
        if len(set(order)) != len(order) or not set(order) <= set(TECHNIQUES):
            raise ValueError("order must list distinct techniques from %s" % (TECHNIQUES,))
        if not order or order[-1] != "level":
            raise ValueError("the backoff chain must end with 'level'")
        if self.fallback_add < 0:
            raise ValueError("fallback_add must be >= 0")

    def weight(self, technique):
        return getattr(self, "lambda_" + technique)

    @classmethod
    def parse(cls, text, **overrides):
        """``key = value`` lines; ``order`` is comma separated."""
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError("line %d: expected key = value" % lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "order":
                values[key] = tuple(s.strip() for s in value.replace(">", ",").split(",") if s.strip())
            elif key in ("lambda_anchor", "lambda_family", "lambda_level", "fallback_add"):
                values[key] = float(value)
            else:
                raise ValueError("line %d: unknown key %r" % (lineno, key))
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def render(self) -> str:
        return ("lambda_anchor = %r\nlambda_family = %r\nlambda_level = %r\norder = %s\n"
                "fallback_add = %r\n" % (self.lambda_anchor, self.lambda_family, self.lambda_level,
                                         ", ".join(self.order), self.fallback_add))


def _tree_counts(g, corpus) -> Counter:
    """How often each tree is chosen anywhere in the corpus."""
    c = Counter()
    for d in corpus:
        for node in d.nodes():
            c[node.tree_name] += 1
    return c


class _Shares:
    """Add-one relative frequency of a tree among the compatible members of its group."""

    def __init__(self, g, group_of, tree_counts):
        totals, sizes = Counter(), Counter()
        self.key = {}
        for name, t in g.trees.items():
            k = (group_of(name), t.kind, t.label)
            self.key[name] = k
            totals[k] += tree_counts[name]
            sizes[k] += 1
        self.share = {n: (tree_counts[n] + 1) / (totals[k] + sizes[k]) for n, k in self.key.items()}

    def __call__(self, outcome):
        if outcome == STOP:
            return 1.0
        if isinstance(outcome, MetaProduction):
            p = 1.0
            for n in outcome.daughters():
                p *= self.share[n]
            return p
        return self.share[outcome]


class GroupedModel:
    """A level-i model estimated with tree names replaced by group ids
    (templates or families), spread back over group members by their shares."""

    def __init__(self, g: Grammar, corpus, level, group_of, tree_counts):
        self.g, self.level, self.group_of = g, level, group_of
        self.shares = _Shares(g, group_of, tree_counts)
        counts = Counter()
        for (ctx, outcome), n in count_events(g, corpus, level).items():
            counts[(self.map_context(ctx), self.map_outcome(outcome))] += n
        totals = Counter()
        for (ctx, _), n in counts.items():
            totals[ctx] += n
        self.table = defaultdict(dict)
        for (ctx, outcome), n in counts.items():
            self.table[ctx][outcome] = n / totals[ctx]
        self.table = dict(self.table)

    def map_context(self, ctx):
        if self.level == 1:
            return ctx
        if self.level == 2:
            host, addr, op = ctx
            if host == ROOT:
                return ctx + (self.g.start_symbol,)
            return (self.group_of(host), addr, op, node_at(self.g[host], addr).label)
        if ctx == ROOT:
            return ROOT
        t = self.g[ctx]
        return (self.group_of(ctx), tuple(t.sites[0]), tuple(t.sites[1]))

    def map_outcome(self, outcome):
        if outcome == STOP:
            return STOP
        if isinstance(outcome, MetaProduction):
            return outcome.map_names(self.group_of)
        return self.group_of(outcome)

    def has_context(self, ctx):
        return self.map_context(ctx) in self.table

    def lookup(self, ctx, outcome):
        dist = self.table.get(self.map_context(ctx))
        if dist is None:
            return None
        q = dist.get(self.map_outcome(outcome), 0)
        return q * self.shares(outcome) if q else 0.0


class TerminalFallback:
    """Level-1 template model with additive smoothing over licensed outcomes."""

    level = 1

    def __init__(self, g: Grammar, corpus, add=1.0, tree_counts=None):
        self.g, self.add = g, add
        template = lambda n: g[n].template
        self.shares = _Shares(g, template, tree_counts if tree_counts is not None else _tree_counts(g, corpus))
        self.licensed = {}
        for label in sorted(g.labels):
            subs = sorted({g[n].template for n in g.initial_trees(label)})
            if subs:
                self.licensed[(label, SUB)] = subs
            self.licensed[(label, ADJ)] = sorted({g[n].template for n in g.auxiliary_trees(label)}) + [STOP]
        self.counts = Counter()
        self.totals = Counter()
        for (ctx, outcome), n in count_events(g, corpus, 1).items():
            key = STOP if outcome == STOP else g[outcome].template
            self.counts[(ctx, key)] += n
            self.totals[ctx] += n

    def has_context(self, ctx):
        if ctx not in self.licensed:
            return False
        return self.add > 0 or self.totals[ctx] > 0

    def lookup(self, ctx, outcome):
        if not self.has_context(ctx):
            return None
        key = STOP if outcome == STOP else self.g[outcome].template
        allowed = self.licensed[ctx]
        if key not in allowed:
            return 0.0
        if outcome != STOP:
            t = self.g[outcome]
            if t.label != ctx[0] or (t.kind == "initial") != (ctx[1] == SUB):
                return 0.0
        q = (self.counts[(ctx, key)] + self.add) / (self.totals[ctx] + self.add * len(allowed))
        return q * self.shares(outcome)

    def prob(self, ctx, outcome):
        return self.lookup(ctx, outcome) or 0.0

    def check_coverage(self):
        g = self.g
        needed = {root_context(g, 1)}
        for t in g.trees.values():
            subs, adjs = t.sites
            needed.update((l, SUB) for _, l in subs)
            needed.update((l, ADJ) for _, l in adjs)
        missing = sorted(c for c in needed if not self.has_context(c))
        if missing:
            raise CoverageError("terminal fallback lacks contexts %s" % ", ".join("%s/%s" % c for c in missing))


class _LevelDown2:
    """A smoothed level-1 model read at level-2 contexts."""

    level = 2

    def __init__(self, lower, g):
        self.lower, self.g = lower, g

    def lookup(self, ctx, outcome):
        host, addr, op = ctx
        label = self.g.start_symbol if host == ROOT else node_at(self.g[host], addr).label
        return self.lower.prob((label, op), outcome)


class SmoothedModel:
    def __init__(self, level, primary, stages, config, terminal):
        self.level, self.primary, self.config, self.terminal = level, primary, config, terminal
        self.stages = stages  # [(technique, model)] in chain order

    def prob(self, ctx, outcome):
        models = [self.primary] + [m for _, m in self.stages]
        weights = [self.config.weight(t) for t, _ in self.stages]
        result, remaining = 0.0, 1.0
        for i, m in enumerate(models):
            q = m.lookup(ctx, outcome)
            if q is None:
                continue
            w = weights[i] if i < len(weights) else 1.0
            result += remaining * w * q
            remaining *= 1 - w
            if remaining == 0:
                break
        return result

    lookup = prob

    def stage(self, technique):
        return dict(self.stages)[technique]


def smooth_prob(m: SmoothedModel, context, outcome) -> float:
    return m.prob(context, outcome)


def build_smoothed(primary, corpus, g: Grammar, config: BackoffConfig = None, _terminal=None) -> SmoothedModel:
    from .estimation import estimate

    config = config or BackoffConfig()
    corpus = list(corpus)
    check_corpus(g, corpus)
    level = primary.level
    if level not in (1, 2, 3):
        raise ValueError("smoothing applies to levels 1-3")
    counts = _tree_counts(g, corpus)
    terminal = _terminal
    if terminal is None:
        terminal = TerminalFallback(g, corpus, config.fallback_add, counts)
        terminal.check_coverage()
    stages = []
    for technique in config.order:
        if technique == "anchor":
            model = GroupedModel(g, corpus, level, lambda n: g[n].template, counts)
        elif technique == "family":
            model = GroupedModel(g, corpus, level, g.family_of, counts)
        elif level == 1:
            model = terminal
        else:
            lower = build_smoothed(estimate(g, corpus, level - 1), corpus, g, config, terminal)
            model = _LevelDown2(lower, g) if level == 2 else InducedSlg3(lower, g)
        stages.append((technique, model))
    return SmoothedModel(level, primary, stages, config, terminal)
