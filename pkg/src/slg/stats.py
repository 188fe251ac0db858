"""Contingency tables over derivational choices and Pearson chi-square tests."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Union

from scipy.stats import chi2

from .grammar import Grammar, format_address, parse_address


class DegenerateTableError(ValueError):
    pass


class SelectorError(ValueError):
    pass


@dataclass(frozen=True)
class ContingencyTable:
    rows: tuple
    cols: tuple
    counts: tuple  # r x c nonnegative integers

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(self, "counts", tuple(tuple(r) for r in self.counts))
        if len(self.counts) != len(self.rows) or any(len(r) != len(self.cols) for r in self.counts):
            raise ValueError("counts shape does not match labels")
        if any(c < 0 for r in self.counts for c in r):
            raise ValueError("counts must be nonnegative")

    @classmethod
    def from_counts(cls, counts):
        counts = [list(r) for r in counts]
        return cls(tuple(range(len(counts))), tuple(range(len(counts[0]) if counts else 0)), counts)

    @property
    def total(self):
        return sum(map(sum, self.counts))

    def render(self) -> str:
        head = [""] + [str(c) for c in self.cols] + ["total"]
        body = [[str(r)] + [str(x) for x in row] + [str(sum(row))] for r, row in zip(self.rows, self.counts)]
        body.append(["total"] + [str(sum(col)) for col in zip(*self.counts)] + [str(self.total)])
        widths = [max(len(line[i]) for line in [head] + body) for i in range(len(head))]
        fmt = lambda line: "  ".join(s.rjust(w) if i else s.ljust(w) for i, (s, w) in enumerate(zip(line, widths)))
        return "\n".join(fmt(line) for line in [head] + body)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + list(self.cols))
        for r, row in zip(self.rows, self.counts):
            w.writerow([r] + list(row))
        return buf.getvalue()


class ChiSquareResult(NamedTuple):
    statistic: float
    df: int
    p_value: float


def chi_square_tail(statistic, df) -> float:
    """Upper-tail probability of the chi-square distribution."""
    return float(chi2.sf(float(statistic), df))


def chi_square(t: ContingencyTable, yates: bool = False, exact: bool = False) -> ChiSquareResult:
    """Pearson's statistic with expected counts row_i * col_j / N.

    ``exact`` computes the statistic as a Fraction (no Yates correction).
    """
    r, c = len(t.rows), len(t.cols)
    if r < 2 or c < 2:
        raise DegenerateTableError("need at least a 2x2 table, got %dx%d" % (r, c))
    rows = [sum(row) for row in t.counts]
    cols = [sum(col) for col in zip(*t.counts)]
    if 0 in rows or 0 in cols:
        raise DegenerateTableError("table has an all-zero row or column")
    n = sum(rows)
    df = (r - 1) * (c - 1)
    if exact:
        if yates:
            raise ValueError("exact mode does not support the Yates correction")
        stat = sum(Fraction((o * n - rows[i] * cols[j]) ** 2, rows[i] * cols[j] * n)
                   for i, row in enumerate(t.counts) for j, o in enumerate(row))
        return ChiSquareResult(stat, df, chi_square_tail(stat, df))
    stat = 0.0
    for i, row in enumerate(t.counts):
        for j, o in enumerate(row):
            e = rows[i] * cols[j] / n
            dev = abs(o - e)
            if yates and df == 1:
                dev = max(dev - 0.5, 0.0)
            stat += dev * dev / e
    return ChiSquareResult(stat, df, chi_square_tail(stat, df))


# -- tables from derivations -------------------------------------------------------

@dataclass(frozen=True)
class Selector:
    """A site of a mother tree picked by name or family: ``tree:alpha1@2.2``."""
    kind: str  # 'tree' | 'family'
    name: str
    addr: tuple

    @classmethod
    def parse(cls, text):
        try:
            kind, rest = text.split(":", 1)
            name, addr = rest.rsplit("@", 1)
            sel = cls(kind, name, parse_address(addr))
        except ValueError:
            raise SelectorError("selector must look like tree:NAME@ADDR or family:NAME@ADDR, got %r" % text) from None
        if kind not in ("tree", "family"):
            raise SelectorError("selector kind must be tree or family, got %r" % kind)
        return sel

    def matches(self, g: Grammar, tree_name) -> bool:
        if self.kind == "tree":
            return tree_name == self.name
        return g.family_of(tree_name) == self.name

    def __str__(self):
        return "%s:%s@%s" % (self.kind, self.name, format_address(self.addr))


Classifier = Union[str, Callable[[str], str]]


def _classifier(g, classify):
    if callable(classify):
        return classify
    if classify == "tree":
        return lambda n: n
    if classify == "family":
        return g.family_of
    if classify == "template":
        return lambda n: g[n].template
    raise ValueError("classifier must be tree, family, template or a callable")


def _filler(node, addr, cls):
    sub = node.substitution_at(addr)
    if sub is not None:
        return cls(sub.tree_name)
    adj = node.adjunctions_at(addr)
    if adj:
        return "+".join(cls(c.tree_name) for c in adj)
    return None


def dependency_table(g: Grammar, corpus, row: Selector, col: Selector,
                     classify: Classifier = "tree") -> ContingencyTable:
    """Cross-tabulate the fillers of two sites of the same derivation-tree node."""
    cls = _classifier(g, classify)
    cells = Counter()
    matched = False
    for d in corpus:
        for node in d.nodes():
            if not (row.matches(g, node.tree_name) and col.matches(g, node.tree_name)):
                continue
            matched = True
            a, b = _filler(node, row.addr, cls), _filler(node, col.addr, cls)
            if a is not None and b is not None:
                cells[(a, b)] += 1
    if not matched:
        raise SelectorError("no derivation-tree node matches both %s and %s" % (row, col))
    rows = sorted({a for a, _ in cells})
    cols = sorted({b for _, b in cells})
    return ContingencyTable(rows, cols, [[cells[(a, b)] for b in cols] for a in rows])


def format_p(p: float, percent: bool = False) -> str:
    """Probability for reports; ``percent`` renders it on a 0-100 scale."""
    return "%.4g%%" % (100 * p) if percent else "%.4g" % p
