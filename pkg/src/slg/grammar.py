"""LTAG elementary trees, grammars and Gorn-address navigation.

Grammar file format (UTF-8, line oriented)::

    # comment
    start S
    tree alpha1 initial family=tnx0Vnx1
    (S NP! (VP (V "drives") NP!))
    tree beta auxiliary
    (VP VP* (Adj "slowly"))

Node syntax: ``(Label child ...)`` interior node, ``Label!`` substitution
site, ``Label*`` foot node, ``"string"`` terminal, ``Label^na`` as the head
of an interior node marks it non-adjoinable.  Tree headers accept optional
``anchor=``, ``family=`` and ``template=`` attributes.  When no anchor is
given and the tree has exactly one terminal, that terminal is the anchor.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple, Optional

Address = tuple  # tuple[int, ...]; () is the root

INTERIOR = "interior"
SUBST = "subst"
FOOT = "foot"
TERMINAL = "terminal"

INITIAL = "initial"
AUXILIARY = "auxiliary"

STOP = "STOP"


class GrammarError(ValueError):
    """Malformed grammar text or an invalid elementary tree."""

    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        if line is not None:
            message = "line %d, col %d: %s" % (line, col, message)
        super().__init__(message)


class AddressError(LookupError):
    pass


class Violation(NamedTuple):
    severity: str  # 'error' | 'warning'
    message: str

    def __str__(self):
        return "%s: %s" % (self.severity, self.message)


def format_address(addr) -> str:
    return ".".join(map(str, addr)) if addr else "eps"


def parse_address(text: str) -> Address:
    text = text.strip()
    if text in ("eps", "ε", ""):
        return ()
    try:
        addr = tuple(int(part) for part in text.split("."))
    except ValueError:
        raise ValueError("bad address %r" % text) from None
    if any(i < 1 for i in addr):
        raise ValueError("address components must be >= 1: %r" % text)
    return addr


@dataclass(frozen=True)
class TreeNode:
    label: str
    kind: str = INTERIOR
    adjoinable: bool = False
    children: tuple = ()

    def __post_init__(self):
        if self.kind != INTERIOR and self.children:
            raise GrammarError("%s node %r cannot have children" % (self.kind, self.label))
        if self.kind != INTERIOR and self.adjoinable:
            raise GrammarError("%s node %r cannot be adjoinable" % (self.kind, self.label))

    @property
    def is_terminal(self):
        return self.kind == TERMINAL

    def walk(self, addr=()) -> Iterator[tuple]:
        """Pre-order (address, node) pairs; pre-order is address order."""
        yield addr, self
        for i, child in enumerate(self.children, 1):
            yield from child.walk(addr + (i,))

    def leaves(self) -> list:
        return [n.label for _, n in self.walk() if n.kind == TERMINAL]

    def frontier(self) -> list:
        return [n for _, n in self.walk() if not n.children]

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.depth() for c in self.children)

    def __str__(self):
        return render_node(self)


def interior(label, *children, adjoinable=True):
    return TreeNode(label, INTERIOR, adjoinable, tuple(children))


def subst(label):
    return TreeNode(label, SUBST)


def foot(label):
    return TreeNode(label, FOOT)


def terminal(word):
    return TreeNode(word, TERMINAL)


@dataclass(frozen=True)
class ElementaryTree:
    name: str
    kind: str
    root: TreeNode
    anchor: Optional[str] = None
    family: Optional[str] = None
    template: Optional[str] = None

    def __post_init__(self):
        if self.kind not in (INITIAL, AUXILIARY):
            raise GrammarError("tree %s: kind must be initial or auxiliary" % self.name)
        if self.anchor is None:
            words = self.root.leaves()
            if len(words) == 1:
                object.__setattr__(self, "anchor", words[0])
        if self.template is None:
            object.__setattr__(self, "template", derive_template(self))

    @cached_property
    def nodes(self) -> dict:
        return dict(self.root.walk())

    @property
    def label(self):
        return self.root.label

    @cached_property
    def foot_address(self):
        feet = [a for a, n in self.nodes.items() if n.kind == FOOT]
        return feet[0] if len(feet) == 1 else None

    @cached_property
    def anchor_address(self):
        if self.anchor is None:
            return None
        hits = [a for a, n in self.nodes.items() if n.kind == TERMINAL and n.label == self.anchor]
        return hits[0] if len(hits) == 1 else None

    @cached_property
    def sites(self):
        return sites_of(self)

    @cached_property
    def n_terminals(self) -> int:
        return len(self.root.leaves())

    def problems(self) -> list:
        """Type-invariant violations of this tree, as messages."""
        out = []
        if self.root.kind != INTERIOR:
            out.append("tree %s: root must be an interior node" % self.name)
        feet = [(a, n) for a, n in self.nodes.items() if n.kind == FOOT]
        if self.kind == AUXILIARY:
            if len(feet) != 1:
                out.append("auxiliary tree %s has %d foot nodes (need exactly 1)" % (self.name, len(feet)))
            elif feet[0][1].label != self.root.label:
                out.append("auxiliary tree %s: foot label %s differs from root label %s"
                           % (self.name, feet[0][1].label, self.root.label))
        elif feet:
            out.append("initial tree %s contains a foot node" % self.name)
        if self.anchor is not None and self.anchor_address is None:
            out.append("tree %s: anchor %r must occur on exactly one terminal" % (self.name, self.anchor))
        for a, n in self.nodes.items():
            if n.kind == INTERIOR and not n.children:
                out.append("tree %s: interior node at %s has no children" % (self.name, format_address(a)))
        return out


def derive_template(tree: ElementaryTree) -> str:
    """Structural id of a tree with its anchor string erased."""
    anchor_at = None
    if tree.anchor is not None:
        hits = [a for a, n in tree.root.walk() if n.kind == TERMINAL and n.label == tree.anchor]
        if len(hits) == 1:
            anchor_at = hits[0]

    def erase(node, addr):
        if addr == anchor_at:
            return TreeNode("<>", TERMINAL)
        return TreeNode(node.label, node.kind, node.adjoinable,
                        tuple(erase(c, addr + (i,)) for i, c in enumerate(node.children, 1)))

    shape = "%s %s" % (tree.kind, render_node(erase(tree.root, ())))
    return "tpl_" + hashlib.sha1(shape.encode("utf-8")).hexdigest()[:10]


@dataclass(frozen=True)
class Grammar:
    trees: dict = field(default_factory=dict)
    start_symbol: str = "S"

    def __getitem__(self, name) -> ElementaryTree:
        return self.trees[name]

    def __contains__(self, name):
        return name in self.trees

    @cached_property
    def _by_root(self):
        index = {}
        for name in sorted(self.trees):
            t = self.trees[name]
            index.setdefault((t.kind, t.label), []).append(name)
        return index

    def initial_trees(self, label) -> list:
        """Names of initial trees rooted in ``label``, sorted."""
        return self._by_root.get((INITIAL, label), [])

    def auxiliary_trees(self, label) -> list:
        return self._by_root.get((AUXILIARY, label), [])

    def template_members(self, template) -> list:
        return sorted(n for n, t in self.trees.items() if t.template == template)

    def family_of(self, name) -> str:
        t = self.trees[name]
        return t.family if t.family is not None else name

    def family_members(self, family) -> list:
        return sorted(n for n in self.trees if self.family_of(n) == family)

    @cached_property
    def labels(self) -> set:
        out = {self.start_symbol}
        for t in self.trees.values():
            out.update(n.label for _, n in t.root.walk() if n.kind != TERMINAL)
        return out


def node_at(tree: ElementaryTree, addr) -> TreeNode:
    node = tree.root
    for i in addr:
        if not 1 <= i <= len(node.children):
            raise AddressError("tree %s has no node at %s" % (tree.name, format_address(addr)))
        node = node.children[i - 1]
    return node


def sites_of(tree: ElementaryTree):
    """(substitution sites, adjunction sites) as address-ordered (addr, label) lists."""
    subs, adjs = [], []
    for addr, node in tree.root.walk():
        if node.kind == SUBST:
            subs.append((addr, node.label))
        elif node.kind == INTERIOR and node.adjoinable:
            adjs.append((addr, node.label))
    return subs, adjs


def validate_grammar(g: Grammar) -> list:
    out = []
    for name in sorted(g.trees):
        t = g.trees[name]
        if t.name != name:
            out.append(Violation("error", "tree stored as %s is named %s" % (name, t.name)))
        if name == STOP:
            out.append(Violation("error", "%s is reserved and cannot name a tree" % STOP))
        out.extend(Violation("error", p) for p in t.problems())
    if not g.initial_trees(g.start_symbol):
        out.append(Violation("error", "no initial tree with start symbol %s" % g.start_symbol))
    shapes = {}
    for name in sorted(g.trees):
        t = g.trees[name]
        shape = derive_template(ElementaryTree(t.name, t.kind, t.root, t.anchor))
        prev = shapes.setdefault(t.template, (name, shape))
        if prev[1] != shape:
            out.append(Violation("error", "trees %s and %s share template %s but differ in structure"
                                 % (prev[0], name, t.template)))
    for name in sorted(g.trees):
        for addr, label in g.trees[name].sites[0]:
            if not g.initial_trees(label):
                out.append(Violation("warning", "substitution site %s@%s (%s) is unfillable: no initial %s tree"
                                     % (name, format_address(addr), label, label)))
    return out


# -- reading and writing ---------------------------------------------------

_TOKEN = re.compile(r'''
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<sym>[^\s()"\#]+)
''', re.VERBOSE)


class Token(NamedTuple):
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise GrammarError("unexpected character %r" % text[pos], line, col)
        kind = m.lastgroup
        if kind == "nl":
            toks.append(Token("nl", "\n", line, col))
            line, line_start = line + 1, m.end()
        elif kind == "str":
            toks.append(Token("str", _unescape(m.group()[1:-1]), line, col))
        elif kind in ("lp", "rp", "sym"):
            toks.append(Token(kind, m.group(), line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


def _unescape(s):
    return re.sub(r"\\(.)", r"\1", s)


def _escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


class _Reader:
    def __init__(self, toks):
        self.toks, self.i = toks, 0

    def peek(self, skip_nl=True):
        while skip_nl and self.toks[self.i].kind == "nl":
            self.i += 1
        return self.toks[self.i]

    def next(self, skip_nl=True):
        tok = self.peek(skip_nl)
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek(False)
        raise GrammarError(msg, tok.line, tok.col)


def _leaf(tok) -> TreeNode:
    if tok.kind == "str":
        return TreeNode(tok.value, TERMINAL)
    v = tok.value
    if v.endswith("!") and len(v) > 1:
        return TreeNode(v[:-1], SUBST)
    if v.endswith("*") and len(v) > 1:
        return TreeNode(v[:-1], FOOT)
    raise GrammarError("bare nonterminal leaf %r needs a marker (! or *)" % v, tok.line, tok.col)


def read_node(r: _Reader) -> TreeNode:
    tok = r.next()
    if tok.kind in ("str", "sym"):
        return _leaf(tok)
    if tok.kind != "lp":
        r.fail("expected '(' or a leaf, got %r" % tok.value, tok)
    head = r.next()
    if head.kind != "sym":
        r.fail("expected a node label after '('", head)
    label, adjoinable = head.value, True
    if label.endswith("^na"):
        label, adjoinable = label[:-3], False
    if not label or label[-1] in "!*":
        r.fail("bad interior label %r" % head.value, head)
    children = []
    while r.peek().kind != "rp":
        if r.peek().kind == "eof":
            r.fail("unbalanced parentheses")
        children.append(read_node(r))
    r.next()
    if not children:
        r.fail("interior node %r has no children" % label, head)
    return TreeNode(label, INTERIOR, adjoinable, tuple(children))


def parse_tree_text(text: str) -> TreeNode:
    """Parse one bracketed tree (grammar node syntax)."""
    r = _Reader(tokenize(text))
    node = read_node(r)
    if r.peek().kind != "eof":
        r.fail("trailing input after tree")
    return node


def parse_grammar(text: str) -> Grammar:
    r = _Reader(tokenize(text))
    start = "S"
    trees = {}
    seen_tree = False
    while True:
        tok = r.next()
        if tok.kind == "eof":
            break
        if tok.kind != "sym" or tok.value not in ("start", "tree"):
            r.fail("expected 'start' or 'tree', got %r" % tok.value, tok)
        fields = []
        while r.peek(False).kind not in ("nl", "eof"):
            fields.append(r.next(False))
        if tok.value == "start":
            if seen_tree:
                r.fail("'start' must precede all trees", tok)
            if len(fields) != 1 or fields[0].kind != "sym":
                r.fail("usage: start <symbol>", tok)
            start = fields[0].value
            continue
        seen_tree = True
        if len(fields) < 2 or fields[0].kind != "sym" or fields[1].kind != "sym":
            r.fail("usage: tree <name> <initial|auxiliary> [key=value ...]", tok)
        name, kind = fields[0].value, fields[1].value
        if kind not in (INITIAL, AUXILIARY):
            r.fail("tree kind must be initial or auxiliary, got %r" % kind, fields[1])
        if name in trees:
            r.fail("duplicate tree name %r" % name, fields[0])
        if name == STOP:
            r.fail("%s is reserved" % STOP, fields[0])
        attrs = {}
        rest = fields[2:]
        j = 0
        while j < len(rest):
            f = rest[j]
            if f.kind != "sym" or "=" not in f.value:
                r.fail("expected key=value attribute", f)
            key, value = f.value.split("=", 1)
            if value == "" and j + 1 < len(rest) and rest[j + 1].kind == "str":
                value = rest[j + 1].value
                j += 1
            if key not in ("anchor", "family", "template"):
                r.fail("unknown attribute %r" % key, f)
            attrs[key] = value
            j += 1
        body_tok = r.peek()
        root = read_node(r)
        try:
            t = ElementaryTree(name, kind, root, **attrs)
        except GrammarError as e:
            raise GrammarError(str(e), body_tok.line, body_tok.col) from None
        probs = t.problems()
        if probs:
            raise GrammarError(probs[0], body_tok.line, body_tok.col)
        trees[name] = t
    return Grammar(trees, start)


def render_node(node: TreeNode) -> str:
    if node.kind == TERMINAL:
        return '"%s"' % _escape(node.label)
    if node.kind == SUBST:
        return node.label + "!"
    if node.kind == FOOT:
        return node.label + "*"
    head = node.label if node.adjoinable else node.label + "^na"
    return "(%s %s)" % (head, " ".join(render_node(c) for c in node.children))


def render_grammar(g: Grammar) -> str:
    lines = ["start %s" % g.start_symbol]
    for name, t in g.trees.items():
        head = "tree %s %s" % (name, t.kind)
        if t.anchor is not None:
            head += ' anchor="%s"' % _escape(t.anchor) if re.search(r'[\s()"#]', t.anchor) \
                else " anchor=%s" % t.anchor
        if t.family is not None:
            head += " family=%s" % t.family
        head += " template=%s" % t.template
        lines.append(head)
        lines.append(render_node(t.root))
    return "\n".join(lines) + "\n"


def load_grammar(path) -> Grammar:
    with open(path, encoding="utf-8") as f:
        return parse_grammar(f.read())
