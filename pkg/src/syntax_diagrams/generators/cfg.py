"""Context-free grammars compiled to derivation-tree neighbourhood grammars.

Trees are directed diagrams with two sorts: ``S_P`` ribs run from a parent
to each child and ``S_L`` ribs from each child to its previous sibling.

Neighbourhoods, all star-exact:

* every terminal occurrence in a rule gets the rule's one-level bush,
  centered on that occurrence;
* every nonterminal occurrence ``B`` in a rule, combined with every rule
  for ``B``, gets the bush with the ``B`` node expanded by the second rule,
  centered on the ``B`` node (an internal node needs both its parent and its
  children in its star);
* every rule of the start symbol gets its bush centered on the top node.

Generated ids: ``<kind><index>:top``, ``:c<k>`` and ``:c<k>.<m>`` for nodes,
``:P:<child>`` / ``:L:<child>`` for parent and sibling ribs, where kind is
``t`` (terminal), ``n`` (internal nonterminal) or ``s`` (start root).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from ..engine import Neighbourhood, NeighbourhoodGrammar, OrderedTree
from ..errors import CompileError, FormatError
from ..graph import Diagram

PARENT = "S_P"
SIBLING = "S_L"


@dataclass(frozen=True)
class Cfg:
    nonterminals: frozenset[str]
    terminals: frozenset[str]
    rules: tuple[tuple[str, tuple[str, ...]], ...]
    start: str

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", frozenset(self.nonterminals))
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        object.__setattr__(self, "rules", tuple((lhs, tuple(rhs)) for lhs, rhs in self.rules))
        both = self.nonterminals & self.terminals
        if both:
            raise CompileError(f"symbols both terminal and nonterminal: {sorted(both)}")
        if self.start not in self.nonterminals:
            raise CompileError(f"start symbol {self.start!r} is not a nonterminal")
        symbols = self.nonterminals | self.terminals
        for lhs, rhs in self.rules:
            if lhs not in self.nonterminals:
                raise CompileError(f"rule head {lhs!r} is not a nonterminal")
            if not rhs:
                raise CompileError(f"epsilon production for {lhs!r} is not supported")
            for sym in rhs:
                if sym not in symbols:
                    raise CompileError(f"rule {lhs} -> {' '.join(rhs)}: unknown symbol {sym!r}")
        heads = {lhs for lhs, _ in self.rules}
        useless = self.nonterminals - heads
        if useless:
            raise CompileError(f"nonterminals without rules: {sorted(useless)}")

    @property
    def alphabet(self) -> frozenset[str]:
        return self.nonterminals | self.terminals

    def rules_for(self, nt: str) -> list[tuple[str, tuple[str, ...]]]:
        return [r for r in self.rules if r[0] == nt]


_COMMENT = re.compile(r"#.*$")


def parse_cfg(text: str, source: str | None = None) -> Cfg:
    """Parse ``LHS -> X1 X2 ... Xn`` lines, ``|`` separating alternatives
    and ``#`` starting a comment.  The first head is the start symbol;
    symbols never used as a head are terminals."""
    rules: list[tuple[str, tuple[str, ...]]] = []
    positions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw)
        if not line.strip():
            continue
        if "->" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise FormatError("expected 'LHS -> symbols'", line=lineno, column=col, source=source)
        head, _, body = line.partition("->")
        head_toks = head.split()
        if len(head_toks) != 1:
            raise FormatError("rule head must be a single symbol", line=lineno, column=1, source=source)
        body_col = len(head) + 3
        for alt in body.split("|"):
            rhs = tuple(alt.split())
            if not rhs:
                raise FormatError(f"epsilon production for {head_toks[0]!r} is not supported",
                                  line=lineno, column=body_col, source=source)
            rules.append((head_toks[0], rhs))
            positions.append(lineno)
            body_col += len(alt) + 1
    if not rules:
        raise FormatError("no rules", line=1, column=1, source=source)
    heads = []
    for lhs, _ in rules:
        if lhs not in heads:
            heads.append(lhs)
    nonterminals = frozenset(heads)
    terminals = frozenset(s for _, rhs in rules for s in rhs) - nonterminals
    return Cfg(nonterminals, terminals, tuple(rules), heads[0])


def _bush(prefix: str, top: str, lhs: str, rhs: Sequence[str]):
    """Nodes and ribs of one rule: ``top`` labelled ``lhs`` with children
    ``<top>.<k>`` (``c<k>`` under the root role)."""
    base = "c" if top == f"{prefix}top" else top[len(prefix):] + "."
    nodes = {top: lhs}
    ribs = []
    prev = None
    for k, sym in enumerate(rhs, start=1):
        cid = f"{prefix}{base}{k}"
        nodes[cid] = sym
        ribs.append((f"{prefix}P:{cid[len(prefix):]}", top, cid, PARENT))
        if prev is not None:
            ribs.append((f"{prefix}L:{cid[len(prefix):]}", cid, prev, SIBLING))
        prev = cid
    return nodes, ribs


def compile_cfg(g: Cfg) -> NeighbourhoodGrammar:
    alphabet = g.alphabet
    sorts = frozenset({PARENT, SIBLING})
    out: list[Neighbourhood] = []

    def add(kind: str, build):
        prefix = f"{kind}{len(out)}:"
        nodes, ribs, center = build(prefix)
        d = Diagram.build(nodes, ribs, directed=True, alphabet=alphabet, sorts=sorts)
        out.append(Neighbourhood(d, center))

    for lhs, rhs in g.rules:
        for k, sym in enumerate(rhs, start=1):
            if sym in g.terminals:
                def build(prefix, lhs=lhs, rhs=rhs, k=k):
                    nodes, ribs = _bush(prefix, f"{prefix}top", lhs, rhs)
                    return nodes, ribs, f"{prefix}c{k}"
                add("t", build)
            else:
                for _, rhs2 in g.rules_for(sym):
                    def build(prefix, lhs=lhs, rhs=rhs, k=k, sym=sym, rhs2=rhs2):
                        nodes, ribs = _bush(prefix, f"{prefix}top", lhs, rhs)
                        center = f"{prefix}c{k}"
                        n2, r2 = _bush(prefix, center, sym, rhs2)
                        nodes.update(n2)
                        return nodes, ribs + r2, center
                    add("n", build)
    for lhs, rhs in g.rules_for(g.start):
        def build(prefix, lhs=lhs, rhs=rhs):
            nodes, ribs = _bush(prefix, f"{prefix}top", lhs, rhs)
            return nodes, ribs, f"{prefix}top"
        add("s", build)

    return NeighbourhoodGrammar(
        directed=True, alphabet=alphabet, sorts=sorts, neighbourhoods=tuple(out),
        restrictions=(OrderedTree(PARENT, SIBLING, g.terminals),))


class Tree(NamedTuple):
    label: str
    children: tuple["Tree", ...] = ()

    def __str__(self) -> str:
        if not self.children:
            return f"({self.label})"
        return f"({self.label} " + " ".join(map(str, self.children)) + ")"


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^()\s]+))")


def parse_tree(text: str) -> Tree:
    """Parse ``(Label child ...)``; a bare label is a leaf."""
    pos = 0
    tokens = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise FormatError(f"unexpected character {text[pos:].strip()[0]!r}", column=pos + 1)
            break
        kind = "(" if m.group(1) else ")" if m.group(2) else "label"
        start = m.start(m.lastindex)
        tokens.append((kind, m.group(m.lastindex), start + 1))
        pos = m.end()

    i = 0

    def node() -> Tree:
        nonlocal i
        if i >= len(tokens):
            raise FormatError("unexpected end of tree text", column=len(text) + 1)
        kind, val, col = tokens[i]
        if kind == "label":
            i += 1
            return Tree(val)
        if kind == ")":
            raise FormatError("unexpected ')'", column=col)
        i += 1
        if i >= len(tokens) or tokens[i][0] != "label":
            raise FormatError("expected a label after '('", column=col + 1)
        label = tokens[i][1]
        i += 1
        kids = []
        while True:
            if i >= len(tokens):
                raise FormatError("unclosed '('", column=col)
            if tokens[i][0] == ")":
                i += 1
                return Tree(label, tuple(kids))
            kids.append(node())

    t = node()
    if i != len(tokens):
        raise FormatError("trailing input after tree", column=tokens[i][2])
    return t


def tree_to_diagram(t: str | Tree, g: Cfg | Iterable[str]) -> Diagram:
    """Preorder node ids ``n<i>``; ``p<i>`` is the parent rib into node i,
    ``l<i>`` the sibling rib from node i to its previous sibling."""
    if isinstance(t, str):
        t = parse_tree(t)
    alphabet = g.alphabet if isinstance(g, Cfg) else frozenset(g)
    nodes: dict[str, str] = {}
    ribs = []

    def walk(tree: Tree, parent: str | None, prev: str | None) -> str:
        if tree.label not in alphabet:
            raise CompileError(f"unknown tree label {tree.label!r}")
        nid = f"n{len(nodes)}"
        nodes[nid] = tree.label
        idx = nid[1:]
        if parent is not None:
            ribs.append((f"p{idx}", parent, nid, PARENT))
        if prev is not None:
            ribs.append((f"l{idx}", nid, prev, SIBLING))
        last = None
        for child in tree.children:
            last = walk(child, nid, last)
        return nid

    walk(t, None, None)
    return Diagram.build(nodes, ribs, directed=True, alphabet=alphabet, sorts={PARENT, SIBLING})
