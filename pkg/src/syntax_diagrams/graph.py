"""Many-sorted multigraphs and syntax diagrams.

A :class:`Multigraph` holds nodes and identity-bearing ribs, so parallel
ribs with equal endpoints and sort coexist.  A :class:`Diagram` adds a
total labelling of nodes by alphabet symbols or :class:`Var` variables.

Construction never rejects malformed input; :func:`validate_diagram`
reports every broken invariant as data.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import UnknownNodeError

__all__ = [
    "Var", "Label", "Rib", "Multigraph", "Diagram", "Violation",
    "ValidationReport", "validate_diagram", "is_connected", "star",
    "ribs_between", "label_name",
]


@dataclass(frozen=True, order=True)
class Var:
    """A variable label; it stands for any symbol of its class."""

    name: str

    def __str__(self) -> str:
        return self.name


Label = Union[str, Var]


def label_name(label: Label) -> str:
    return label.name if isinstance(label, Var) else label


@dataclass(frozen=True)
class Rib:
    id: str
    src: str
    dst: str
    sort: str

    @property
    def ends(self) -> tuple[str, str]:
        return (self.src, self.dst)

    def touches(self, node: str) -> bool:
        return node == self.src or node == self.dst


def _as_rib(r) -> Rib:
    if isinstance(r, Rib):
        return r
    rid, src, dst, sort = r
    return Rib(rid, src, dst, sort)


@dataclass(frozen=True)
class Multigraph:
    """Nodes, ribs and sorts.  Undirected ribs are stored with the smaller
    node id as ``src``; ribs are kept sorted by id."""

    directed: bool
    nodes: frozenset[str] = frozenset()
    ribs: tuple[Rib, ...] = ()
    sorts: frozenset[str] = frozenset()

    def __post_init__(self):
        ribs = [_as_rib(r) for r in self.ribs]
        if not self.directed:
            ribs = [Rib(r.id, r.dst, r.src, r.sort) if r.dst < r.src else r
                    for r in ribs]
        ribs.sort(key=lambda r: r.id)
        object.__setattr__(self, "ribs", tuple(ribs))
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "sorts", frozenset(self.sorts))

    @cached_property
    def rib_index(self) -> Mapping[str, Rib]:
        return MappingProxyType({r.id: r for r in self.ribs})

    def rib(self, rid: str) -> Rib:
        return self.rib_index[rid]

    @cached_property
    def incident(self) -> Mapping[str, tuple[str, ...]]:
        """node -> ids of ribs touching it, sorted."""
        inc: dict[str, list[str]] = {v: [] for v in self.nodes}
        for r in self.ribs:
            for end in {r.src, r.dst}:
                inc.setdefault(end, []).append(r.id)
        return MappingProxyType({v: tuple(ids) for v, ids in inc.items()})

    @cached_property
    def pair_index(self) -> Mapping[tuple[str, str], Mapping[str, tuple[str, ...]]]:
        """(a, b) -> sort -> rib ids from a to b.  Undirected graphs list
        every rib under both orders."""
        idx: dict[tuple[str, str], dict[str, list[str]]] = {}
        for r in self.ribs:
            keys = [(r.src, r.dst)] if self.directed else [(r.src, r.dst), (r.dst, r.src)]
            for key in keys:
                idx.setdefault(key, {}).setdefault(r.sort, []).append(r.id)
        return MappingProxyType({
            k: MappingProxyType({s: tuple(ids) for s, ids in v.items()})
            for k, v in idx.items()
        })

    @cached_property
    def neighbours(self) -> Mapping[str, tuple[str, ...]]:
        """Adjacency ignoring orientation and sort."""
        adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        for r in self.ribs:
            if r.src != r.dst:
                adj.setdefault(r.src, set()).add(r.dst)
                adj.setdefault(r.dst, set()).add(r.src)
        return MappingProxyType({v: tuple(sorted(ns)) for v, ns in adj.items()})

    @cached_property
    def signatures(self) -> Mapping[str, Counter]:
        """node -> Counter of (sort, direction) over incident ribs, where
        direction is ``"out"``/``"in"`` for directed graphs, ``"-"`` otherwise."""
        sig: dict[str, Counter] = {v: Counter() for v in self.nodes}
        for r in self.ribs:
            if self.directed:
                sig.setdefault(r.src, Counter())[(r.sort, "out")] += 1
                sig.setdefault(r.dst, Counter())[(r.sort, "in")] += 1
            else:
                sig.setdefault(r.src, Counter())[(r.sort, "-")] += 1
                sig.setdefault(r.dst, Counter())[(r.sort, "-")] += 1
        return MappingProxyType(sig)

    @cached_property
    def signature_keys(self) -> Mapping[str, tuple]:
        """Hashable, sorted form of :attr:`signatures` for equality tests."""
        return MappingProxyType({v: tuple(sorted(c.items())) for v, c in self.signatures.items()})

    def degree(self, node: str) -> int:
        return len(self.incident.get(node, ()))


@dataclass(frozen=True)
class Diagram:
    """A multigraph whose nodes carry symbol or variable labels.

    ``alphabet`` is the symbol set the diagram is drawn over; symbol labels
    must belong to it.  Use :meth:`build` for literal construction.
    """

    graph: Multigraph
    labels: Mapping[str, Label] = field(default_factory=dict)
    alphabet: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "labels", MappingProxyType(dict(self.labels)))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return (self.graph == other.graph and self.alphabet == other.alphabet
                and dict(self.labels) == dict(other.labels))

    def __hash__(self):
        return hash((self.graph, self.alphabet, tuple(sorted(self.labels.items(), key=lambda kv: kv[0]))))

    @classmethod
    def build(cls, nodes: Mapping[str, Label], ribs: Iterable = (), *,
              directed: bool = False, alphabet: Iterable[str] | None = None,
              sorts: Iterable[str] | None = None) -> "Diagram":
        """Build from ``{node: label}`` and ``(id, src, dst, sort)`` tuples.

        Alphabet and sorts default to exactly those used.
        """
        ribs = [_as_rib(r) for r in ribs]
        if alphabet is None:
            alphabet = {lab for lab in nodes.values() if not isinstance(lab, Var)}
        if sorts is None:
            sorts = {r.sort for r in ribs}
        g = Multigraph(directed, frozenset(nodes), tuple(ribs), frozenset(sorts))
        return cls(g, dict(nodes), frozenset(alphabet))

    @property
    def directed(self) -> bool:
        return self.graph.directed

    @property
    def nodes(self) -> frozenset[str]:
        return self.graph.nodes

    @property
    def ribs(self) -> tuple[Rib, ...]:
        return self.graph.ribs

    def label(self, node: str) -> Label:
        try:
            return self.labels[node]
        except KeyError:
            raise UnknownNodeError(node) from None

    @cached_property
    def unlabeled(self) -> frozenset[str]:
        return self.graph.nodes - set(self.labels)

    @cached_property
    def variables(self) -> frozenset[str]:
        return frozenset(lab.name for lab in self.labels.values() if isinstance(lab, Var))

    @cached_property
    def is_ground(self) -> bool:
        return not any(isinstance(lab, Var) for lab in self.labels.values())

    def __len__(self) -> int:
        return len(self.graph.nodes)


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} ({self.subject}): {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _components(g: Multigraph) -> list[list[str]]:
    seen: set[str] = set()
    comps = []
    for start in sorted(g.nodes):
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in g.neighbours.get(v, ()):
                if w in g.nodes and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Multigraph | Diagram) -> bool:
    """True iff every pair of nodes is joined by a path, orientation and
    sort ignored.  Graphs with fewer than two nodes are connected."""
    g = _graph(g)
    return len(_components(g)) <= 1


def validate_diagram(d: Diagram) -> ValidationReport:
    g = d.graph
    out: list[Violation] = []
    seen_ids: set[str] = set()
    for v in sorted(g.nodes):
        if not v:
            out.append(Violation("empty identifier", "node", "node id is empty"))
    for r in g.ribs:
        if not r.id:
            out.append(Violation("empty identifier", "rib", "rib id is empty"))
        if r.id in seen_ids:
            out.append(Violation("duplicate rib id", r.id, f"rib id {r.id!r} used more than once"))
        seen_ids.add(r.id)
        if r.src == r.dst:
            out.append(Violation("loop forbidden", r.id, f"rib {r.id!r} joins node {r.src!r} to itself"))
        for end in (r.src, r.dst):
            if end not in g.nodes:
                out.append(Violation("unknown endpoint", r.id, f"rib {r.id!r} refers to unknown node {end!r}"))
        if r.sort not in g.sorts:
            out.append(Violation("undeclared sort", r.id, f"rib {r.id!r} has undeclared sort {r.sort!r}"))
    for v in sorted(g.nodes - set(d.labels)):
        out.append(Violation("unlabeled node", v, f"node {v!r} has no label"))
    for v in sorted(set(d.labels) - g.nodes):
        out.append(Violation("unknown labeled node", v, f"label given for unknown node {v!r}"))
    for v in sorted(d.labels):
        lab = d.labels[v]
        if isinstance(lab, Var):
            if lab.name in d.alphabet:
                out.append(Violation("variable shadows symbol", v,
                                     f"variable {lab.name!r} is also an alphabet symbol"))
        elif lab not in d.alphabet:
            out.append(Violation("unknown symbol", v, f"label {lab!r} of node {v!r} is not in the alphabet"))
    comps = _components(g)
    if len(comps) > 1:
        desc = " | ".join(",".join(c) for c in comps)
        out.append(Violation("not connected", "graph", f"{len(comps)} components: {desc}"))
    return ValidationReport(tuple(out))


def _graph(x) -> Multigraph:
    return x.graph if isinstance(x, Diagram) else x


def _require(g: Multigraph, *nodes: str) -> None:
    for v in nodes:
        if v not in g.nodes:
            raise UnknownNodeError(v)


def star(d: Diagram | Multigraph, v: str) -> frozenset[str]:
    """Ids of all ribs incident to ``v``, incoming and outgoing alike."""
    g = _graph(d)
    _require(g, v)
    return frozenset(g.incident.get(v, ()))


def ribs_between(g: Multigraph | Diagram, v1: str, v2: str,
                 sort: str | None = None) -> frozenset[str]:
    """Ribs joining ``v1`` and ``v2``; in directed graphs only those
    running from ``v1`` to ``v2``."""
    g = _graph(g)
    _require(g, v1, v2)
    by_sort = g.pair_index.get((v1, v2), {})
    if sort is not None:
        return frozenset(by_sort.get(sort, ()))
    return frozenset(rid for ids in by_sort.values() for rid in ids)
