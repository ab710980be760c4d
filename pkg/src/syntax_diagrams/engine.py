"""Neighbourhood grammars, global restrictions and the syntax-cover check.

A diagram is correct under a grammar when it satisfies every restriction
and each of its nodes admits a star-valid embedding of some neighbourhood
from the family of the node's symbol, with the neighbourhood center sent to
that node.  Nodes are independent of one another, so the per-node search
is exhaustive and its failure proves that no cover exists.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import GrammarError, InvalidDiagramError
from .graph import Diagram, Multigraph, Var, validate_diagram
from .matcher import (InclusionMapping, StarPolicy, _neighbourhood_query, _search,
                      star_exact_embeddings)

__all__ = [
    "StarPolicy", "Neighbourhood", "Chain", "OrderedTree", "Degree", "Restriction",
    "RestrictionViolation", "NeighbourhoodGrammar", "WitnessEntry", "CheckReport",
    "family_for_symbol", "check_restrictions", "covers_node", "check",
    "verify_witness", "expand_ground",
]


@dataclass(frozen=True)
class Neighbourhood:
    diagram: Diagram
    center: str
    star_policy: StarPolicy = StarPolicy.EXACT

    def __post_init__(self):
        object.__setattr__(self, "star_policy", StarPolicy(self.star_policy))

    @property
    def center_label(self):
        return self.diagram.labels.get(self.center)


@dataclass(frozen=True)
class RestrictionViolation:
    restriction: int
    kind: str
    node: str | None
    message: str

    def __str__(self) -> str:
        where = f" at {self.node}" if self.node is not None else ""
        return f"[{self.restriction}:{self.kind}]{where}: {self.message}"


def _in_out(d: Diagram, sort: str | None = None):
    """Per-node (incoming, outgoing) rib counts, optionally for one sort."""
    ins = {v: 0 for v in d.nodes}
    outs = {v: 0 for v in d.nodes}
    for r in d.ribs:
        if sort is not None and r.sort != sort:
            continue
        outs[r.src] += 1
        ins[r.dst] += 1
    return ins, outs


@dataclass(frozen=True)
class Chain:
    """The diagram is a linear chain over one sort, ribs running from each
    element to its predecessor."""

    sort: str
    kind = "chain"

    def sorts(self) -> set[str]:
        return {self.sort}

    def symbols_used(self) -> set[str]:
        return set()

    def violations(self, d: Diagram, index: int) -> list[RestrictionViolation]:
        if len(d.nodes) <= 1:
            return []
        out = []
        for r in d.ribs:
            if r.sort != self.sort:
                out.append(RestrictionViolation(index, self.kind, None,
                                                f"rib {r.id!r} has sort {r.sort!r}, expected {self.sort!r}"))
        ins, outs = _in_out(d)
        firsts = sorted(v for v in d.nodes if ins[v] == 1 and outs[v] == 0)
        lasts = sorted(v for v in d.nodes if ins[v] == 0 and outs[v] == 1)
        if len(firsts) != 1:
            out.append(RestrictionViolation(index, self.kind, None,
                                            f"expected one node with in=1,out=0, found {len(firsts)}: {firsts}"))
        if len(lasts) != 1:
            out.append(RestrictionViolation(index, self.kind, None,
                                            f"expected one node with in=0,out=1, found {len(lasts)}: {lasts}"))
        for v in sorted(d.nodes):
            if v in firsts or v in lasts:
                continue
            if ins[v] != 1 or outs[v] != 1:
                out.append(RestrictionViolation(index, self.kind, v,
                                                f"in={ins[v]},out={outs[v]}, expected in=1,out=1"))
        return out


@dataclass(frozen=True)
class OrderedTree:
    """Derivation-tree shape: parent ribs form a rooted tree, terminals are
    leaves, sibling ribs form at most a linear order per node."""

    parent_sort: str
    sibling_sort: str
    terminals: frozenset[str] = frozenset()
    kind = "ordered_tree"

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))

    def sorts(self) -> set[str]:
        return {self.parent_sort, self.sibling_sort}

    def symbols_used(self) -> set[str]:
        return set(self.terminals)

    def violations(self, d: Diagram, index: int) -> list[RestrictionViolation]:
        if not d.nodes:
            return []
        out = []
        p_in, p_out = _in_out(d, self.parent_sort)
        s_in, s_out = _in_out(d, self.sibling_sort)
        all_in, all_out = _in_out(d)
        roots = sorted(v for v in d.nodes if p_in[v] == 0)
        if len(roots) != 1:
            out.append(RestrictionViolation(index, self.kind, None,
                                            f"expected exactly one node without incoming {self.parent_sort} "
                                            f"rib, found {len(roots)}: {roots}"))
        sourceless = sorted(v for v in d.nodes if all_in[v] == 0)
        if len(sourceless) != 1:
            out.append(RestrictionViolation(index, self.kind, None,
                                            f"expected exactly one node without incoming ribs, "
                                            f"found {len(sourceless)}: {sourceless}"))
        for v in sorted(d.nodes):
            if p_in[v] > 1:
                out.append(RestrictionViolation(index, self.kind, v,
                                                f"{p_in[v]} incoming {self.parent_sort} ribs, at most one allowed"))
            if d.labels.get(v) in self.terminals:
                if p_out[v]:
                    out.append(RestrictionViolation(index, self.kind, v,
                                                    f"terminal node has outgoing {self.parent_sort} rib"))
                if all_out[v] > 1:
                    out.append(RestrictionViolation(index, self.kind, v,
                                                    f"terminal node has {all_out[v]} outgoing ribs"))
                elif all_out[v] == 1 and s_out[v] != 1:
                    out.append(RestrictionViolation(index, self.kind, v,
                                                    f"terminal node's outgoing rib is not {self.sibling_sort}"))
            if s_in[v] > 1 or s_out[v] > 1:
                out.append(RestrictionViolation(index, self.kind, v,
                                                f"{s_in[v]} incoming / {s_out[v]} outgoing "
                                                f"{self.sibling_sort} ribs, at most one each allowed"))
        return out


@dataclass(frozen=True)
class Degree:
    """Bounds on the number of matching ribs at every node passing the
    symbol filter.  ``None`` filters mean any; ``max=None`` is unbounded."""

    symbols: frozenset[str] | None = None
    sort: str | None = None
    direction: str = "any"
    min: int = 0
    max: int | None = None
    kind = "degree"

    def __post_init__(self):
        if self.symbols is not None:
            object.__setattr__(self, "symbols", frozenset(self.symbols))
        if self.direction not in ("in", "out", "any"):
            raise GrammarError(f"degree direction must be in/out/any, not {self.direction!r}")
        if self.min < 0 or (self.max is not None and self.max < self.min):
            raise GrammarError(f"bad degree bounds {self.min}..{self.max}")

    def sorts(self) -> set[str]:
        return {self.sort} if self.sort is not None else set()

    def symbols_used(self) -> set[str]:
        return set(self.symbols or ())

    def violations(self, d: Diagram, index: int) -> list[RestrictionViolation]:
        counts = {v: 0 for v in d.nodes}
        for r in d.ribs:
            if self.sort is not None and r.sort != self.sort:
                continue
            if not d.directed or self.direction == "any":
                counts[r.src] += 1
                counts[r.dst] += 1
            elif self.direction == "out":
                counts[r.src] += 1
            else:
                counts[r.dst] += 1
        out = []
        for v in sorted(d.nodes):
            if self.symbols is not None and d.labels.get(v) not in self.symbols:
                continue
            n = counts[v]
            if n < self.min or (self.max is not None and n > self.max):
                hi = "inf" if self.max is None else self.max
                out.append(RestrictionViolation(index, self.kind, v,
                                                f"{n} matching ribs, allowed {self.min}..{hi}"))
        return out


Restriction = Union[Chain, OrderedTree, Degree]




def _frozen_classes(classes) -> Mapping[str, frozenset[str]]:
    return MappingProxyType({k: frozenset(v) for k, v in sorted(dict(classes).items())})


@dataclass(frozen=True)
class NeighbourhoodGrammar:
    directed: bool
    alphabet: frozenset[str]
    sorts: frozenset[str]
    classes: Mapping[str, frozenset[str]] = field(default_factory=dict)
    neighbourhoods: tuple[Neighbourhood, ...] = ()
    restrictions: tuple[Restriction, ...] = ()

    def __post_init__(self):
        alphabet = frozenset(self.alphabet)
        sorts = frozenset(self.sorts)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "sorts", sorts)
        object.__setattr__(self, "classes", _frozen_classes(self.classes))
        object.__setattr__(self, "restrictions", tuple(self.restrictions))
        # Neighbourhood diagrams live over the grammar's alphabet and sorts.
        object.__setattr__(self, "neighbourhoods", tuple(
            replace(n, diagram=Diagram(
                Multigraph(n.diagram.directed, n.diagram.nodes, n.diagram.ribs, sorts),
                n.diagram.labels, alphabet))
            for n in self.neighbourhoods))
        self._validate()

    def __eq__(self, other):
        if not isinstance(other, NeighbourhoodGrammar):
            return NotImplemented
        return (self.directed == other.directed and self.alphabet == other.alphabet
                and self.sorts == other.sorts and dict(self.classes) == dict(other.classes)
                and self.neighbourhoods == other.neighbourhoods
                and self.restrictions == other.restrictions)

    __hash__ = None

    def _validate(self) -> None:
        for name, members in self.classes.items():
            if name in self.alphabet:
                raise GrammarError(f"variable {name!r} collides with an alphabet symbol")
            if not members:
                raise GrammarError(f"variable {name!r} has an empty class")
            stray = members - self.alphabet
            if stray:
                raise GrammarError(f"class of {name!r} has symbols outside the alphabet: {sorted(stray)}")
        for i, n in enumerate(self.neighbourhoods):
            d = n.diagram
            if d.directed != self.directed:
                raise GrammarError(f"neighbourhood {i}: directedness differs from the grammar")
            if not d.nodes:
                raise GrammarError(f"neighbourhood {i}: empty diagram")
            if n.center not in d.nodes:
                raise GrammarError(f"neighbourhood {i}: center {n.center!r} is not a node")
            for lab in d.labels.values():
                if isinstance(lab, Var) and lab.name not in self.classes:
                    raise GrammarError(f"neighbourhood {i}: undeclared variable {lab.name!r}")
            report = validate_diagram(d)
            if not report.ok:
                raise GrammarError(f"neighbourhood {i}: " + "; ".join(map(str, report.violations)))
        for i, r in enumerate(self.restrictions):
            bad_sorts = r.sorts() - self.sorts
            if bad_sorts:
                raise GrammarError(f"restriction {i}: undeclared sorts {sorted(bad_sorts)}")
            bad_syms = r.symbols_used() - self.alphabet
            if bad_syms:
                raise GrammarError(f"restriction {i}: undeclared symbols {sorted(bad_syms)}")

    @cached_property
    def _families(self) -> Mapping[str, tuple[tuple[int, Neighbourhood], ...]]:
        fam: dict[str, list] = {a: [] for a in self.alphabet}
        for i, n in enumerate(self.neighbourhoods):
            lab = n.center_label
            if isinstance(lab, Var):
                for a in sorted(self.classes[lab.name]):
                    fam[a].append((i, n))
            else:
                fam[lab].append((i, n))
        return MappingProxyType({a: tuple(sorted(v, key=lambda e: e[0])) for a, v in fam.items()})

    def family(self, symbol: str) -> tuple[tuple[int, Neighbourhood], ...]:
        """Indexed family for ``symbol``, in declaration order."""
        try:
            return self._families[symbol]
        except KeyError:
            raise GrammarError(f"symbol {symbol!r} is not in the grammar alphabet") from None

    @cached_property
    def _fit_cache(self) -> dict:
        return {}

    def candidates(self, symbol: str, signature: tuple) -> tuple[tuple[int, Neighbourhood], ...]:
        """Members of ``family(symbol)`` that can fit a node whose
        (sort, direction) signature key is ``signature``: open-policy
        neighbourhoods always, exact ones only with an equal center key."""
        key = (symbol, signature)
        hit = self._fit_cache.get(key)
        if hit is None:
            hit = tuple(e for e in self.family(symbol)
                        if e[1].star_policy is not StarPolicy.EXACT
                        or e[1].diagram.graph.signature_keys[e[1].center] == signature)
            self._fit_cache[key] = hit
        return hit

    def extend(self, neighbourhoods: Iterable[Neighbourhood]) -> "NeighbourhoodGrammar":
        return replace(self, neighbourhoods=self.neighbourhoods + tuple(neighbourhoods))


def family_for_symbol(g: NeighbourhoodGrammar, a: str) -> list[Neighbourhood]:
    return [n for _, n in g.family(a)]


def _require_checkable(g: NeighbourhoodGrammar, d: Diagram) -> None:
    if not d.is_ground:
        raise GrammarError("diagram under check contains variable labels")
    report = validate_diagram(d)
    if not report.ok:
        raise InvalidDiagramError(report.violations)
    if d.directed != g.directed:
        raise GrammarError("diagram and grammar differ in directedness")
    stray = (d.alphabet | set(d.labels.values())) - g.alphabet
    if stray:
        raise GrammarError(f"diagram uses symbols the grammar does not declare: {sorted(stray)}")
    stray = {r.sort for r in d.ribs} | set(d.graph.sorts)
    stray -= g.sorts
    if stray:
        raise GrammarError(f"diagram uses sorts the grammar does not declare: {sorted(stray)}")


def check_restrictions(g: NeighbourhoodGrammar, d: Diagram) -> list[RestrictionViolation]:
    out: list[RestrictionViolation] = []
    for i, r in enumerate(g.restrictions):
        out.extend(r.violations(d, i))
    return out


def covers_node(g: NeighbourhoodGrammar, d: Diagram, v: str) -> tuple[int, InclusionMapping] | None:
    """First witness at ``v`` in canonical order: family order, then
    embedding order.  ``None`` if no neighbourhood fits."""
    for i, n in g.candidates(d.label(v), d.graph.signature_keys[v]):
        found = star_exact_embeddings(n, d, v, g.classes)
        if found:
            return i, found[0]
    return None


@dataclass(frozen=True)
class WitnessEntry:
    neighbourhood: int
    mapping: InclusionMapping


@dataclass(frozen=True)
class UncoveredNode:
    node: str
    tried: int


@dataclass(frozen=True)
class CheckReport:
    correct: bool
    restriction_violations: tuple[RestrictionViolation, ...] = ()
    uncovered_nodes: tuple[UncoveredNode, ...] = ()
    witness: Mapping[str, WitnessEntry] | None = None
    witness_counts: Mapping[str, int] | None = None

    def __eq__(self, other):
        if not isinstance(other, CheckReport):
            return NotImplemented
        return (self.correct == other.correct
                and tuple(self.restriction_violations) == tuple(other.restriction_violations)
                and tuple(self.uncovered_nodes) == tuple(other.uncovered_nodes)
                and _plain(self.witness) == _plain(other.witness)
                and _plain(self.witness_counts) == _plain(other.witness_counts))

    __hash__ = None

    @property
    def uncovered(self) -> list[str]:
        return [u.node for u in self.uncovered_nodes]


def _plain(m):
    return None if m is None else dict(m)


def check(g: NeighbourhoodGrammar, d: Diagram, witnesses: int = 1) -> CheckReport:
    """Decide correctness of ground diagram ``d`` under ``g``.

    ``witnesses`` caps per-node witness counting: 0 reports correctness
    only, 1 (default) attaches the first witness per node, larger values
    also report how many witnesses each node has, up to the cap.
    """
    if witnesses < 0:
        raise ValueError("witnesses must be >= 0")
    _require_checkable(g, d)
    violations = check_restrictions(g, d)
    uncovered = []
    witness: dict[str, WitnessEntry] = {}
    counts: dict[str, int] = {}
    for v in sorted(d.nodes):
        family = g.family(d.label(v))
        fits = g.candidates(d.label(v), d.graph.signature_keys[v])
        if witnesses == 0:
            if not any(_has_embedding(n, d, v, g.classes) for _, n in fits):
                uncovered.append(UncoveredNode(v, len(family)))
            continue
        hit = covers_node(g, d, v)
        if hit is None:
            uncovered.append(UncoveredNode(v, len(family)))
            continue
        witness[v] = WitnessEntry(*hit)
        if witnesses > 1:
            total = 0
            for _, n in fits:
                q = _neighbourhood_query(n, d, v, g.classes)
                total += sum(1 for _ in _search(q, limit=witnesses - total))
                if total >= witnesses:
                    break
            counts[v] = total
    correct = not violations and not uncovered
    return CheckReport(
        correct=correct,
        restriction_violations=tuple(violations),
        uncovered_nodes=tuple(uncovered),
        witness=MappingProxyType(witness) if witnesses else None,
        witness_counts=MappingProxyType(counts) if witnesses > 1 else None,
    )


def _has_embedding(n, d, v, classes) -> bool:
    q = _neighbourhood_query(n, d, v, classes)
    q.check()
    return next(_search(q, limit=1), None) is not None


def verify_witness(g: NeighbourhoodGrammar, d: Diagram,
                   witness: Mapping[str, WitnessEntry]) -> list[str]:
    """Re-check a cover witness by direct inspection of its maps.

    Returns a list of problems; empty means the witness is a valid cover.
    Does not use the search, so it can audit search results.
    """
    problems = []
    for v in sorted(d.nodes):
        if v not in witness:
            problems.append(f"{v}: no witness entry")
    for v, entry in sorted(witness.items()):
        if v not in d.nodes:
            problems.append(f"{v}: not a node of the diagram")
            continue
        if not 0 <= entry.neighbourhood < len(g.neighbourhoods):
            problems.append(f"{v}: neighbourhood index {entry.neighbourhood} out of range")
            continue
        n = g.neighbourhoods[entry.neighbourhood]
        problems.extend(f"{v}: {p}" for p in _mapping_problems(g, n, d, v, entry.mapping))
    return problems


def _mapping_problems(g, n: Neighbourhood, d: Diagram, v: str, m: InclusionMapping) -> list[str]:
    out = []
    p = n.diagram
    nm, rm, binding = m.node_map, m.rib_map, m.binding
    if set(nm) != set(p.nodes):
        return ["node map does not cover the neighbourhood nodes"]
    if set(rm) != {r.id for r in p.ribs}:
        return ["rib map does not cover the neighbourhood ribs"]
    if len(set(nm.values())) != len(nm) or len(set(rm.values())) != len(rm):
        out.append("maps are not injective")
    if nm.get(n.center) != v:
        out.append("center is not mapped to the covered node")
    for pv, tv in nm.items():
        if tv not in d.nodes:
            out.append(f"node {pv} maps to unknown node {tv}")
            continue
        lab, tlab = p.labels[pv], d.labels[tv]
        if isinstance(lab, Var):
            if binding.get(lab.name) != tlab:
                out.append(f"variable {lab.name} at {pv} does not bind {tlab}")
            if tlab not in g.classes.get(lab.name, ()):
                out.append(f"{tlab} not in class of {lab.name}")
        elif lab != tlab:
            out.append(f"label mismatch at {pv}: {lab} vs {tlab}")
    for r in p.ribs:
        tid = rm[r.id]
        if tid not in d.graph.rib_index:
            out.append(f"rib {r.id} maps to unknown rib {tid}")
            continue
        tr = d.graph.rib(tid)
        if tr.sort != r.sort:
            out.append(f"sort mismatch at rib {r.id}")
        want = (nm[r.src], nm[r.dst])
        have = tr.ends
        if p.directed:
            ok = want == have
        else:
            ok = set(want) == set(have)
        if not ok:
            out.append(f"rib {r.id} endpoints incoherent")
    if n.star_policy is StarPolicy.EXACT:
        image = {rm[r.id] for r in p.ribs if r.touches(n.center)}
        if image != {r.id for r in d.ribs if r.touches(v)}:
            out.append("star of the center does not map onto the star of the node")
    return out


def expand_ground(g: NeighbourhoodGrammar) -> NeighbourhoodGrammar:
    """Equivalent grammar with every variable neighbourhood replaced by all
    of its ground instances (one per consistent substitution)."""
    out = []
    for n in g.neighbourhoods:
        names = sorted(n.diagram.variables)
        if not names:
            out.append(n)
            continue
        for values in itertools.product(*(sorted(g.classes[x]) for x in names)):
            sub = dict(zip(names, values))
            labels = {v: sub[lab.name] if isinstance(lab, Var) else lab
                      for v, lab in n.diagram.labels.items()}
            out.append(replace(n, diagram=Diagram(n.diagram.graph, labels, n.diagram.alphabet)))
    return replace(g, classes={}, neighbourhoods=tuple(out))
