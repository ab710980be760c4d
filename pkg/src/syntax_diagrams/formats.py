"""JSON file formats for diagrams, grammars and check reports.

Every document is written canonically: sorted keys, id-sorted node and rib
lists, two-space indentation, UTF-8, trailing newline.  Neighbourhood and
restriction lists keep their declaration order because it is meaningful.
``load(save(x)) == x`` for every supported value.

Diagram document::

    {"directed": false, "sorts": ["bond"], "alphabet": ["H", "O"],
     "nodes": [{"id": "o", "label": "O"}, ...],
     "ribs": [{"id": "r1", "from": "h1", "to": "o", "sort": "bond"}, ...]}

A diagram used as a match pattern may add ``"variables": {name: [symbols]}``.

Grammar document: ``directed``, ``sorts``, ``alphabet``, ``variables``
(name -> symbol list, or ``"*"`` for the whole alphabet),
``neighbourhoods`` (list of ``{center, star_policy, nodes, ribs}``) and
``restrictions`` (list of records tagged by ``kind``: ``chain``,
``ordered_tree``, ``degree``).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .engine import (Chain, CheckReport, Degree, Neighbourhood, NeighbourhoodGrammar,
                     OrderedTree, RestrictionViolation, StarPolicy, UncoveredNode, WitnessEntry)
from .errors import FormatError, GrammarError, InvalidDiagramError
from .graph import Diagram, Multigraph, Rib, Var, validate_diagram
from .matcher import InclusionMapping

WILDCARD = "*"


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str, source: str | None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, line=exc.lineno, column=exc.colno, source=source) from None


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


class _Doc:
    """Typed field access with error messages naming the field path."""

    def __init__(self, source: str | None):
        self.source = source

    def fail(self, path: str, message: str):
        raise FormatError(message, field=path, source=self.source)

    def get(self, obj, key: str, kind, path: str, default=...):
        if not isinstance(obj, dict):
            self.fail(path, "expected an object")
        if key not in obj:
            if default is ...:
                self.fail(f"{path}.{key}" if path else key, "missing field")
            return default
        val = obj[key]
        if kind is not None and not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
            name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            self.fail(f"{path}.{key}" if path else key, f"expected {name}, got {type(val).__name__}")
        return val

    def strings(self, obj, key: str, path: str, default=...) -> list[str]:
        val = self.get(obj, key, list, path, default)
        for i, s in enumerate(val):
            if not isinstance(s, str):
                self.fail(f"{path}.{key}[{i}]" if path else f"{key}[{i}]", "expected a string")
        return val


# diagrams ------------------------------------------------------------------

def _nodes_doc(d: Diagram) -> list[dict]:
    return [{"id": v, "label": str(d.labels[v])} for v in sorted(d.nodes)]


def _ribs_doc(d: Diagram) -> list[dict]:
    return [{"id": r.id, "from": r.src, "to": r.dst, "sort": r.sort} for r in d.ribs]


def diagram_to_doc(d: Diagram, classes: Mapping[str, frozenset] | None = None) -> dict:
    doc = {
        "directed": d.directed,
        "sorts": sorted(d.graph.sorts),
        "alphabet": sorted(d.alphabet),
        "nodes": _nodes_doc(d),
        "ribs": _ribs_doc(d),
    }
    if classes:
        doc["variables"] = {x: sorted(s) for x, s in sorted(classes.items())}
    return doc


def _graph_parts(doc: dict, p: _Doc, path: str, variables):
    nodes: dict[str, Any] = {}
    for i, n in enumerate(p.get(doc, "nodes", list, path)):
        where = f"{path}.nodes[{i}]" if path else f"nodes[{i}]"
        nid = p.get(n, "id", str, where)
        label = p.get(n, "label", str, where)
        if nid in nodes:
            p.fail(where, f"duplicate node id {nid!r}")
        nodes[nid] = Var(label) if label in variables else label
    ribs = []
    for i, r in enumerate(p.get(doc, "ribs", list, path)):
        where = f"{path}.ribs[{i}]" if path else f"ribs[{i}]"
        ribs.append(Rib(p.get(r, "id", str, where), p.get(r, "from", str, where),
                        p.get(r, "to", str, where), p.get(r, "sort", str, where)))
    return nodes, ribs


def diagram_from_doc(doc, source: str | None = None, *, with_classes: bool = False):
    p = _Doc(source)
    directed = p.get(doc, "directed", bool, "")
    sorts = p.strings(doc, "sorts", "")
    alphabet = p.strings(doc, "alphabet", "")
    raw_vars = p.get(doc, "variables", dict, "", {})
    classes = {}
    for x, members in raw_vars.items():
        if members == WILDCARD:
            classes[x] = frozenset(alphabet)
        else:
            classes[x] = frozenset(p.strings(raw_vars, x, "variables"))
    nodes, ribs = _graph_parts(doc, p, "", classes)
    d = Diagram(Multigraph(directed, frozenset(nodes), tuple(ribs), frozenset(sorts)),
                nodes, frozenset(alphabet))
    report = validate_diagram(d)
    if not report.ok:
        raise InvalidDiagramError(report.violations, context=source or "diagram")
    return (d, classes) if with_classes else d


def dumps_diagram(d: Diagram, classes=None) -> str:
    return canonical_json(diagram_to_doc(d, classes))


def loads_diagram(text: str, source: str | None = None) -> Diagram:
    return diagram_from_doc(parse_json(text, source), source)


def load_diagram(path) -> Diagram:
    return loads_diagram(_read(path), str(path))


def load_pattern(path) -> tuple[Diagram, dict[str, frozenset[str]]]:
    """Load a diagram file that may declare variables; returns the diagram
    and its variable classes."""
    return diagram_from_doc(parse_json(_read(path), str(path)), str(path), with_classes=True)


def save_diagram(d: Diagram, path, classes=None) -> None:
    _write(path, dumps_diagram(d, classes))


# grammars ------------------------------------------------------------------

def _restriction_doc(r) -> dict:
    if isinstance(r, Chain):
        return {"kind": "chain", "sort": r.sort}
    if isinstance(r, OrderedTree):
        return {"kind": "ordered_tree", "parent_sort": r.parent_sort, "sibling_sort": r.sibling_sort,
                "terminal_symbols": sorted(r.terminals)}
    if isinstance(r, Degree):
        return {"kind": "degree",
                "symbols": WILDCARD if r.symbols is None else sorted(r.symbols),
                "sort": WILDCARD if r.sort is None else r.sort,
                "direction": r.direction, "min": r.min, "max": r.max}
    raise TypeError(f"unknown restriction {r!r}")


def _restriction_from_doc(doc, p: _Doc, path: str):
    kind = p.get(doc, "kind", str, path)
    if kind == "chain":
        return Chain(p.get(doc, "sort", str, path))
    if kind == "ordered_tree":
        return OrderedTree(p.get(doc, "parent_sort", str, path), p.get(doc, "sibling_sort", str, path),
                           frozenset(p.strings(doc, "terminal_symbols", path)))
    if kind == "degree":
        syms = p.get(doc, "symbols", (list, str), path, WILDCARD)
        if syms == WILDCARD:
            syms = None
        elif isinstance(syms, str):
            p.fail(f"{path}.symbols", "expected a list or '*'")
        else:
            syms = frozenset(p.strings(doc, "symbols", path))
        sort = p.get(doc, "sort", str, path, WILDCARD)
        return Degree(syms, None if sort == WILDCARD else sort,
                      p.get(doc, "direction", str, path, "any"),
                      p.get(doc, "min", int, path, 0),
                      p.get(doc, "max", (int, type(None)), path, None))
    p.fail(f"{path}.kind", f"unknown restriction kind {kind!r}")


def grammar_to_doc(g: NeighbourhoodGrammar) -> dict:
    variables = {}
    for x, members in g.classes.items():
        variables[x] = WILDCARD if members == g.alphabet else sorted(members)
    return {
        "directed": g.directed,
        "sorts": sorted(g.sorts),
        "alphabet": sorted(g.alphabet),
        "variables": variables,
        "neighbourhoods": [
            {"center": n.center, "star_policy": n.star_policy.value,
             "nodes": _nodes_doc(n.diagram), "ribs": _ribs_doc(n.diagram)}
            for n in g.neighbourhoods
        ],
        "restrictions": [_restriction_doc(r) for r in g.restrictions],
    }


def grammar_from_doc(doc, source: str | None = None) -> NeighbourhoodGrammar:
    p = _Doc(source)
    directed = p.get(doc, "directed", bool, "")
    sorts = frozenset(p.strings(doc, "sorts", ""))
    alphabet = frozenset(p.strings(doc, "alphabet", ""))
    raw_vars = p.get(doc, "variables", dict, "", {})
    classes = {}
    for x, members in raw_vars.items():
        classes[x] = alphabet if members == WILDCARD else frozenset(p.strings(raw_vars, x, "variables"))
    neighbourhoods = []
    for i, n in enumerate(p.get(doc, "neighbourhoods", list, "")):
        where = f"neighbourhoods[{i}]"
        policy = p.get(n, "star_policy", str, where, StarPolicy.EXACT.value)
        if policy not in {s.value for s in StarPolicy}:
            p.fail(f"{where}.star_policy", f"unknown star policy {policy!r}")
        nodes, ribs = _graph_parts(n, p, where, classes)
        d = Diagram(Multigraph(directed, frozenset(nodes), tuple(ribs), sorts), nodes, alphabet)
        neighbourhoods.append(Neighbourhood(d, p.get(n, "center", str, where), StarPolicy(policy)))
    restrictions = [_restriction_from_doc(r, p, f"restrictions[{i}]")
                    for i, r in enumerate(p.get(doc, "restrictions", list, "", []))]
    try:
        return NeighbourhoodGrammar(directed, alphabet, sorts, classes, tuple(neighbourhoods),
                                    tuple(restrictions))
    except GrammarError as exc:
        raise GrammarError(f"{source}: {exc}" if source else str(exc)) from None


def dumps_grammar(g: NeighbourhoodGrammar) -> str:
    return canonical_json(grammar_to_doc(g))


def loads_grammar(text: str, source: str | None = None) -> NeighbourhoodGrammar:
    return grammar_from_doc(parse_json(text, source), source)


def load_grammar(path) -> NeighbourhoodGrammar:
    return loads_grammar(_read(path), str(path))


def save_grammar(g: NeighbourhoodGrammar, path) -> None:
    _write(path, dumps_grammar(g))


# reports -------------------------------------------------------------------

def mapping_to_doc(m: InclusionMapping) -> dict:
    return {"node_map": m.node_map, "rib_map": m.rib_map, "binding": m.binding}


def report_to_doc(r: CheckReport) -> dict:
    doc = {
        "correct": r.correct,
        "restriction_violations": [
            {"restriction": v.restriction, "kind": v.kind, "node": v.node, "message": v.message}
            for v in r.restriction_violations
        ],
        "uncovered_nodes": [{"node": u.node, "tried": u.tried} for u in r.uncovered_nodes],
        "witness": None if r.witness is None else {
            v: {"neighbourhood": e.neighbourhood, **mapping_to_doc(e.mapping)}
            for v, e in r.witness.items()
        },
    }
    if r.witness_counts is not None:
        doc["witness_counts"] = dict(r.witness_counts)
    return doc


def report_from_doc(doc, source: str | None = None) -> CheckReport:
    p = _Doc(source)
    violations = []
    for i, v in enumerate(p.get(doc, "restriction_violations", list, "")):
        where = f"restriction_violations[{i}]"
        violations.append(RestrictionViolation(
            p.get(v, "restriction", int, where), p.get(v, "kind", str, where),
            p.get(v, "node", (str, type(None)), where), p.get(v, "message", str, where)))
    uncovered = []
    for i, u in enumerate(p.get(doc, "uncovered_nodes", list, "")):
        where = f"uncovered_nodes[{i}]"
        uncovered.append(UncoveredNode(p.get(u, "node", str, where), p.get(u, "tried", int, where)))
    raw = p.get(doc, "witness", (dict, type(None)), "")
    witness = None
    if raw is not None:
        witness = {}
        for v, e in sorted(raw.items()):
            where = f"witness.{v}"
            witness[v] = WitnessEntry(
                p.get(e, "neighbourhood", int, where),
                InclusionMapping.from_maps(p.get(e, "node_map", dict, where),
                                           p.get(e, "rib_map", dict, where),
                                           p.get(e, "binding", dict, where, {})))
    counts = p.get(doc, "witness_counts", (dict, type(None)), "", None)
    return CheckReport(p.get(doc, "correct", bool, ""), tuple(violations), tuple(uncovered),
                       witness, counts)


def dumps_report(r: CheckReport) -> str:
    return canonical_json(report_to_doc(r))


def loads_report(text: str, source: str | None = None) -> CheckReport:
    return report_from_doc(parse_json(text, source), source)


def load_report(path) -> CheckReport:
    return loads_report(_read(path), str(path))


def save_report(r: CheckReport, path) -> None:
    _write(path, dumps_report(r))


def render_text(r: CheckReport) -> str:
    lines = [f"correct: {'yes' if r.correct else 'no'}"]
    for v in r.restriction_violations:
        lines.append(f"restriction violation {v}")
    for u in r.uncovered_nodes:
        lines.append(f"uncovered: {u.node} (tried {u.tried} neighbourhood{'s' if u.tried != 1 else ''})")
    if r.witness:
        for v, e in r.witness.items():
            nm = ", ".join(f"{a}->{b}" for a, b in e.mapping.nodes)
            count = f" [{r.witness_counts[v]} witnesses]" if r.witness_counts and v in r.witness_counts else ""
            lines.append(f"covered: {v} by neighbourhood {e.neighbourhood}{count}: {nm}")
    return "\n".join(lines) + "\n"
