"""Valency tables compiled to structural-formula grammars.

Molecules are undirected diagrams with one rib (sort ``bond``) per unit of
bond multiplicity, so a double bond is two parallel ribs.  For valency n
and every way of writing n as a multiset of bond multiplicities (each at
most ``max_bond_multiplicity``) there is one neighbourhood: a center
labelled ``E<n>`` joined to one neighbour per part.  Neighbours carry
distinct wildcard variables ``ANY<i>`` so their elements are independent.

Generated ids: ``v<index>:center``, ``v<index>:nb<i>`` and ribs
``v<index>:b<i>.<m>`` (m-th rib to neighbour i).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from ..engine import Neighbourhood, NeighbourhoodGrammar
from ..errors import CompileError, FormatError
from ..graph import Diagram, Var

BOND = "bond"


@dataclass(frozen=True)
class ValencyTable:
    valency: Mapping[str, int] = field(default_factory=dict)
    max_bond_multiplicity: int = 3

    def __post_init__(self):
        object.__setattr__(self, "valency", dict(sorted(dict(self.valency).items())))
        if not self.valency:
            raise CompileError("empty valency table")
        for el, n in self.valency.items():
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise CompileError(f"valency of {el!r} must be a positive integer, got {n!r}")
        if self.max_bond_multiplicity < 1:
            raise CompileError("max_bond_multiplicity must be >= 1")


def partitions(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` into parts <= ``largest``, parts non-increasing,
    generated in reverse lexicographic order."""
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def class_var(n: int) -> str:
    return f"E{n}"


def wildcard_var(i: int) -> str:
    return f"ANY{i}"


def compile_valency(t: ValencyTable) -> NeighbourhoodGrammar:
    elements = frozenset(t.valency)
    valencies = sorted(set(t.valency.values()))
    max_parts = max(valencies)
    classes = {class_var(n): frozenset(e for e, v in t.valency.items() if v == n) for n in valencies}
    classes.update({wildcard_var(i): elements for i in range(1, max_parts + 1)})
    clash = set(classes) & elements
    if clash:
        raise CompileError(f"element names collide with variable names: {sorted(clash)}")

    out = []
    for n in valencies:
        # fewest neighbours first: {n} before {1, ..., 1}
        for parts in sorted(partitions(n, t.max_bond_multiplicity), key=lambda p: (len(p), [-x for x in p])):
            pre = f"v{len(out)}:"
            center = pre + "center"
            nodes = {center: Var(class_var(n))}
            ribs = []
            for i, mult in enumerate(parts, start=1):
                nb = f"{pre}nb{i}"
                nodes[nb] = Var(wildcard_var(i))
                ribs.extend((f"{pre}b{i}.{m}", center, nb, BOND) for m in range(1, mult + 1))
            d = Diagram.build(nodes, ribs, directed=False, alphabet=elements, sorts={BOND})
            out.append(Neighbourhood(d, center))
    return NeighbourhoodGrammar(
        directed=False, alphabet=elements, sorts=frozenset({BOND}),
        classes=classes, neighbourhoods=tuple(out))


def parse_valency(text: str) -> ValencyTable:
    """Read ``{"valency": {"H": 1, ...}, "max_bond_multiplicity": 3}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("valency"), dict):
        raise CompileError("valency file needs a 'valency' object mapping elements to integers")
    return ValencyTable(doc["valency"], doc.get("max_bond_multiplicity", 3))


def molecule(atoms: Mapping[str, str], bonds, elements=None) -> Diagram:
    """Build a molecule diagram from ``{atom id: element}`` and
    ``(a, b, multiplicity)`` bonds; rib ids are ``<a>-<b>.<m>``."""
    ribs = []
    for a, b, mult in bonds:
        a, b = sorted((a, b))
        ribs.extend((f"{a}-{b}.{m}", a, b, BOND) for m in range(1, mult + 1))
    alphabet = elements if elements is not None else set(atoms.values())
    return Diagram.build(dict(atoms), ribs, directed=False, alphabet=alphabet, sorts={BOND})
