"""Inclusion mappings (subdiagram embeddings) between diagrams.

The search is an anchored backtracking over pattern nodes in a
connectivity-respecting order.  Candidates are pruned by label or
variable class, by the (sort, direction) multiset of incident ribs, and by
the rib counts required towards already placed neighbours.  Once all nodes
are placed, parallel ribs are assigned injectively group by group, where a
group is the set of pattern ribs sharing endpoints, orientation and sort.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations, product
from typing import Iterator, Mapping

from .errors import MatchQueryError
from .graph import Diagram, Var, star

__all__ = [
    "StarPolicy", "InclusionMapping", "MatchQuery", "enumerate_inclusions", "inclusions",
    "star_exact_embeddings", "has_star_exact_embedding",
]


class StarPolicy(str, Enum):
    EXACT = "exact"
    OPEN = "open"


@dataclass(frozen=True)
class InclusionMapping:
    """Injective node and rib maps plus the variable binding they imply.

    Stored as sorted item tuples so mappings hash and compare by value.
    """

    nodes: tuple[tuple[str, str], ...] = ()
    ribs: tuple[tuple[str, str], ...] = ()
    bindings: tuple[tuple[str, str], ...] = ()

    @classmethod
    def from_maps(cls, node_map: Mapping[str, str], rib_map: Mapping[str, str],
                  binding: Mapping[str, str] | None = None) -> "InclusionMapping":
        return cls(tuple(sorted(node_map.items())), tuple(sorted(rib_map.items())),
                   tuple(sorted((binding or {}).items())))

    @property
    def node_map(self) -> dict[str, str]:
        return dict(self.nodes)

    @property
    def rib_map(self) -> dict[str, str]:
        return dict(self.ribs)

    @property
    def binding(self) -> dict[str, str]:
        return dict(self.bindings)

    def sort_key(self):
        return (tuple(t for _, t in self.nodes), tuple(t for _, t in self.ribs))


@dataclass(frozen=True)
class MatchQuery:
    pattern: Diagram
    target: Diagram
    anchor: tuple[str, str] | None = None
    star_exact_at: str | None = None
    classes: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def check(self) -> None:
        p, t = self.pattern, self.target
        if p.directed != t.directed:
            raise MatchQueryError("pattern and target differ in directedness")
        for d, role in ((p, "pattern"), (t, "target")):
            missing = d.unlabeled
            if missing:
                raise MatchQueryError(f"{role} nodes without labels: {sorted(missing)}")
        if not t.is_ground:
            raise MatchQueryError("target diagram contains variable labels")
        for name in p.variables:
            if name not in self.classes:
                raise MatchQueryError(f"variable {name!r} has no class")
        if self.anchor is not None:
            pa, ta = self.anchor
            if pa not in p.nodes:
                raise MatchQueryError(f"anchor node {pa!r} not in pattern")
            if ta not in t.nodes:
                raise MatchQueryError(f"anchor node {ta!r} not in target")
        if self.star_exact_at is not None and self.star_exact_at not in p.nodes:
            raise MatchQueryError(f"star-exact node {self.star_exact_at!r} not in pattern")


def _order(pattern: Diagram, first: str | None) -> list[str]:
    g = pattern.graph
    remaining = set(g.nodes)
    order: list[str] = []
    placed: set[str] = set()

    def pick_start():
        return min(remaining, key=lambda v: (-g.degree(v), v))

    while remaining:
        if first is not None and not order:
            nxt = first
        else:
            frontier = [v for v in remaining if any(w in placed for w in g.neighbours.get(v, ()))]
            if frontier:
                nxt = min(frontier, key=lambda v: (
                    -sum(1 for w in g.neighbours.get(v, ()) if w in placed), -g.degree(v), v))
            else:
                nxt = pick_start()
        order.append(nxt)
        placed.add(nxt)
        remaining.discard(nxt)
    return order


def _rib_groups(pattern: Diagram) -> dict[tuple[str, str, str], list[str]]:
    groups: dict[tuple[str, str, str], list[str]] = {}
    for r in pattern.ribs:
        groups.setdefault((r.src, r.dst, r.sort), []).append(r.id)
    return groups


class _Plan:
    """Pattern-side search data; depends only on the pattern and the node
    placed first, so it is cached on the pattern diagram."""

    __slots__ = ("order", "back_items", "groups", "neighbours_placed")

    def __init__(self, pattern: Diagram, first: str | None):
        pg = pattern.graph
        self.order = _order(pattern, first)
        position = {v: i for i, v in enumerate(self.order)}
        # ribs towards earlier-placed nodes: (earlier node, pattern node is src, sort) -> count
        back: dict[str, dict[tuple[str, bool, str], int]] = {v: {} for v in self.order}
        for r in pg.ribs:
            a, b = r.src, r.dst
            if position[a] > position[b]:
                key = (b, True, r.sort)
                back[a][key] = back[a].get(key, 0) + 1
            else:
                key = (a, False, r.sort)
                back[b][key] = back[b].get(key, 0) + 1
        self.back_items = [sorted(back[v].items()) for v in self.order]
        # one earlier-placed neighbour per node, if any, to draw candidates from
        self.neighbours_placed = [
            next((w for w in pg.neighbours.get(v, ()) if position[w] < i), None)
            for i, v in enumerate(self.order)]
        self.groups = sorted(_rib_groups(pattern).items())


def _plan(pattern: Diagram, first: str | None) -> _Plan:
    cache = pattern.__dict__.setdefault("_match_plans", {})
    plan = cache.get(first)
    if plan is None:
        plan = cache[first] = _Plan(pattern, first)
    return plan


def _search(q: MatchQuery, limit: int | None = None) -> Iterator[InclusionMapping]:
    """Yield matching mappings in search order (not canonical order)."""
    p, t = q.pattern, q.target
    pg, tg = p.graph, t.graph
    classes = q.classes
    anchor_p, anchor_t = q.anchor if q.anchor else (None, None)
    exact = q.star_exact_at

    if len(pg.nodes) > len(tg.nodes) or len(pg.ribs) > len(tg.ribs):
        return
    if exact is not None and anchor_p == exact and pg.signature_keys[exact] != tg.signature_keys[anchor_t]:
        return

    plan = _plan(p, anchor_p if anchor_p is not None else exact)
    order = plan.order
    back_items = plan.back_items
    groups = plan.groups

    p_sig = pg.signatures
    t_sig = tg.signatures
    pair = tg.pair_index
    t_nodes_sorted = sorted(tg.nodes)
    t_adj = tg.neighbours

    def sig_ok(pv: str, tv: str) -> bool:
        ps, ts = p_sig.get(pv), t_sig.get(tv)
        if pv == exact:
            return pg.signature_keys[pv] == tg.signature_keys[tv]
        for key, n in ps.items():
            if ts.get(key, 0) < n:
                return False
        return True

    node_map: dict[str, str] = {}
    used: set[str] = set()
    binding: dict[str, str] = {}
    produced = 0

    def rib_assignments():
        choices = []
        for (a, b, sort), prib in groups:
            cands = pair.get((node_map[a], node_map[b]), {}).get(sort, ())
            if len(cands) < len(prib):
                return
            choices.append((prib, list(permutations(cands, len(prib)))))
        pids = [rid for prib, _ in choices for rid in prib]
        for combo in product(*(opts for _, opts in choices)):
            targets = [tid for part in combo for tid in part]
            yield dict(zip(pids, targets))

    def extend(i: int):
        nonlocal produced
        if i == len(order):
            for rmap in rib_assignments():
                if exact is not None:
                    image_star = {rmap[rid] for rid in pg.incident.get(exact, ())}
                    if image_star != set(tg.incident.get(node_map[exact], ())):
                        continue
                yield InclusionMapping.from_maps(node_map, rmap, binding)
                produced += 1
                if limit is not None and produced >= limit:
                    return
            return
        pv = order[i]
        lab = p.labels[pv]
        if pv == anchor_p:
            cands = [anchor_t] if anchor_t not in used else []
        else:
            nb = plan.neighbours_placed[i]
            if nb is not None:
                cands = [c for c in t_adj.get(node_map[nb], ()) if c not in used]
            else:
                cands = [c for c in t_nodes_sorted if c not in used]
        for tv in cands:
            tlab = t.labels[tv]
            fresh_var = None
            if isinstance(lab, Var):
                bound = binding.get(lab.name)
                if bound is None:
                    if tlab not in classes[lab.name]:
                        continue
                    fresh_var = lab.name
                elif bound != tlab:
                    continue
            elif lab != tlab:
                continue
            if not sig_ok(pv, tv):
                continue
            ok = True
            for (w, pv_is_src, sort), n in back_items[i]:
                key = (tv, node_map[w]) if pv_is_src else (node_map[w], tv)
                if len(pair.get(key, {}).get(sort, ())) < n:
                    ok = False
                    break
            if not ok:
                continue
            node_map[pv] = tv
            used.add(tv)
            if fresh_var is not None:
                binding[fresh_var] = tlab
            yield from extend(i + 1)
            if fresh_var is not None:
                del binding[fresh_var]
            used.discard(tv)
            del node_map[pv]
            if limit is not None and produced >= limit:
                return

    yield from extend(0)


def enumerate_inclusions(q: MatchQuery) -> list[InclusionMapping]:
    """All inclusion mappings of ``q.pattern`` into ``q.target``, in
    canonical order (target ids listed by sorted pattern node id, then by
    sorted pattern rib id).  The empty pattern has exactly one mapping."""
    q.check()
    return sorted(_search(q), key=InclusionMapping.sort_key)


def inclusions(pattern: Diagram, target: Diagram, *, anchor: tuple[str, str] | None = None,
               star_exact_at: str | None = None,
               classes: Mapping[str, frozenset[str]] | None = None) -> list[InclusionMapping]:
    return enumerate_inclusions(MatchQuery(pattern, target, anchor, star_exact_at, dict(classes or {})))


def _neighbourhood_query(n, d: Diagram, v: str, classes) -> MatchQuery:
    exact_at = n.center if n.star_policy is StarPolicy.EXACT else None
    return MatchQuery(n.diagram, d, (n.center, v), exact_at, dict(classes or {}))


def star_exact_embeddings(n, d: Diagram, v: str, classes=None) -> list[InclusionMapping]:
    """Embeddings of neighbourhood ``n`` sending its center to ``v``.

    Under the exact policy the center's star must map onto the whole star
    of ``v``; the open policy waives that.
    """
    star(d, v)  # raises on unknown node
    return enumerate_inclusions(_neighbourhood_query(n, d, v, classes))


def has_star_exact_embedding(n, d: Diagram, v: str, classes=None) -> bool:
    q = _neighbourhood_query(n, d, v, classes)
    q.check()
    return next(_search(q, limit=1), None) is not None


def count_star_exact_embeddings(n, d: Diagram, v: str, classes=None, cap: int | None = None) -> int:
    q = _neighbourhood_query(n, d, v, classes)
    q.check()
    return sum(1 for _ in _search(q, limit=cap))
