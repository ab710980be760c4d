"""String neighbourhood grammars compiled to chain diagrams.

A string neighbourhood is a short symbol string with one marked center and
an optional ``#`` boundary at either end, written with the center in
brackets: ``#[a]b`` is an ``a`` that starts the chain and is followed by
``b``.  Chains become directed diagrams whose ribs (sort ``next``) run from
each symbol to its predecessor.

Generated neighbourhood ids: ``w<index>:p<position>`` for nodes and
``w<index>:r<position>`` for the rib leaving that position.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..engine import Chain, Neighbourhood, NeighbourhoodGrammar
from ..errors import CompileError
from ..graph import Diagram

NEXT = "next"
BOUNDARY = "#"


@dataclass(frozen=True)
class StringNeighbourhood:
    tokens: tuple[str, ...]
    center: int

    @classmethod
    def parse(cls, text: str) -> "StringNeighbourhood":
        """Parse ``#[a]b`` style notation; whitespace-separated tokens are
        used when the text contains spaces (``# [ab] cd``)."""
        if any(ch.isspace() for ch in text.strip()):
            raw = text.split()
        else:
            raw, i = [], 0
            while i < len(text):
                if text[i] == "[":
                    j = text.find("]", i)
                    if j < 0:
                        raise CompileError(f"unclosed '[' in {text!r}")
                    raw.append(text[i:j + 1])
                    i = j + 1
                else:
                    raw.append(text[i])
                    i += 1
        centers = [k for k, tok in enumerate(raw) if tok.startswith("[") and tok.endswith("]")]
        if len(centers) != 1:
            raise CompileError(f"{text!r}: exactly one bracketed center required")
        k = centers[0]
        tokens = list(raw)
        tokens[k] = tokens[k][1:-1]
        if not tokens[k]:
            raise CompileError(f"{text!r}: empty center")
        return cls(tuple(tokens), k)

    def __str__(self) -> str:
        toks = [f"[{t}]" if i == self.center else t for i, t in enumerate(self.tokens)]
        sep = " " if any(len(t) > 1 for t in self.tokens) else ""
        return sep.join(toks)

    @property
    def symbol(self) -> str:
        return self.tokens[self.center]


@dataclass(frozen=True)
class StringGrammarSpec:
    alphabet: frozenset[str]
    neighbourhoods: Mapping[str, tuple[StringNeighbourhood, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "neighbourhoods", {
            a: tuple(StringNeighbourhood.parse(n) if isinstance(n, str) else n for n in ns)
            for a, ns in dict(self.neighbourhoods).items()})


def _validate(spec: StringGrammarSpec) -> None:
    if BOUNDARY in spec.alphabet:
        raise CompileError(f"{BOUNDARY!r} is reserved as the boundary marker")
    for a, ns in spec.neighbourhoods.items():
        if a not in spec.alphabet:
            raise CompileError(f"neighbourhoods given for unknown symbol {a!r}")
        for n in ns:
            toks, c = n.tokens, n.center
            if not 0 <= c < len(toks):
                raise CompileError(f"{n}: center outside the string")
            if toks[c] == BOUNDARY:
                raise CompileError(f"{n}: center on the boundary marker")
            if toks[c] != a:
                raise CompileError(f"{n}: center is {toks[c]!r}, listed under {a!r}")
            for i, t in enumerate(toks):
                if t == BOUNDARY:
                    if 0 < i < len(toks) - 1:
                        raise CompileError(f"{n}: boundary marker inside the string")
                elif t not in spec.alphabet:
                    raise CompileError(f"{n}: unknown symbol {t!r}")
            if c == 0:
                raise CompileError(f"{n}: left context unspecified (add a symbol or '#')")
            if c == len(toks) - 1:
                raise CompileError(f"{n}: right context unspecified (add a symbol or '#')")


def chain_diagram(symbols: Sequence[str], alphabet: Iterable[str],
                  node_id: str = "n{}", rib_id: str = "r{}") -> Diagram:
    ids = [node_id.format(i) for i in range(len(symbols))]
    nodes = dict(zip(ids, symbols))
    ribs = [(rib_id.format(i), ids[i], ids[i - 1], NEXT) for i in range(1, len(ids))]
    return Diagram.build(nodes, ribs, directed=True, alphabet=alphabet, sorts={NEXT})


def tokenize_chain(s: str | Sequence[str]) -> list[str]:
    if isinstance(s, str):
        return s.split() if any(ch.isspace() for ch in s.strip()) else list(s)
    return list(s)


def chain_to_diagram(s: str | Sequence[str], alphabet: Iterable[str]) -> Diagram:
    """Diagram of a symbol chain: nodes ``n0..`` and ribs ``r<i>`` from
    position ``i`` to position ``i-1``."""
    alphabet = frozenset(alphabet)
    symbols = tokenize_chain(s)
    if not symbols:
        raise CompileError("empty chain")
    for sym in symbols:
        if sym not in alphabet:
            raise CompileError(f"unknown symbol {sym!r}")
    return chain_diagram(symbols, alphabet)


def compile_string_grammar(spec: StringGrammarSpec) -> NeighbourhoodGrammar:
    _validate(spec)
    neighbourhoods = []
    for a in sorted(spec.neighbourhoods):
        for n in spec.neighbourhoods[a]:
            if not any(t != BOUNDARY for t in n.tokens):
                raise CompileError(f"{n}: empty neighbourhood")
            kept = [(i, t) for i, t in enumerate(n.tokens) if t != BOUNDARY]
            center = next(j for j, (i, _) in enumerate(kept) if i == n.center)
            prefix = f"w{len(neighbourhoods)}:"
            d = chain_diagram([t for _, t in kept], spec.alphabet,
                              prefix + "p{}", prefix + "r{}")
            neighbourhoods.append(Neighbourhood(d, f"{prefix}p{center}"))
    return NeighbourhoodGrammar(
        directed=True, alphabet=spec.alphabet, sorts=frozenset({NEXT}),
        neighbourhoods=tuple(neighbourhoods), restrictions=(Chain(NEXT),))


def parse_string_spec(doc: Mapping) -> StringGrammarSpec:
    """Build a spec from ``{"alphabet": [...], "neighbourhoods": {sym: [text, ...]}}``."""
    try:
        alphabet = doc["alphabet"]
        raw = doc["neighbourhoods"]
    except (KeyError, TypeError) as exc:
        raise CompileError(f"string grammar spec needs 'alphabet' and 'neighbourhoods': {exc}") from None
    if not isinstance(raw, Mapping):
        raise CompileError("'neighbourhoods' must map symbols to lists of strings")
    return StringGrammarSpec(frozenset(alphabet), {a: tuple(ns) for a, ns in raw.items()})
