"""Mini-Prolog programs compiled to neighbourhood grammars over their worlds.

A world is a directed diagram; a node labelled with a predicate name has a
rib of sort ``S<i>`` to the node of its i-th argument.  Constants get
one-node neighbourhoods with an open star (they may be argument of any
number of predicates); each fact and each rule gets a star-exact
neighbourhood centered on its (goal) predicate node.

Text format: clauses end with ``.``; lowercase-initial identifiers,
integers and single-quoted atoms are constants or predicate names,
uppercase- or underscore-initial identifiers are variables, ``%`` starts a
comment.

Generated ids: ``c<index>:const``; ``f<index>:pred``, ``f<index>:arg<i>``
(first position of each distinct term) and ribs ``f<index>:S<i>``;
``r<index>:goal``, ``r<index>:prem<j>``, ``r<index>:term:<name>`` and ribs
``r<index>:<node role>:S<i>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..engine import Neighbourhood, NeighbourhoodGrammar, StarPolicy
from ..errors import CompileError, FormatError
from ..graph import Diagram, Var, is_connected


@dataclass(frozen=True)
class Term:
    name: str
    is_var: bool = False

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.predicate}(" + ", ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Rule:
    goal: Atom
    premises: tuple[Atom, ...]

    def __str__(self) -> str:
        return f"{self.goal} :- " + ", ".join(map(str, self.premises)) + "."


def arg_sort(i: int) -> str:
    return f"S{i}"


@dataclass(frozen=True)
class PrologProgram:
    facts: tuple[Atom, ...] = ()
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        arity: dict[str, int] = {}
        for atom in self.atoms():
            prev = arity.setdefault(atom.predicate, len(atom.args))
            if prev != len(atom.args):
                raise CompileError(f"predicate {atom.predicate!r} used with arities {prev} and {len(atom.args)}")
        clash = set(arity) & set(self.constants())
        if clash:
            raise CompileError(f"names used both as predicate and constant: {sorted(clash)}")
        clash = (set(arity) | set(self.constants())) & set(self.variables())
        if clash:
            raise CompileError(f"names used both as variable and constant/predicate: {sorted(clash)}")

    def atoms(self):
        yield from self.facts
        for r in self.rules:
            yield r.goal
            yield from r.premises

    def _terms(self, var: bool) -> list[str]:
        seen: dict[str, None] = {}
        for atom in self.atoms():
            for t in atom.args:
                if t.is_var == var:
                    seen.setdefault(t.name)
        return list(seen)

    def constants(self) -> list[str]:
        """Constants in order of first appearance."""
        return self._terms(False)

    def variables(self) -> list[str]:
        return self._terms(True)

    def predicates(self) -> list[str]:
        return list(dict.fromkeys(a.predicate for a in self.atoms()))

    @property
    def max_arity(self) -> int:
        return max((len(a.args) for a in self.atoms()), default=0)


_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<punct>[(),.])
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_]*|-?\d+)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
""", re.VERBOSE)


def _tokenize(text: str, source: str | None):
    pos, line, line_start = 0, 1, 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"unexpected character {text[pos]!r}", line=line,
                              column=pos - line_start + 1, source=source)
        kind = m.lastgroup
        val = m.group()
        col = pos - line_start + 1
        if kind != "ws":
            if kind == "quoted":
                val = re.sub(r"\\(.)", r"\1", val[1:-1])
                if not val:
                    raise FormatError("empty quoted atom", line=line, column=col, source=source)
                kind = "atom"
            out.append((kind, val, line, col))
        nl = val.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    out.append(("eof", "", line, pos - line_start + 1))
    return out


def parse_prolog(text: str, source: str | None = None) -> PrologProgram:
    tokens = _tokenize(text, source)
    i = 0

    def err(msg, tok):
        raise FormatError(msg, line=tok[2], column=tok[3], source=source)

    def expect(kind, what=None):
        nonlocal i
        tok = tokens[i]
        if tok[0] != kind or (what is not None and tok[1] != what):
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            err(f"expected {what or kind}, found {found}", tok)
        i += 1
        return tok

    def atom() -> Atom:
        nonlocal i
        name = expect("atom")[1]
        expect("punct", "(")
        args = []
        while True:
            tok = tokens[i]
            if tok[0] == "var":
                args.append(Term(tok[1], True))
            elif tok[0] == "atom":
                args.append(Term(tok[1]))
            else:
                err(f"expected an argument, found {tok[1]!r}" if tok[0] != "eof"
                    else "expected an argument, found end of input", tok)
            i += 1
            tok = tokens[i]
            if tok[0] == "punct" and tok[1] == ",":
                i += 1
                continue
            expect("punct", ")")
            return Atom(name, tuple(args))

    facts, rules = [], []
    while tokens[i][0] != "eof":
        head = atom()
        tok = tokens[i]
        if tok[0] == "neck":
            i += 1
            premises = [atom()]
            while tokens[i][0] == "punct" and tokens[i][1] == ",":
                i += 1
                premises.append(atom())
            expect("punct", ".")
            rules.append(Rule(head, tuple(premises)))
        else:
            expect("punct", ".")
            facts.append(head)
    try:
        return PrologProgram(tuple(facts), tuple(rules))
    except CompileError as exc:
        raise FormatError(str(exc), source=source) from None


def _label(t: Term):
    return Var(t.name) if t.is_var else t.name


def compile_prolog(p: PrologProgram) -> NeighbourhoodGrammar:
    constants = p.constants()
    variables = p.variables()
    if variables and not constants:
        raise CompileError("program has variables but no constants to range over")
    alphabet = frozenset(constants) | frozenset(p.predicates())
    sorts = frozenset(arg_sort(i) for i in range(1, p.max_arity + 1))
    out: list[Neighbourhood] = []

    def diagram(nodes, ribs):
        return Diagram.build(nodes, ribs, directed=True, alphabet=alphabet, sorts=sorts)

    for c in constants:
        nid = f"c{len(out)}:const"
        out.append(Neighbourhood(diagram({nid: c}, ()), nid, StarPolicy.OPEN))

    for fact in p.facts:
        pre = f"f{len(out)}:"
        center = pre + "pred"
        nodes = {center: fact.predicate}
        ribs = []
        term_node: dict[Term, str] = {}
        for i, t in enumerate(fact.args, start=1):
            if t not in term_node:
                term_node[t] = f"{pre}arg{i}"
                nodes[term_node[t]] = _label(t)
            ribs.append((f"{pre}{arg_sort(i)}", center, term_node[t], arg_sort(i)))
        out.append(Neighbourhood(diagram(nodes, ribs), center))

    for rule in p.rules:
        pre = f"r{len(out)}:"
        center = pre + "goal"
        nodes = {center: rule.goal.predicate}
        ribs = []
        term_node: dict[Term, str] = {}
        roles = [("goal", rule.goal)] + [(f"prem{j}", a) for j, a in enumerate(rule.premises, start=1)]
        for role, atom in roles:
            pid = pre + role
            nodes[pid] = atom.predicate
            for i, t in enumerate(atom.args, start=1):
                if t not in term_node:
                    term_node[t] = f"{pre}term:{t.name}"
                    nodes[term_node[t]] = _label(t)
                ribs.append((f"{pre}{role}:{arg_sort(i)}", pid, term_node[t], arg_sort(i)))
        d = diagram(nodes, ribs)
        if not is_connected(d):
            raise CompileError(f"rule {rule} shares no terms between some of its predicates")
        out.append(Neighbourhood(d, center))

    return NeighbourhoodGrammar(
        directed=True, alphabet=alphabet, sorts=sorts,
        classes={x: frozenset(constants) for x in variables},
        neighbourhoods=tuple(out))
