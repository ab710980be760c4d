import random

import pytest

from syntax_diagrams import (Chain, Degree, Diagram, GrammarError, InvalidDiagramError, Neighbourhood,
                             NeighbourhoodGrammar, OrderedTree, StarPolicy, Var, check,
                             check_restrictions, covers_node, expand_ground, family_for_symbol,
                             verify_witness)
from syntax_diagrams.engine import WitnessEntry
from syntax_diagrams.generators import chain_to_diagram, molecule

from oracles import CLASSES, LETTERS, brute_correct, random_connected, random_grammar


def chain(s):
    return chain_to_diagram(s, "ab")


def nb(nodes, ribs, center, policy=StarPolicy.EXACT, directed=True):
    return Neighbourhood(Diagram.build(nodes, ribs, directed=directed), center, policy)


def grammar(neighbourhoods, **kw):
    kw.setdefault("directed", True)
    kw.setdefault("alphabet", {"a", "b"})
    kw.setdefault("sorts", {"next"})
    return NeighbourhoodGrammar(neighbourhoods=tuple(neighbourhoods), **kw)


def kinds(violations):
    return [v.kind for v in violations]


# restrictions --------------------------------------------------------------

@pytest.mark.parametrize("text, ok", [("a", True), ("ab", True), ("abba", True)])
def test_chain_accepts_chains(text, ok):
    g = grammar([], restrictions=(Chain("next"),))
    assert (check_restrictions(g, chain(text)) == []) == ok


def test_chain_rejects_branching_and_cycles():
    g = grammar([], restrictions=(Chain("next"),))
    fork = Diagram.build({"x": "a", "y": "b", "z": "b"},
                         [("r1", "y", "x", "next"), ("r2", "z", "x", "next")], directed=True)
    assert kinds(check_restrictions(g, fork)) and set(kinds(check_restrictions(g, fork))) == {"chain"}
    cycle = Diagram.build({"x": "a", "y": "b"},
                          [("r1", "y", "x", "next"), ("r2", "x", "y", "next")], directed=True)
    assert check_restrictions(g, cycle)


def test_degree_bounds():
    g = NeighbourhoodGrammar(directed=False, alphabet={"H", "O"}, sorts={"bond"},
                             restrictions=(Degree(symbols={"H"}, max=1),))
    water = molecule({"h1": "H", "o": "O", "h2": "H"}, [("h1", "o", 1), ("o", "h2", 1)])
    assert check_restrictions(g, water) == []
    hoh = molecule({"h1": "H", "o": "O", "h2": "H"}, [("h1", "o", 2), ("o", "h2", 1)])
    bad = check_restrictions(g, hoh)
    assert [(v.kind, v.node) for v in bad] == [("degree", "h1")]


def test_degree_direction():
    d = chain("aba")
    r = Degree(sort="next", direction="out", max=0, symbols={"a"})
    g = grammar([], restrictions=(r,))
    assert [v.node for v in check_restrictions(g, d)] == ["n2"]
    with pytest.raises(GrammarError):
        Degree(direction="sideways")
    with pytest.raises(GrammarError):
        Degree(min=3, max=1)


def test_ordered_tree_detects_two_roots():
    g = NeighbourhoodGrammar(directed=True, alphabet={"S", "a"}, sorts={"P", "L"},
                             restrictions=(OrderedTree("P", "L", {"a"}),))
    tree = Diagram.build({"r": "S", "x": "a", "y": "a"},
                         [("p1", "r", "x", "P"), ("p2", "r", "y", "P"), ("l", "y", "x", "L")],
                         directed=True)
    assert check_restrictions(g, tree) == []
    forest = Diagram.build({"r": "S", "x": "a", "y": "S"},
                           [("p1", "r", "x", "P"), ("l", "y", "x", "L")], directed=True)
    assert check_restrictions(g, forest)
    terminal_parent = Diagram.build({"r": "S", "x": "a", "y": "a"},
                                    [("p1", "r", "x", "P"), ("p2", "x", "y", "P")], directed=True)
    assert any(v.node == "x" for v in check_restrictions(g, terminal_parent))


# grammar invariants --------------------------------------------------------------

def test_grammar_rejects_bad_declarations():
    ab = nb({"a": "a", "b": "b"}, [("r", "b", "a", "next")], "a")
    with pytest.raises(GrammarError, match="collides"):
        grammar([ab], classes={"a": {"a"}})
    with pytest.raises(GrammarError, match="empty class"):
        grammar([ab], classes={"X": set()})
    with pytest.raises(GrammarError, match="outside the alphabet"):
        grammar([ab], classes={"X": {"q"}})
    with pytest.raises(GrammarError, match="undeclared variable"):
        grammar([nb({"x": Var("X")}, [], "x")])
    with pytest.raises(GrammarError, match="center"):
        grammar([nb({"a": "a"}, [], "zz")])
    with pytest.raises(GrammarError, match="directedness"):
        grammar([nb({"a": "a"}, [], "a", directed=False)])
    with pytest.raises(GrammarError, match="undeclared sorts"):
        grammar([], restrictions=(Chain("other"),))
    with pytest.raises(GrammarError):
        grammar([nb({"a": "a", "b": "a"}, [], "a")])  # disconnected


def test_family_lookup_and_extension():
    g = grammar([nb({"a": "a"}, [], "a"), nb({"x": Var("X")}, [], "x")], classes={"X": {"a", "b"}})
    assert len(family_for_symbol(g, "a")) == 2
    assert len(family_for_symbol(g, "b")) == 1
    with pytest.raises(GrammarError):
        g.family("q")
    g2 = g.extend([nb({"b": "b"}, [], "b")])
    assert len(family_for_symbol(g2, "b")) == 2
    assert len(family_for_symbol(g, "b")) == 1


# checking ---------------------------------------------------------------------

ABA_GRAMMAR = grammar([
    nb({"a": "a", "b": "b"}, [("r", "b", "a", "next")], "a"),
    nb({"b": "b", "a": "a"}, [("r", "a", "b", "next")], "a"),
    nb({"b1": "b", "a": "a", "b2": "b"}, [("r1", "a", "b1", "next"), ("r2", "b2", "a", "next")], "a"),
    nb({"a1": "a", "b": "b", "a2": "a"}, [("r1", "b", "a1", "next"), ("r2", "a2", "b", "next")], "b"),
], restrictions=(Chain("next"),))


def test_check_reports_first_uncovered_nodes():
    r = check(ABA_GRAMMAR, chain("abab"))
    assert not r.correct
    assert r.uncovered == ["n3"]
    assert r.uncovered_nodes[0].tried == 1
    assert set(r.witness) == {"n0", "n1", "n2"}
    assert check(ABA_GRAMMAR, chain("ababa")).correct


def test_witness_modes():
    r0 = check(ABA_GRAMMAR, chain("aba"), witnesses=0)
    assert r0.correct and r0.witness is None and r0.witness_counts is None
    r3 = check(ABA_GRAMMAR, chain("aba"), witnesses=3)
    assert dict(r3.witness_counts) == {"n0": 1, "n1": 1, "n2": 1}
    with pytest.raises(ValueError):
        check(ABA_GRAMMAR, chain("aba"), witnesses=-1)


def test_witness_counts_are_capped():
    d = Diagram.build({"c": "C", "o": "O"}, [("x", "c", "o", "bond"), ("y", "c", "o", "bond")])
    n = Neighbourhood(d, "c")
    g = NeighbourhoodGrammar(directed=False, alphabet={"C", "O"}, sorts={"bond"},
                             neighbourhoods=(n, Neighbourhood(d, "o")))
    r = check(g, d, witnesses=10)
    assert dict(r.witness_counts) == {"c": 2, "o": 2}
    assert dict(check(g, d, witnesses=2).witness_counts) == {"c": 2, "o": 2}


def test_check_refuses_unusable_input():
    with pytest.raises(GrammarError):
        check(ABA_GRAMMAR, Diagram.build({"x": Var("X")}, directed=True, alphabet={"a", "b"}))
    with pytest.raises(InvalidDiagramError):
        check(ABA_GRAMMAR, Diagram.build({"x": "a", "y": "b"}, directed=True))
    with pytest.raises(GrammarError, match="directedness"):
        check(ABA_GRAMMAR, Diagram.build({"x": "a"}, directed=False))
    with pytest.raises(GrammarError, match="symbols"):
        check(ABA_GRAMMAR, Diagram.build({"x": "c"}, directed=True))


def test_covers_node_returns_declaration_order_witness():
    i, m = covers_node(ABA_GRAMMAR, chain("aba"), "n1")
    assert i == 3 and m.node_map["a1"] == "n0"
    assert covers_node(ABA_GRAMMAR, chain("abab"), "n3") is None


def test_verify_witness_detects_tampering():
    d = chain("ababa")
    r = check(ABA_GRAMMAR, d)
    assert verify_witness(ABA_GRAMMAR, d, r.witness) == []
    w = dict(r.witness)
    del w["n0"]
    assert verify_witness(ABA_GRAMMAR, d, w) == ["n0: no witness entry"]
    w = dict(r.witness)
    w["n0"] = WitnessEntry(3, r.witness["n2"].mapping)
    assert verify_witness(ABA_GRAMMAR, d, w)
    w = dict(r.witness)
    w["n2"] = WitnessEntry(99, r.witness["n2"].mapping)
    assert verify_witness(ABA_GRAMMAR, d, w)


def test_open_star_policy():
    g = grammar([nb({"a": "a"}, [], "a", StarPolicy.OPEN), nb({"b": "b"}, [], "b")])
    assert check(g, Diagram.build({"a": "a"}, directed=True)).correct
    r = check(g, chain("ab"))
    assert r.uncovered == ["n1"]


def test_expand_ground_instances():
    g = grammar([nb({"x": Var("X"), "y": Var("X")}, [("r", "y", "x", "next")], "x")],
                classes={"X": {"a", "b"}})
    e = expand_ground(g)
    assert len(e.neighbourhoods) == 2
    assert dict(e.classes) == {}
    assert all(n.diagram.is_ground for n in e.neighbourhoods)


def test_random_grammars_agree_with_definition():
    rng = random.Random(3)
    for _ in range(60):
        directed = rng.random() < 0.5
        n = rng.randint(1, 4)
        d = random_connected(rng, n, rng.randint(n - 1, n + 1), LETTERS, ["s", "t"], directed)
        g = random_grammar(rng, directed, sources=[d] if rng.random() < 0.7 else [])
        r = check(g, d)
        assert r.correct == brute_correct(g, d)
        if r.correct:
            assert verify_witness(g, d, r.witness) == []
        assert check(expand_ground(g), d).correct == r.correct


def test_class_table_is_consistent():
    assert set().union(*CLASSES.values()) == set(LETTERS)
