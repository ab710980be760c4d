import json
import os
import random

import pytest

from syntax_diagrams import (Degree, FormatError, GrammarError, InvalidDiagramError, Var, check,
                             formats, verify_witness)
from syntax_diagrams.generators import (ValencyTable, chain_to_diagram, compile_cfg, compile_prolog,
                                        compile_string_grammar, compile_valency, parse_cfg,
                                        parse_prolog, parse_string_spec, tree_to_diagram)

from oracles import LETTERS, random_connected, random_grammar


def generated_grammars(data_dir):
    spec = parse_string_spec(json.loads((data_dir / "chain_aba.json").read_text()))
    yield compile_string_grammar(spec)
    yield compile_cfg(parse_cfg((data_dir / "anbn.cfg").read_text()))
    yield compile_valency(ValencyTable({"H": 1, "O": 2, "C": 4}))
    yield compile_prolog(parse_prolog((data_dir / "pairs.pl").read_text()))


def test_water_file(data_dir):
    d = formats.load_diagram(data_dir / "water.json")
    assert (len(d.nodes), len(d.ribs)) == (3, 2)


def test_grammar_round_trips(data_dir, tmp_path):
    for i, g in enumerate(generated_grammars(data_dir)):
        path = tmp_path / f"g{i}.json"
        formats.save_grammar(g, path)
        assert formats.load_grammar(path) == g
        first = path.read_bytes()
        formats.save_grammar(formats.load_grammar(path), path)
        assert path.read_bytes() == first


def test_degree_restriction_round_trip():
    g = compile_valency(ValencyTable({"H": 1, "O": 2}))
    g = type(g)(g.directed, g.alphabet, g.sorts, g.classes, g.neighbourhoods,
                (Degree(symbols={"H"}, max=1), Degree(sort="bond", direction="any", min=1)))
    assert formats.loads_grammar(formats.dumps_grammar(g)) == g


def test_checked_in_grammars_are_canonical(data_dir):
    for name in ("chain_grammar.json", "chem_grammar.json"):
        text = (data_dir / name).read_text(encoding="utf-8")
        assert formats.dumps_grammar(formats.loads_grammar(text)) == text
    for name in ("water.json", "hhh.json", "aba.json"):
        text = (data_dir / name).read_text(encoding="utf-8")
        assert formats.dumps_diagram(formats.loads_diagram(text)) == text


def test_canonical_reserialisation_of_shuffled_file(data_dir):
    doc = json.loads((data_dir / "water.json").read_text())
    doc["nodes"].reverse()
    doc["ribs"].reverse()
    shuffled = json.dumps(doc)
    d = formats.loads_diagram(shuffled)
    assert formats.dumps_diagram(d) == (data_dir / "water.json").read_text()


def test_wildcard_class_written_as_star(data_dir):
    g = compile_valency(ValencyTable({"H": 1, "O": 2}))
    doc = formats.grammar_to_doc(g)
    assert doc["variables"]["ANY1"] == "*"
    assert doc["variables"]["E1"] == ["H"]


def test_pattern_variables(tmp_path):
    d = chain_to_diagram("ab", "ab")
    p = type(d)(d.graph, {"n0": Var("X"), "n1": "b"}, d.alphabet)
    path = tmp_path / "p.json"
    formats.save_diagram(p, path, {"X": frozenset({"a"})})
    q, classes = formats.load_pattern(path)
    assert q == p and classes == {"X": {"a"}}


def test_unknown_endpoint_is_an_invariant_violation(data_dir):
    doc = json.loads((data_dir / "water.json").read_text())
    doc["ribs"][0]["to"] = "ghost"
    with pytest.raises(InvalidDiagramError) as exc:
        formats.loads_diagram(json.dumps(doc), "bad.json")
    assert "ghost" in str(exc.value)
    assert "bad.json" in str(exc.value)


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.pop("directed"), "directed"),
    (lambda d: d.update(directed="no"), "directed"),
    (lambda d: d["nodes"][1].pop("label"), "nodes[1].label"),
    (lambda d: d["ribs"][0].update(sort=3), "ribs[0].sort"),
    (lambda d: d.update(alphabet=["H", 1]), "alphabet[1]"),
])
def test_field_diagnostics(data_dir, mutate, where):
    doc = json.loads((data_dir / "water.json").read_text())
    mutate(doc)
    with pytest.raises(FormatError) as exc:
        formats.loads_diagram(json.dumps(doc), "w.json")
    assert exc.value.field == where


def test_parse_error_location():
    with pytest.raises(FormatError) as exc:
        formats.loads_diagram('{\n  "directed": tru\n}', "x.json")
    assert exc.value.line == 2
    assert "x.json" in str(exc.value)


def test_grammar_diagnostics(data_dir):
    doc = json.loads((data_dir / "chem_grammar.json").read_text())
    doc["neighbourhoods"][0]["star_policy"] = "loose"
    with pytest.raises(FormatError) as exc:
        formats.loads_grammar(json.dumps(doc))
    assert exc.value.field == "neighbourhoods[0].star_policy"
    doc = json.loads((data_dir / "chem_grammar.json").read_text())
    doc["restrictions"] = [{"kind": "acyclic"}]
    with pytest.raises(FormatError):
        formats.loads_grammar(json.dumps(doc))
    doc = json.loads((data_dir / "chem_grammar.json").read_text())
    doc["neighbourhoods"][0]["center"] = "nowhere"
    with pytest.raises(GrammarError):
        formats.loads_grammar(json.dumps(doc))


def test_report_round_trip_and_replay(data_dir, tmp_path):
    g = compile_cfg(parse_cfg((data_dir / "anbn.cfg").read_text()))
    cfg = parse_cfg((data_dir / "anbn.cfg").read_text())
    for tree in ["(S a (S a b) b)", "(S a (S a) b)", "(S a b b)"]:
        d = tree_to_diagram(tree, cfg)
        for cap in (0, 1, 3):
            r = check(g, d, witnesses=cap)
            path = tmp_path / "r.json"
            formats.save_report(r, path)
            back = formats.load_report(path)
            assert back == r
            if r.correct and cap:
                assert verify_witness(g, d, back.witness) == []


def test_text_and_structured_reports_agree():
    rng = random.Random(8)
    for _ in range(40):
        directed = rng.random() < 0.5
        n = rng.randint(1, 4)
        d = random_connected(rng, n, rng.randint(n - 1, n + 1), LETTERS, ["s", "t"], directed)
        g = random_grammar(rng, directed, [d])
        r = check(g, d)
        text = formats.render_text(r)
        doc = json.loads(formats.dumps_report(r))
        assert text.splitlines()[0] == f"correct: {'yes' if doc['correct'] else 'no'}"
        from_text = [line.split()[1] for line in text.splitlines() if line.startswith("uncovered:")]
        assert from_text == [u["node"] for u in doc["uncovered_nodes"]]


def test_restriction_violations_serialise():
    g = compile_string_grammar(parse_string_spec({"alphabet": ["a", "b"],
                                                  "neighbourhoods": {"a": ["#[a]#"]}}))
    d = chain_to_diagram("ab", "ab")
    d = type(d)(d.graph.__class__(True, d.nodes, d.ribs + (("x", "n0", "n1", "next"),), d.graph.sorts),
                d.labels, d.alphabet)
    r = check(g, d)
    assert r.restriction_violations
    assert formats.loads_report(formats.dumps_report(r)) == r
    assert "restriction violation" in formats.render_text(r)


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores file permissions")
def test_read_only_target_raises(tmp_path, data_dir):
    target = tmp_path / "ro"
    target.mkdir()
    target.chmod(0o500)
    with pytest.raises(OSError):
        formats.save_diagram(formats.load_diagram(data_dir / "water.json"), target / "x.json")


def test_unwritable_path_raises(tmp_path, data_dir):
    d = formats.load_diagram(data_dir / "water.json")
    with pytest.raises(OSError):
        formats.save_diagram(d, tmp_path / "missing-dir" / "x.json")
    with pytest.raises(OSError):
        formats.save_diagram(d, tmp_path)
    if os.path.exists("/proc/version"):
        # read-only even for root
        with pytest.raises(OSError):
            formats.save_diagram(d, "/proc/version")
