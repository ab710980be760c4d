"""Command-line interface.

Exit codes: 0 the diagram is correct (or the command succeeded), 1 the
inputs are valid but the diagram is incorrect, 2 usage, I/O, parse or
validation errors.  Diagnostics go to stderr only on exit 2.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import formats
from .engine import check
from .errors import SyntaxDiagramError
from .generators import (chain_to_diagram, compile_cfg, compile_prolog, compile_string_grammar,
                         compile_valency, parse_cfg, parse_prolog, parse_string_spec,
                         parse_valency, tree_to_diagram)
from .generators.strings import tokenize_chain
from .matcher import inclusions


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_check(args) -> int:
    g = formats.load_grammar(args.grammar)
    d = formats.load_diagram(args.diagram)
    report = check(g, d, witnesses=args.witnesses)
    if args.format == "structured":
        sys.stdout.write(formats.dumps_report(report))
    else:
        sys.stdout.write(formats.render_text(report))
    return 0 if report.correct else 1


def _count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return n


def _anchor(text: str | None):
    if text is None:
        return None
    p, sep, t = text.partition("=")
    if not sep or not p or not t:
        raise argparse.ArgumentTypeError(f"--anchor expects PNODE=TNODE, got {text!r}")
    return (p, t)


def cmd_embed(args) -> int:
    pattern, classes = formats.load_pattern(args.pattern)
    target = formats.load_diagram(args.target)
    found = inclusions(pattern, target, anchor=args.anchor, classes=classes)
    if args.format == "structured":
        sys.stdout.write(formats.canonical_json([formats.mapping_to_doc(m) for m in found]))
    else:
        sys.stdout.write(f"{len(found)} inclusion{'s' if len(found) != 1 else ''}\n")
        for i, m in enumerate(found, start=1):
            nodes = ", ".join(f"{a}->{b}" for a, b in m.nodes)
            ribs = ", ".join(f"{a}->{b}" for a, b in m.ribs)
            line = f"{i}: nodes {nodes}"
            if ribs:
                line += f"; ribs {ribs}"
            if m.bindings:
                line += "; binding " + ", ".join(f"{x}={s}" for x, s in m.bindings)
            sys.stdout.write(line + "\n")
    return 0


def cmd_gen(args) -> int:
    if args.kind == "chain":
        doc = formats.parse_json(_read(args.spec), args.spec)
        g = compile_string_grammar(parse_string_spec(doc))
    elif args.kind == "cfg":
        g = compile_cfg(parse_cfg(_read(args.rules), args.rules))
    elif args.kind == "chem":
        g = compile_valency(parse_valency(_read(args.valency)))
    else:
        g = compile_prolog(parse_prolog(_read(args.program), args.program))
    _emit(formats.dumps_grammar(g), args.output)
    return 0


def cmd_encode(args) -> int:
    if args.kind == "chain":
        source = args.alphabet if args.alphabet is not None else args.text
        if re.search(r"[\s,]", source.strip()):
            alphabet = [s for s in re.split(r"[\s,]+", source.strip()) if s]
        else:
            alphabet = tokenize_chain(source)
        d = chain_to_diagram(args.text, alphabet)
    else:
        cfg = parse_cfg(_read(args.cfg), args.cfg)
        tree = args.tree if args.tree.lstrip().startswith("(") else _read(args.tree)
        d = tree_to_diagram(tree, cfg)
    _emit(formats.dumps_diagram(d), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syntax-diagrams",
                                     description="Check syntax diagrams against neighbourhood grammars.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide whether a diagram is correct under a grammar")
    p.add_argument("--grammar", required=True)
    p.add_argument("--diagram", required=True)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--witnesses", type=_count, default=1,
                   help="per-node witness cap; 0 reports correctness only")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("embed", help="list all inclusions of a pattern diagram into a target")
    p.add_argument("--pattern", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--anchor", type=_anchor, metavar="PNODE=TNODE")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.set_defaults(func=cmd_embed)

    gen = sub.add_parser("gen", help="compile a grammar file").add_subparsers(dest="kind", required=True)
    for kind, flag, helptext in (("chain", "--spec", "string neighbourhood spec (JSON)"),
                                 ("cfg", "--rules", "context-free rules text"),
                                 ("chem", "--valency", "valency table (JSON)"),
                                 ("prolog", "--program", "mini-Prolog program")):
        p = gen.add_parser(kind)
        p.add_argument(flag, required=True, help=helptext)
        p.add_argument("-o", "--output")
        p.set_defaults(func=cmd_gen)

    enc = sub.add_parser("encode", help="encode text as a diagram file").add_subparsers(dest="kind", required=True)
    p = enc.add_parser("chain")
    p.add_argument("--text", required=True)
    p.add_argument("--alphabet", help="symbols of the alphabet (default: those in the text)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)
    p = enc.add_parser("tree")
    p.add_argument("--cfg", required=True)
    p.add_argument("--tree", required=True, help="bracketed tree text, or a file containing it")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
    except SyntaxDiagramError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
