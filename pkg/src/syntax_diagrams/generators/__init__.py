"""Compilers from classic formalisms to neighbourhood grammars."""
from .cfg import PARENT, SIBLING, Cfg, Tree, compile_cfg, parse_cfg, parse_tree, tree_to_diagram
from .chemistry import BOND, ValencyTable, compile_valency, molecule, parse_valency, partitions
from .prolog import Atom, PrologProgram, Rule, Term, compile_prolog, parse_prolog
from .strings import (BOUNDARY, NEXT, StringGrammarSpec, StringNeighbourhood, chain_to_diagram,
                      compile_string_grammar, parse_string_spec)

__all__ = [
    "PARENT", "SIBLING", "BOND", "BOUNDARY", "NEXT",
    "Cfg", "Tree", "compile_cfg", "parse_cfg", "parse_tree", "tree_to_diagram",
    "ValencyTable", "compile_valency", "molecule", "parse_valency", "partitions",
    "Atom", "PrologProgram", "Rule", "Term", "compile_prolog", "parse_prolog",
    "StringGrammarSpec", "StringNeighbourhood", "chain_to_diagram",
    "compile_string_grammar", "parse_string_spec",
]
