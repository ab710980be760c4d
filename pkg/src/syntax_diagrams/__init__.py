"""Syntax diagrams and neighbourhood grammars.

A syntax diagram is a connected, node-labelled, many-sorted multigraph.  A
neighbourhood grammar assigns each symbol a family of small diagrams
(neighbourhoods) with a distinguished center; a diagram is correct when it
passes the grammar's global restrictions and every node embeds some
neighbourhood of its symbol, center on the node, with the center's star
covering the node's whole star.
"""
from .engine import (Chain, CheckReport, Degree, Neighbourhood, NeighbourhoodGrammar,
                     OrderedTree, StarPolicy, check, check_restrictions, covers_node,
                     expand_ground, family_for_symbol, verify_witness)
from .errors import (CompileError, FormatError, GrammarError, InvalidDiagramError,
                     MatchQueryError, SyntaxDiagramError, UnknownNodeError)
from .graph import (Diagram, Multigraph, Rib, Var, is_connected, ribs_between, star,
                    validate_diagram)
from .matcher import (InclusionMapping, MatchQuery, enumerate_inclusions, inclusions,
                      star_exact_embeddings)

__version__ = "0.1.0"
