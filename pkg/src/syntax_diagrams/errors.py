"""Exception hierarchy shared by every module of the package."""
from __future__ import annotations


class SyntaxDiagramError(Exception):
    """Base class for all errors raised by :mod:`syntax_diagrams`."""


class UnknownNodeError(SyntaxDiagramError, LookupError):
    def __init__(self, node: str):
        super().__init__(f"unknown node {node!r}")
        self.node = node


class InvalidDiagramError(SyntaxDiagramError, ValueError):
    """A diagram failed structural validation where a valid one is required."""

    def __init__(self, violations, context: str = "diagram"):
        self.violations = list(violations)
        detail = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid {context}: {detail}")


class MatchQueryError(SyntaxDiagramError, ValueError):
    pass


class GrammarError(SyntaxDiagramError, ValueError):
    """A grammar is inconsistent, or a diagram uses something it does not declare."""


class CompileError(SyntaxDiagramError, ValueError):
    """A generator input (string spec, CFG, valency table, program) is malformed."""


class FormatError(SyntaxDiagramError, ValueError):
    """Unparseable text or file content.

    ``line`` and ``column`` are 1-based when known, ``field`` names the
    offending document field for structured files.
    """

    def __init__(self, message: str, *, line: int | None = None,
                 column: int | None = None, field: str | None = None,
                 source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.field = field
        self.source = source
        super().__init__(self._render())

    def _render(self) -> str:
        where = []
        if self.source:
            where.append(self.source)
        if self.line is not None:
            where.append(f"line {self.line}")
            if self.column is not None:
                where.append(f"column {self.column}")
        if self.field:
            where.append(f"field {self.field}")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message
