"""Shared exception types.

Errors that carry a loop certificate keep it in ``certificate`` so callers
(and the CLI) can re-check the claim independently.
"""
from __future__ import annotations

from typing import Any


class ParseError(ValueError):
    """Malformed input text; carries 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + where)


class InvalidDiagram(ValueError):
    """A structurally broken object, or an operation applied out of domain."""


class NotWeaklyAdmissible(Exception):
    """Some orientation-respecting loop has negative homology class."""

    def __init__(self, certificate: Any, homology: int):
        self.certificate = certificate
        self.homology = homology
        super().__init__(f"loop of homology class {homology} < 0")


class NotAdmissible(Exception):
    """Some orientation-respecting loop has homology class <= 0."""

    def __init__(self, certificate: Any, homology: int):
        self.certificate = certificate
        self.homology = homology
        super().__init__(f"loop of homology class {homology} <= 0")


class NoLevels(Exception):
    """The level peeling got stuck; carries a marking-free loop certificate."""

    def __init__(self, certificate: Any):
        self.certificate = certificate
        super().__init__("some arrows have no well-defined level")


class NotPositive(Exception):
    """Operation requires a positive T-diagram (>= 1 marking, all signs +1)."""


class NotFull(Exception):
    """All arrow valuations and the circle valuation are zero."""


class NotRealRealizable(Exception):
    """No real (virtual-crossing-free) annular diagram realizes this input."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)
