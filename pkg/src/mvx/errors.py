"""Exception hierarchy shared by every mvx layer."""

from __future__ import annotations


class MvxError(Exception):
    """Base class. ``kind`` is a stable machine-readable tag."""

    kind = "Error"

    def __init__(self, message: str, kind: str | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        if kind is not None:
            self.kind = kind
        self.path = path

    def __str__(self) -> str:
        where = f" at {self.path}" if self.path else ""
        return f"{self.kind}{where}: {self.message}"


class ModelError(MvxError):
    """Metamodel/model loading or mutation failure."""


class RegistryError(MvxError):
    """Malformed constraint registry, derived rule set or contract."""


class TransitionError(MvxError):
    """Bad input to the pre/post harness (missing argument, unknown receiver...)."""


class CorpusError(MvxError):
    """Corpus document references something that does not resolve."""


class ParseError(MvxError):
    """Syntax error in OCL or NavEx source, with a 1-based position."""

    kind = "ParseError"

    def __init__(self, message: str, line: int, column: int, expected=(), kind: str | None = None):
        super().__init__(message, kind=kind)
        self.line = line
        self.column = column
        self.expected = list(expected)

    def __str__(self) -> str:
        text = f"{self.kind} at {self.line}:{self.column}: {self.message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        return text
