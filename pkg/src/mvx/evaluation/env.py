from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

from ..model import ModelStore
from ..values import STORE, Invalid

UNSET = object()


@dataclass
class Env:
    """Evaluation environment for both languages.

    ``context`` is bound to ``self`` (OCL) and ``data`` (NavEx). ``pre_store``
    is only set while checking a postcondition. ``writable`` lets NavEx
    ``addObject`` mutate ``store``; it is off for every pure evaluation.
    """

    store: ModelStore
    context: Any = STORE
    vars: dict = field(default_factory=dict)
    pre_store: ModelStore | None = None
    result: Any = UNSET
    writable: bool = False
    diagnostics: list = field(default_factory=list)
    implicit: tuple = ()

    def bind(self, **bindings) -> "Env":
        return replace(self, vars={**self.vars, **bindings})

    def bind_many(self, bindings: dict) -> "Env":
        return replace(self, vars={**self.vars, **bindings})

    def with_implicit(self, value) -> "Env":
        return replace(self, implicit=(*self.implicit, value))

    def invalid(self, reason: str) -> Invalid:
        self.diagnostics.append(reason)
        return Invalid(reason)
