"""OCL abstract syntax. Nodes are frozen and compare structurally."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from ..model import OperationSig


@dataclass(frozen=True)
class Literal:
    value: Any  # bool, int, float, str, None or INVALID


@dataclass(frozen=True)
class CollectionLiteral:
    kind: str
    items: tuple


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ResultRef:
    pass


@dataclass(frozen=True)
class Nav:
    source: Any
    name: str


@dataclass(frozen=True)
class AtPre:
    nav: Nav


@dataclass(frozen=True)
class OpCall:
    source: Any
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class ArrowCall:
    source: Any
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class IteratorExp:
    source: Any
    name: str
    vars: tuple[str, ...]
    body: Any


@dataclass(frozen=True)
class IterateExp:
    source: Any
    var: str
    acc: str
    init: Any
    body: Any


@dataclass(frozen=True)
class AllInstances:
    class_name: str


@dataclass(frozen=True)
class TypeOp:
    source: Any
    op: str  # oclIsTypeOf | oclIsKindOf | oclAsType | oclIsUndefined
    type_name: str | None = None


@dataclass(frozen=True)
class Binary:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "-"
    operand: Any


@dataclass(frozen=True)
class If:
    cond: Any
    then: Any
    otherwise: Any


@dataclass(frozen=True)
class Let:
    name: str
    init: Any
    body: Any


OclAst = Union[
    Literal, CollectionLiteral, Var, ResultRef, Nav, AtPre, OpCall, ArrowCall, IteratorExp,
    IterateExp, AllInstances, TypeOp, Binary, Unary, If, Let,
]


@dataclass(frozen=True)
class ClassContext:
    class_name: str
    invariants: tuple[tuple[str | None, Any], ...]


@dataclass(frozen=True)
class OperationContext:
    class_name: str
    sig: OperationSig
    pres: tuple[tuple[str | None, Any], ...]
    posts: tuple[tuple[str | None, Any], ...]


@dataclass(frozen=True)
class DeriveContext:
    class_name: str
    attribute: str
    declared_type: str
    body: Any


ContextDecl = Union[ClassContext, OperationContext, DeriveContext]


def walk(node):
    """Yield ``node`` and every descendant expression node."""
    yield node
    if isinstance(node, (Literal, Var, ResultRef, AllInstances)):
        return
    if isinstance(node, CollectionLiteral):
        for item in node.items:
            yield from walk(item)
    elif isinstance(node, Nav):
        yield from walk(node.source)
    elif isinstance(node, AtPre):
        yield from walk(node.nav)
    elif isinstance(node, (OpCall, ArrowCall)):
        yield from walk(node.source)
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, IteratorExp):
        yield from walk(node.source)
        yield from walk(node.body)
    elif isinstance(node, IterateExp):
        yield from walk(node.source)
        yield from walk(node.init)
        yield from walk(node.body)
    elif isinstance(node, TypeOp):
        yield from walk(node.source)
    elif isinstance(node, Binary):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Unary):
        yield from walk(node.operand)
    elif isinstance(node, If):
        yield from walk(node.cond)
        yield from walk(node.then)
        yield from walk(node.otherwise)
    elif isinstance(node, Let):
        yield from walk(node.init)
        yield from walk(node.body)
