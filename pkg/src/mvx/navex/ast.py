"""NavEx abstract syntax."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Literal:
    value: Any  # bool, int, float, str or None


@dataclass(frozen=True)
class ListLit:
    items: tuple


@dataclass(frozen=True)
class RecordLit:
    entries: tuple[tuple[str, Any], ...]  # keys keep their "$" prefix


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Member:
    obj: Any
    name: str


@dataclass(frozen=True)
class Dollar:
    """``obj.$name``: reflective feature access."""

    obj: Any
    name: str


@dataclass(frozen=True)
class Index:
    obj: Any
    index: Any


@dataclass(frozen=True)
class Call:
    callee: Any
    args: tuple


@dataclass(frozen=True)
class Lambda:
    params: tuple[str, ...]
    body: Any


@dataclass(frozen=True)
class Binary:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Unary:
    op: str  # "!" | "-"
    operand: Any


@dataclass(frozen=True)
class Cond:
    cond: Any
    then: Any
    otherwise: Any


def walk(node):
    yield node
    if isinstance(node, ListLit):
        for i in node.items:
            yield from walk(i)
    elif isinstance(node, RecordLit):
        for _, v in node.entries:
            yield from walk(v)
    elif isinstance(node, (Member, Dollar)):
        yield from walk(node.obj)
    elif isinstance(node, Index):
        yield from walk(node.obj)
        yield from walk(node.index)
    elif isinstance(node, Call):
        yield from walk(node.callee)
        for a in node.args:
            yield from walk(a)
    elif isinstance(node, Lambda):
        yield from walk(node.body)
    elif isinstance(node, Binary):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Unary):
        yield from walk(node.operand)
    elif isinstance(node, Cond):
        yield from walk(node.cond)
        yield from walk(node.then)
        yield from walk(node.otherwise)
