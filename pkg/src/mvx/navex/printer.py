"""Render NavEx ASTs back to reparseable source."""

from __future__ import annotations

import re

from .._lexing import format_number, quote_string
from . import ast as A

_ATOMIC = (A.Literal, A.ListLit, A.RecordLit, A.Ident, A.Member, A.Dollar, A.Index, A.Call)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _operand(node) -> str:
    text = to_source(node)
    return text if isinstance(node, _ATOMIC) else f"({text})"


def _key(key: str) -> str:
    if key.startswith("$") and _IDENT.match(key[1:]):
        return key
    if _IDENT.match(key):
        return key
    return quote_string(key, "'")


def to_source(node) -> str:
    if isinstance(node, A.Literal):
        v = node.value
        if v is None:
            return "null"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return quote_string(v, "'")
        return format_number(v)
    if isinstance(node, A.ListLit):
        return f"[{', '.join(to_source(i) for i in node.items)}]"
    if isinstance(node, A.RecordLit):
        return "{" + ", ".join(f"{_key(k)}: {to_source(v)}" for k, v in node.entries) + "}"
    if isinstance(node, A.Ident):
        return node.name
    if isinstance(node, A.Member):
        return f"{_operand(node.obj)}.{node.name}"
    if isinstance(node, A.Dollar):
        return f"{_operand(node.obj)}.${node.name}"
    if isinstance(node, A.Index):
        return f"{_operand(node.obj)}[{to_source(node.index)}]"
    if isinstance(node, A.Call):
        return f"{_operand(node.callee)}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, A.Lambda):
        head = node.params[0] if len(node.params) == 1 else f"({', '.join(node.params)})"
        return f"{head} => {_operand(node.body) if isinstance(node.body, A.Lambda) else to_source(node.body)}"
    if isinstance(node, A.Binary):
        return f"{_operand(node.left)} {node.op} {_operand(node.right)}"
    if isinstance(node, A.Unary):
        return f"{node.op}{_operand(node.operand)}"
    if isinstance(node, A.Cond):
        return f"{_operand(node.cond)} ? {_operand(node.then)} : {_operand(node.otherwise)}"
    raise TypeError(f"not a NavEx node: {node!r}")
