"""Render OCL ASTs back to source that reparses to the same tree."""

from __future__ import annotations

from .._lexing import format_number, quote_string
from ..values import is_invalid
from . import ast as A

_ATOMIC = (
    A.Literal, A.CollectionLiteral, A.Var, A.ResultRef, A.Nav, A.AtPre, A.OpCall, A.ArrowCall,
    A.IteratorExp, A.IterateExp, A.AllInstances, A.TypeOp, A.If,
)


def _operand(node) -> str:
    text = to_source(node)
    return text if isinstance(node, _ATOMIC) else f"({text})"


def to_source(node) -> str:
    if isinstance(node, A.Literal):
        v = node.value
        if v is None:
            return "null"
        if is_invalid(v):
            return "invalid"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return quote_string(v, "'")
        return format_number(v)
    if isinstance(node, A.CollectionLiteral):
        return f"{node.kind}{{{', '.join(to_source(i) for i in node.items)}}}"
    if isinstance(node, A.Var):
        return node.name
    if isinstance(node, A.ResultRef):
        return "result"
    if isinstance(node, A.Nav):
        return f"{_operand(node.source)}.{node.name}"
    if isinstance(node, A.AtPre):
        return f"{to_source(node.nav)}@pre"
    if isinstance(node, A.OpCall):
        return f"{_operand(node.source)}.{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, A.ArrowCall):
        return f"{_operand(node.source)}->{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, A.IteratorExp):
        head = f"{', '.join(node.vars)} | " if node.vars else ""
        return f"{_operand(node.source)}->{node.name}({head}{to_source(node.body)})"
    if isinstance(node, A.IterateExp):
        return (
            f"{_operand(node.source)}->iterate({node.var}; {node.acc} = {to_source(node.init)}"
            f" | {to_source(node.body)})"
        )
    if isinstance(node, A.AllInstances):
        return f"{node.class_name}.allInstances()"
    if isinstance(node, A.TypeOp):
        return f"{_operand(node.source)}.{node.op}({node.type_name or ''})"
    if isinstance(node, A.Binary):
        return f"{_operand(node.left)} {node.op} {_operand(node.right)}"
    if isinstance(node, A.Unary):
        sep = " " if node.op == "not" else ""
        return f"{node.op}{sep}{_operand(node.operand)}"
    if isinstance(node, A.If):
        return (
            f"if {to_source(node.cond)} then {to_source(node.then)}"
            f" else {to_source(node.otherwise)} endif"
        )
    if isinstance(node, A.Let):
        return f"let {node.name} = {to_source(node.init)} in {to_source(node.body)}"
    raise TypeError(f"not an OCL node: {node!r}")


def _clauses(keyword: str, clauses) -> list[str]:
    return [f"{keyword}{' ' + label if label else ''}: {to_source(body)}" for label, body in clauses]


def decl_to_source(decl) -> str:
    """Render one context declaration, one clause per line."""
    if isinstance(decl, A.ClassContext):
        return "\n".join([f"context {decl.class_name}", *("  " + c for c in _clauses("inv", decl.invariants))])
    if isinstance(decl, A.DeriveContext):
        return f"context {decl.class_name}::{decl.attribute}: {decl.declared_type} derive: {to_source(decl.body)}"
    sig = decl.sig
    params = ", ".join(f"{n}: {t}" for n, t in sig.params)
    head = f"context {decl.class_name}::{sig.name}({params})"
    if sig.return_type:
        head += f": {sig.return_type}"
    return "\n".join([head, *_clauses("pre", decl.pres), *_clauses("post", decl.posts)])
