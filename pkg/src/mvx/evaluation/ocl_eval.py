"""Evaluator for OCL ASTs. Total and pure: failures become ``Invalid``."""

from __future__ import annotations

import itertools
import math

from ..model import ObjRef
from ..ocl import ast as A
from ..values import (
    BAG,
    SEQUENCE,
    SET,
    ClassRef,
    Coll,
    is_int,
    is_invalid,
    is_number,
    logic_and,
    logic_implies,
    logic_not,
    logic_or,
    logic_xor,
    type_name,
    value_equal,
)
from . import common as C
from .env import UNSET, Env

_LOGIC = {"and": logic_and, "or": logic_or, "xor": logic_xor, "implies": logic_implies}


def eval_ocl(node, env: Env):
    """Evaluate an OCL expression node in ``env``."""
    handler = _HANDLERS.get(type(node))
    if handler is None:
        raise TypeError(f"not an OCL node: {node!r}")
    return handler(node, env)


def _literal(node, env):
    return node.value


def _collection_literal(node, env):
    items = [eval_ocl(i, env) for i in node.items]
    for i in items:
        if is_invalid(i):
            return i
    return Coll(node.kind, items)


def _var(node, env):
    name = node.name
    if name in env.vars:
        return env.vars[name]
    if name == "self":
        return env.context
    # implicit iterator variables, innermost first, then self
    for source in (*reversed(env.implicit), env.context):
        if isinstance(source, ObjRef):
            cls = C.class_of(env.store, source)
            if cls and env.store.metamodel.feature(cls, name) is not None:
                return C.read_feature(env, env.store, source, name)
    if name in env.store.metamodel.classes:
        return ClassRef(name)
    return env.invalid(f"unknown identifier {name!r}")


def _result(node, env):
    if env.result is UNSET:
        return env.invalid("'result' has no value")
    return env.result


def navigate(env, store, source, name):
    if is_invalid(source):
        return source
    if source is None:
        return env.invalid(f"navigation .{name} on null")
    if isinstance(source, Coll):
        # implicit collect: items.price == items->collect(price)
        out = []
        for e in source:
            v = navigate(env, store, e, name)
            if is_invalid(v):
                return v
            out.extend(v.elements if isinstance(v, Coll) else [v])
        return Coll(BAG, out)
    if isinstance(source, ObjRef):
        return C.read_feature(env, store, source, name)
    return env.invalid(f"navigation .{name} on {type_name(source)}")


def _nav(node, env):
    return navigate(env, env.store, eval_ocl(node.source, env), node.name)


def _at_pre(node, env):
    if env.pre_store is None:
        return env.invalid("'@pre' outside a postcondition")
    source = eval_ocl(node.nav.source, env)
    return navigate(env, env.pre_store, source, node.nav.name)


def _all_instances(node, env):
    return C.all_instances(env, node.class_name)


def _type_op(node, env):
    v = eval_ocl(node.source, env)
    if node.op == "oclIsUndefined":
        return v is None or is_invalid(v)
    if is_invalid(v):
        return v
    if not C.known_type(env, node.type_name):
        return env.invalid(f"unknown type {node.type_name!r}")
    if node.op == "oclAsType":
        if v is None:
            return None
        if not C.is_kind_of(env, v, node.type_name):
            return env.invalid(f"{type_name(v)} cannot be cast to {node.type_name}")
        return float(v) if node.type_name == "Real" and is_int(v) else v
    if v is None:
        return False
    if node.op == "oclIsTypeOf":
        return C.is_type_of(env, v, node.type_name)
    return C.is_kind_of(env, v, node.type_name)


def _binary(node, env):
    op = node.op
    a = eval_ocl(node.left, env)
    b = eval_ocl(node.right, env)
    if op in _LOGIC:
        return _LOGIC[op](a, b)
    if op == "=":
        return value_equal(a, b)
    if op == "<>":
        return logic_not(value_equal(a, b))
    if op in ("<", "<=", ">", ">="):
        return C.compare(env, op, a, b)
    return C.arith(env, op, a, b)


def _unary(node, env):
    v = eval_ocl(node.operand, env)
    if node.op == "not":
        return logic_not(v)
    if is_invalid(v):
        return v
    if not is_number(v):
        return env.invalid(f"-{type_name(v)}")
    return -v


def _if(node, env):
    cond = eval_ocl(node.cond, env)
    if cond is True:
        return eval_ocl(node.then, env)
    if cond is False:
        return eval_ocl(node.otherwise, env)
    if is_invalid(cond):
        return cond
    return env.invalid(f"if-condition is {type_name(cond)}")


def _let(node, env):
    return eval_ocl(node.body, env.bind_many({node.name: eval_ocl(node.init, env)}))


# -- dotted operations on scalars -------------------------------------------------


def _op_call(node, env):
    src = eval_ocl(node.source, env)
    args = [eval_ocl(a, env) for a in node.args]
    for v in (src, *args):
        if is_invalid(v):
            return v
    name = node.name
    if isinstance(src, str):
        return _string_op(env, name, src, args)
    if is_number(src):
        return _number_op(env, name, src, args)
    return env.invalid(f"{name}() not defined on {type_name(src)}")


def _string_op(env, name, s, args):
    if name == "size":
        return len(s)
    if name == "toUpperCase":
        return s.upper()
    if name == "toLowerCase":
        return s.lower()
    if name == "concat":
        if not isinstance(args[0], str):
            return env.invalid("concat() expects a String")
        return s + args[0]
    if name == "substring":
        lo, hi = args
        if not (is_int(lo) and is_int(hi)):
            return env.invalid("substring() expects Integers")
        if lo < 1 or hi > len(s) or lo > hi + 1:
            return env.invalid(f"substring({lo}, {hi}) out of range for size {len(s)}")
        return s[lo - 1:hi]
    if name == "indexOf":
        if not isinstance(args[0], str):
            return env.invalid("indexOf() expects a String")
        return s.find(args[0]) + 1
    return env.invalid(f"{name}() not defined on String")


def _number_op(env, name, x, args):
    if name == "abs":
        return abs(x)
    if name == "floor":
        return x if is_int(x) else math.floor(x)
    if name == "round":
        return C.round_half_away(x)
    if name in ("max", "min"):
        y = args[0]
        if not is_number(y):
            return env.invalid(f"{name}() expects a number")
        r = max(x, y) if name == "max" else min(x, y)
        return float(r) if (isinstance(x, float) or isinstance(y, float)) else r
    if name in ("div", "mod"):
        y = args[0]
        if not (is_int(x) and is_int(y)):
            return env.invalid(f"{name}() is defined on Integers only")
        if y == 0:
            return env.invalid(f"{name}() by zero")
        return C.int_div(x, y) if name == "div" else C.int_mod(x, y)
    return env.invalid(f"{name}() not defined on {type_name(x)}")


# -- collections ---------------------------------------------------------------------


def as_collection(v):
    """``x->op()`` on a non-collection treats x as a singleton Set (null as empty)."""
    if isinstance(v, Coll) or is_invalid(v):
        return v
    if v is None:
        return Coll(SET, ())
    return Coll(SET, (v,))


def _contains(coll, x) -> bool:
    return any(value_equal(e, x) is True for e in coll)


def _count(coll, x) -> int:
    return sum(1 for e in coll if value_equal(e, x) is True)


def _flatten(elements):
    for e in elements:
        if isinstance(e, Coll):
            yield from _flatten(e.elements)
        else:
            yield e


def _arrow_call(node, env):
    src = as_collection(eval_ocl(node.source, env))
    if is_invalid(src):
        return src
    args = [eval_ocl(a, env) for a in node.args]
    for a in args:
        if is_invalid(a):
            return a
    return collection_op(env, node.name, src, args)


def collection_op(env, name, src: Coll, args):
    kind, elems = src.kind, src.elements
    if name == "size":
        return len(elems)
    if name == "isEmpty":
        return not elems
    if name == "notEmpty":
        return bool(elems)
    if name == "includes":
        return _contains(src, args[0])
    if name == "excludes":
        return not _contains(src, args[0])
    if name in ("includesAll", "excludesAll"):
        other = as_collection(args[0])
        if name == "includesAll":
            return all(_contains(src, x) for x in other)
        return not any(_contains(src, x) for x in other)
    if name == "count":
        return _count(src, args[0])
    if name == "sum":
        return C.numeric_sum(env, elems)
    if name in ("first", "last", "at", "indexOf"):
        if kind != SEQUENCE:
            return env.invalid(f"{name}() requires a Sequence, got {kind}")
        if name == "first":
            return elems[0] if elems else env.invalid("first() of empty Sequence")
        if name == "last":
            return elems[-1] if elems else env.invalid("last() of empty Sequence")
        if name == "at":
            i = args[0]
            if not is_int(i) or not 1 <= i <= len(elems):
                return env.invalid(f"at({i!r}) out of range")
            return elems[i - 1]
        for pos, e in enumerate(elems, start=1):
            if value_equal(e, args[0]) is True:
                return pos
        return env.invalid("indexOf() of absent element")
    if name == "including":
        return Coll(kind, (*elems, args[0]))
    if name == "excluding":
        return Coll(kind, [e for e in elems if value_equal(e, args[0]) is not True])
    if name in ("append", "prepend"):
        if kind != SEQUENCE:
            return env.invalid(f"{name}() requires a Sequence, got {kind}")
        return Coll(SEQUENCE, (*elems, args[0]) if name == "append" else (args[0], *elems))
    if name == "union":
        other = args[0]
        if not isinstance(other, Coll):
            return env.invalid("union() expects a collection")
        if kind == SEQUENCE and other.kind == SEQUENCE:
            return Coll(SEQUENCE, (*elems, *other.elements))
        if SEQUENCE in (kind, other.kind):
            return env.invalid("union() of Sequence with an unordered collection")
        out_kind = SET if kind == SET and other.kind == SET else BAG
        return Coll(out_kind, (*elems, *other.elements))
    if name == "intersection":
        other = args[0]
        if not isinstance(other, Coll) or SEQUENCE in (kind, other.kind):
            return env.invalid("intersection() requires Sets or Bags")
        if SET in (kind, other.kind):
            return Coll(SET, [e for e in elems if _contains(other, e)])
        remaining = list(other.elements)
        out = []
        for e in elems:
            for i, r in enumerate(remaining):
                if value_equal(e, r) is True:
                    out.append(e)
                    del remaining[i]
                    break
        return Coll(BAG, out)
    if name == "flatten":
        return Coll(kind, _flatten(elems))
    if name == "asSet":
        return Coll(SET, elems)
    if name == "asBag":
        return Coll(BAG, elems)
    if name == "asSequence":
        return Coll(SEQUENCE, elems)
    return env.invalid(f"unknown collection operation {name!r}")


# -- iterators -----------------------------------------------------------------------


def _iterator(node, env):
    src = as_collection(eval_ocl(node.source, env))
    if is_invalid(src):
        return src
    names = node.vars

    def body_for(*elements):
        if names:
            scope = env.bind_many(dict(zip(names, elements)))
        else:
            scope = env.with_implicit(elements[0])
        return eval_ocl(node.body, scope)

    name = node.name
    elems = src.elements
    if name in ("forAll", "exists"):
        fold = logic_and if name == "forAll" else logic_or
        acc = name == "forAll"
        arity = max(1, len(names))
        for combo in itertools.product(elems, repeat=arity):
            acc = fold(acc, body_for(*combo))
        return acc
    if name in ("select", "reject"):
        keep = name == "select"
        out = []
        for e in elems:
            v = C.as_bool_or_invalid(env, body_for(e), f"{name} body")
            if is_invalid(v):
                return v
            if v is keep:
                out.append(e)
        return Coll(src.kind, out)
    if name == "collect":
        out = []
        for e in elems:
            v = body_for(e)
            if is_invalid(v):
                return v
            out.extend(v.elements if isinstance(v, Coll) else [v])
        return Coll(BAG, out)
    if name in ("one", "any"):
        hits = []
        for e in elems:
            v = C.as_bool_or_invalid(env, body_for(e), f"{name} body")
            if is_invalid(v):
                return v
            if v is True:
                if name == "any":
                    return e
                hits.append(e)
        return len(hits) == 1 if name == "one" else None
    if name == "isUnique":
        seen = []
        for e in elems:
            v = body_for(e)
            if is_invalid(v):
                return v
            if any(value_equal(v, s) is True for s in seen):
                return False
            seen.append(v)
        return True
    if name == "sortedBy":
        keyed = []
        for e in elems:
            k = body_for(e)
            if is_invalid(k):
                return k
            keyed.append((k, e))
        if not C.sort_key_ok([k for k, _ in keyed]):
            return env.invalid("sortedBy keys must be all numbers or all strings")
        keyed.sort(key=lambda pair: pair[0])
        return Coll(SEQUENCE, [e for _, e in keyed])
    return env.invalid(f"unknown iterator {name!r}")


def _iterate(node, env):
    src = as_collection(eval_ocl(node.source, env))
    if is_invalid(src):
        return src
    acc = eval_ocl(node.init, env)
    for e in src:
        acc = eval_ocl(node.body, env.bind_many({node.var: e, node.acc: acc}))
    return acc


_HANDLERS = {
    A.Literal: _literal,
    A.CollectionLiteral: _collection_literal,
    A.Var: _var,
    A.ResultRef: _result,
    A.Nav: _nav,
    A.AtPre: _at_pre,
    A.OpCall: _op_call,
    A.ArrowCall: _arrow_call,
    A.IteratorExp: _iterator,
    A.IterateExp: _iterate,
    A.AllInstances: _all_instances,
    A.TypeOp: _type_op,
    A.Binary: _binary,
    A.Unary: _unary,
    A.If: _if,
    A.Let: _let,
}
