"""Evaluator for NavEx ASTs over the shared runtime value domain."""

from __future__ import annotations

import math
from datetime import datetime, timezone

from ..errors import ModelError, ParseError
from ..model import ObjRef
from ..navex import ast as A
from ..values import (
    SEQUENCE,
    STORE,
    Builtin,
    ClassRef,
    Closure,
    Coll,
    Record,
    SlotHandle,
    StoreRef,
    is_int,
    is_invalid,
    is_number,
    logic_and,
    logic_not,
    logic_or,
    type_name,
    value_equal,
)
from . import common as C
from .env import Env

BUILTINS = {"Math": Builtin("Math"), "Date": Builtin("Date")}

COLLECTION_METHODS = {
    "map", "filter", "reduce", "includes", "some", "every", "find", "concat", "slice", "indexOf", "flat",
}
STRING_METHODS = {
    "toUpperCase", "toLowerCase", "substring", "concat", "indexOf", "includes", "startsWith", "endsWith",
}
STORE_METHODS = {"addObject", "executeQuery"}
MATH_METHODS = {"abs", "floor", "round", "max", "min", "trunc"}


def eval_navex(node, env: Env):
    """Evaluate a NavEx expression node in ``env``."""
    handler = _HANDLERS.get(type(node))
    if handler is None:
        raise TypeError(f"not a NavEx node: {node!r}")
    return handler(node, env)


def _literal(node, env):
    return node.value


def _list(node, env):
    items = [eval_navex(i, env) for i in node.items]
    for i in items:
        if is_invalid(i):
            return i
    return Coll(SEQUENCE, items)


def _record(node, env):
    entries = []
    for key, expr in node.entries:
        v = eval_navex(expr, env)
        if is_invalid(v):
            return v
        entries.append((key, v))
    return Record(tuple(entries))


def _ident(node, env):
    name = node.name
    if name in env.vars:
        return env.vars[name]
    if name == "data":
        return env.context
    if name in BUILTINS:
        return BUILTINS[name]
    if name == "undefined":
        return None
    if name in env.store.metamodel.classes:
        return ClassRef(name)
    return env.invalid(f"unknown identifier {name!r}")


def _lambda(node, env):
    return Closure(node.params, node.body, tuple(env.vars.items()))


def apply_closure(env, fn, args):
    if not isinstance(fn, Closure) or fn.body is None:
        return env.invalid(f"{type_name(fn)} is not callable")
    bindings = dict(fn.captured)
    for i, p in enumerate(fn.params):
        bindings[p] = args[i] if i < len(args) else None
    scope = Env(
        store=env.store,
        context=env.context,
        vars=bindings,
        pre_store=env.pre_store,
        result=env.result,
        writable=env.writable,
        diagnostics=env.diagnostics,
    )
    return eval_navex(fn.body, scope)


# -- member access ------------------------------------------------------------------


def _dollar(node, env):
    obj = eval_navex(node.obj, env)
    if is_invalid(obj):
        return obj
    if not isinstance(obj, ObjRef):
        return env.invalid(f"${node.name} on {type_name(obj)}")
    mobj = env.store.objects.get(obj.id)
    if mobj is None:
        return env.invalid(f"no object {obj.id!r}")
    meta = env.store.metamodel.feature(mobj.class_name, node.name)
    if meta is None:
        return env.invalid(f"UnknownFeature: {mobj.class_name} has no feature {node.name!r}")
    return SlotHandle(obj.id, node.name, meta.many)


def member(env, obj, name: str):
    if is_invalid(obj):
        return obj
    if obj is None:
        return env.invalid(f"member .{name} of null")
    if isinstance(obj, SlotHandle):
        if name == "values":
            v = C.read_feature(env, env.store, ObjRef(obj.object_id), obj.feature)
            if is_invalid(v) or isinstance(v, Coll):
                return v
            return Coll(SEQUENCE, () if v is None else (v,))
        if name == "value":
            if obj.many:
                return env.invalid(f".value on multi-valued ${obj.feature}; use .values")
            return C.read_feature(env, env.store, ObjRef(obj.object_id), obj.feature)
    elif isinstance(obj, ObjRef):
        mobj = env.store.objects.get(obj.id)
        if mobj is None:
            return env.invalid(f"no object {obj.id!r}")
        if name == "id":
            return obj.id
        if name == "instanceof":
            return ClassRef(mobj.class_name)
        if name == "parent":
            return C.parent_of(env.store, obj)
        if name == "allInstances":
            return C.all_instances(env, mobj.class_name)
        if name == "name":
            meta = env.store.metamodel.feature(mobj.class_name, "name")
            if meta is not None and not meta.many:
                return C.read_feature(env, env.store, obj, "name")
    elif isinstance(obj, ClassRef):
        if name == "name":
            return obj.name
        if name == "allInstances":
            return C.all_instances(env, obj.name)
    elif isinstance(obj, Coll):
        if name == "length":
            return len(obj)
    elif isinstance(obj, str):
        if name == "length":
            return len(obj)
    elif isinstance(obj, StoreRef):
        if name == "objects":
            return Coll(SEQUENCE, [ObjRef(i) for i in env.store.objects])
    elif isinstance(obj, Record):
        entries = obj.as_dict()
        for key in (name, "$" + name):
            if key in entries:
                return entries[key]
    elif isinstance(obj, Builtin) and obj.name == "Math" and name == "PI":
        return math.pi
    return env.invalid(f"UnknownMember: {type_name(obj)} has no member {name!r}")


def _member(node, env):
    return member(env, eval_navex(node.obj, env), node.name)


def _index(node, env):
    obj = eval_navex(node.obj, env)
    idx = eval_navex(node.index, env)
    for v in (obj, idx):
        if is_invalid(v):
            return v
    if not is_int(idx):
        return env.invalid(f"index must be an Integer, got {type_name(idx)}")
    if isinstance(obj, Coll):
        return obj.elements[idx] if 0 <= idx < len(obj) else None
    if isinstance(obj, str):
        return obj[idx] if 0 <= idx < len(obj) else None
    return env.invalid(f"cannot index {type_name(obj)}")


# -- calls ------------------------------------------------------------------------------


def _call(node, env):
    args = [eval_navex(a, env) for a in node.args]
    if isinstance(node.callee, A.Member):
        target = eval_navex(node.callee.obj, env)
        if is_invalid(target):
            return target
        for a in args:
            if is_invalid(a):
                return a
        return call_method(env, target, node.callee.name, args)
    fn = eval_navex(node.callee, env)
    if is_invalid(fn):
        return fn
    return apply_closure(env, fn, args)


def call_method(env, target, name, args):
    if isinstance(target, Coll) and name in COLLECTION_METHODS:
        return _collection_method(env, target, name, args)
    if isinstance(target, str) and name in STRING_METHODS:
        return _string_method(env, target, name, args)
    if isinstance(target, Builtin):
        if target.name == "Math" and name in MATH_METHODS:
            return _math(env, name, args)
        if target.name == "Date" and name == "parse":
            return _date_parse(env, args)
    if isinstance(target, StoreRef) and name in STORE_METHODS:
        return _store_method(env, name, args)
    value = member(env, target, name)
    if is_invalid(value):
        return value
    return apply_closure(env, value, args)


def _truth(env, v, what):
    return C.as_bool_or_invalid(env, v, what)


def _collection_method(env, coll: Coll, name, args):
    elems = coll.elements
    fn = args[0] if args else None

    def call(*xs):
        return apply_closure(env, fn, list(xs))

    if name in ("map", "filter", "some", "every", "find") and not isinstance(fn, Closure):
        return env.invalid(f"{name}() expects a function")
    if name == "map":
        out = []
        for i, e in enumerate(elems):
            v = call(e, i)
            if is_invalid(v):
                return v
            out.append(v)
        return Coll(SEQUENCE, out)
    if name == "filter":
        out = []
        for i, e in enumerate(elems):
            v = _truth(env, call(e, i), "filter callback")
            if is_invalid(v):
                return v
            if v:
                out.append(e)
        return Coll(SEQUENCE, out)
    if name == "find":
        for i, e in enumerate(elems):
            v = _truth(env, call(e, i), "find callback")
            if is_invalid(v):
                return v
            if v:
                return e
        return None
    if name in ("some", "every"):
        fold = logic_and if name == "every" else logic_or
        acc = name == "every"
        for i, e in enumerate(elems):
            acc = fold(acc, call(e, i))
        return acc
    if name == "reduce":
        if not isinstance(fn, Closure):
            return env.invalid("reduce() expects a function")
        if len(args) >= 2:
            acc, rest, start = args[1], elems, 0
        elif elems:
            acc, rest, start = elems[0], elems[1:], 1
        else:
            return env.invalid("reduce() of empty collection with no initial value")
        for i, e in enumerate(rest, start=start):
            acc = call(acc, e, i)
            if is_invalid(acc):
                return acc
        return acc
    if name == "includes":
        return any(value_equal(e, args[0], strict=True) is True for e in elems)
    if name == "indexOf":
        for i, e in enumerate(elems):
            if value_equal(e, args[0], strict=True) is True:
                return i
        return -1
    if name == "concat":
        out = list(elems)
        for a in args:
            out.extend(a.elements if isinstance(a, Coll) else [a])
        return Coll(SEQUENCE, out)
    if name == "slice":
        for a in args:
            if not is_int(a):
                return env.invalid("slice() expects Integers")
        start = args[0] if args else None
        stop = args[1] if len(args) > 1 else None
        return Coll(SEQUENCE, elems[start:stop])
    if name == "flat":
        out = []
        for e in elems:
            out.extend(e.elements if isinstance(e, Coll) else [e])
        return Coll(SEQUENCE, out)
    return env.invalid(f"unknown collection method {name!r}")


def _string_method(env, s: str, name, args):
    if name == "toUpperCase":
        return s.upper()
    if name == "toLowerCase":
        return s.lower()
    if name == "concat":
        if not all(isinstance(a, str) for a in args):
            return env.invalid("concat() expects Strings")
        return s + "".join(args)
    if name == "substring":
        if not args or not all(is_int(a) for a in args):
            return env.invalid("substring() expects Integers")
        lo = min(max(args[0], 0), len(s))
        hi = min(max(args[1], 0), len(s)) if len(args) > 1 else len(s)
        if lo > hi:
            lo, hi = hi, lo
        return s[lo:hi]
    if not args or not isinstance(args[0], str):
        return env.invalid(f"{name}() expects a String")
    if name == "indexOf":
        return s.find(args[0])
    if name == "includes":
        return args[0] in s
    if name == "startsWith":
        return s.startswith(args[0])
    if name == "endsWith":
        return s.endswith(args[0])
    return env.invalid(f"unknown String method {name!r}")


def _math(env, name, args):
    for a in args:
        if not is_number(a):
            return env.invalid(f"Math.{name}() expects numbers, got {type_name(a)}")
    if name in ("max", "min"):
        if not args:
            return env.invalid(f"Math.{name}() of nothing")
        r = max(args) if name == "max" else min(args)
        return float(r) if any(isinstance(a, float) for a in args) else r
    if len(args) != 1:
        return env.invalid(f"Math.{name}() takes one argument")
    x = args[0]
    if name == "abs":
        return abs(x)
    if name == "floor":
        return math.floor(x)
    if name == "trunc":
        return math.trunc(x)
    if name == "round":
        # JavaScript rounds halves toward +infinity
        return math.floor(x + 0.5) if isinstance(x, float) else x
    return env.invalid(f"unknown Math method {name!r}")


def _date_parse(env, args):
    if len(args) != 1 or not isinstance(args[0], str):
        return env.invalid("Date.parse() expects a String")
    text = args[0].replace("Z", "+00:00")
    try:
        when = datetime.fromisoformat(text)
    except ValueError:
        return env.invalid(f"unparseable date {args[0]!r}")
    if when.tzinfo is None:
        when = when.replace(tzinfo=timezone.utc)
    delta = when - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000


def _slot_values(value):
    if isinstance(value, Coll):
        return [_slot_values(v) for v in value.elements]
    if isinstance(value, ObjRef):
        return value.id
    return value


def _store_method(env, name, args):
    if name == "executeQuery":
        from ..navex import parse_navex

        if not args or not isinstance(args[0], str):
            return env.invalid("executeQuery() expects NavEx source text")
        try:
            ast = parse_navex(args[0])
        except ParseError as exc:
            return env.invalid(str(exc))
        return eval_navex(ast, Env(store=env.store, context=STORE, diagnostics=env.diagnostics))
    if not env.writable:
        return env.invalid("addObject() needs a writable store; queries are pure")
    if len(args) != 2 or not isinstance(args[0], Record) or not isinstance(args[1], str):
        return env.invalid("addObject() expects ({$feature: value, ...}, 'ClassName')")
    init = {k: _slot_values(v) for k, v in args[0].entries}
    try:
        return ObjRef(env.store.add_object(args[1], init))
    except ModelError as exc:
        return env.invalid(str(exc))


# -- operators --------------------------------------------------------------------------


def _binary(node, env):
    op = node.op
    a = eval_navex(node.left, env)
    b = eval_navex(node.right, env)
    if op == "&&":
        return logic_and(a, b)
    if op == "||":
        return logic_or(a, b)
    if op in ("===", "!==", "==", "!="):
        eq = value_equal(a, b, strict=op in ("===", "!=="))
        return logic_not(eq) if op.startswith("!") else eq
    if op in ("<", "<=", ">", ">="):
        return C.compare(env, op, a, b)
    if op == "+" and isinstance(a, str) and isinstance(b, str):
        return a + b
    if op == "%":
        for v in (a, b):
            if is_invalid(v):
                return v
        if not (is_number(a) and is_number(b)):
            return env.invalid(f"{type_name(a)} % {type_name(b)}")
        if b == 0:
            return env.invalid("modulo by zero")
        return C.num_mod(a, b)
    return C.arith(env, op, a, b)


def _unary(node, env):
    v = eval_navex(node.operand, env)
    if node.op == "!":
        return logic_not(v)
    if is_invalid(v):
        return v
    if not is_number(v):
        return env.invalid(f"-{type_name(v)}")
    return -v


def _cond(node, env):
    c = eval_navex(node.cond, env)
    if c is True:
        return eval_navex(node.then, env)
    if c is False:
        return eval_navex(node.otherwise, env)
    if is_invalid(c):
        return c
    return env.invalid(f"condition is {type_name(c)}")


_HANDLERS = {
    A.Literal: _literal,
    A.ListLit: _list,
    A.RecordLit: _record,
    A.Ident: _ident,
    A.Member: _member,
    A.Dollar: _dollar,
    A.Index: _index,
    A.Call: _call,
    A.Lambda: _lambda,
    A.Binary: _binary,
    A.Unary: _unary,
    A.Cond: _cond,
}
