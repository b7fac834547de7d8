"""Operations both evaluators share: feature reads, arithmetic, ordering."""

from __future__ import annotations

import math

from ..model import MetaReference, ModelStore, ObjRef
from ..values import (
    BAG,
    SEQUENCE,
    SET,
    STORE,
    ClassRef,
    Coll,
    is_bool,
    is_int,
    is_invalid,
    is_number,
    type_name,
)

PRIMITIVE_KIND = {"Boolean": ("Boolean",), "Integer": ("Integer",), "Real": ("Real",), "String": ("String",)}


def read_feature(env, store: ModelStore, ref, name: str):
    """Value of feature ``name`` on object ``ref`` in ``store``.

    Single-valued features yield the value or null; multi-valued ones a
    Sequence in slot order.
    """
    obj = store.objects.get(ref.id)
    if obj is None:
        return env.invalid(f"no object {ref.id!r}")
    meta = store.metamodel.feature(obj.class_name, name)
    if meta is None:
        return env.invalid(f"UnknownFeature: {obj.class_name} has no feature {name!r}")
    raw = obj.slots.get(name, [])
    if isinstance(meta, MetaReference):
        values = [ObjRef(v) for v in raw]
    else:
        values = list(raw)
    if meta.many:
        return Coll(SEQUENCE, values)
    return values[0] if values else None


def class_of(store: ModelStore, value) -> str | None:
    if isinstance(value, ObjRef):
        obj = store.objects.get(value.id)
        return obj.class_name if obj else None
    return None


def parent_of(store: ModelStore, ref: ObjRef):
    holder = store.container_of(ref.id)
    return STORE if holder is None else ObjRef(holder[0])


def all_instances(env, class_name: str):
    if class_name not in env.store.metamodel.classes:
        return env.invalid(f"UnknownClass: {class_name!r}")
    return Coll(SET, env.store.all_instances(class_name, include_subclasses=True))


def is_type_of(env, value, type_name_: str):
    if isinstance(value, ObjRef):
        return class_of(env.store, value) == type_name_
    return type_name(value) == type_name_


def is_kind_of(env, value, type_name_: str):
    if type_name_ == "OclAny":
        return not isinstance(value, Coll)
    if isinstance(value, ObjRef):
        cls = class_of(env.store, value)
        return cls is not None and env.store.metamodel.conforms(cls, type_name_)
    if is_int(value) and type_name_ == "Real":
        return True
    if isinstance(value, Coll) and type_name_ == "Collection":
        return True
    return type_name(value) == type_name_


def known_type(env, name: str) -> bool:
    return (
        name in env.store.metamodel.classes
        or name in PRIMITIVE_KIND
        or name in ("OclAny", "Collection", SET, BAG, SEQUENCE)
    )


# -- arithmetic -----------------------------------------------------------------


def arith(env, op: str, a, b):
    for v in (a, b):
        if is_invalid(v):
            return v
    if not (is_number(a) and is_number(b)):
        return env.invalid(f"{type_name(a)} {op} {type_name(b)}")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            return env.invalid("division by zero")
        return a / b
    raise ValueError(op)


def int_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_mod(a: int, b: int) -> int:
    return a - b * int_div(a, b)


def num_mod(a, b):
    """Remainder with the sign of the dividend (for ints and reals alike)."""
    if is_int(a) and is_int(b):
        return int_mod(a, b)
    return math.fmod(a, b)


def round_half_away(x) -> int:
    if is_int(x):
        return x
    r = math.floor(abs(x) + 0.5)
    return int(r if x >= 0 else -r)


def compare(env, op: str, a, b):
    for v in (a, b):
        if is_invalid(v):
            return v
    ok = (is_number(a) and is_number(b)) or (isinstance(a, str) and isinstance(b, str))
    if not ok:
        return env.invalid(f"cannot order {type_name(a)} and {type_name(b)}")
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(op)


def sort_key_ok(keys) -> bool:
    return all(is_number(k) for k in keys) or all(isinstance(k, str) for k in keys)


def numeric_sum(env, elements):
    total = 0
    for e in elements:
        if is_invalid(e):
            return e
        if not is_number(e):
            return env.invalid(f"sum over {type_name(e)}")
        total = total + e
    return total


def as_bool_or_invalid(env, v, what: str):
    if is_bool(v) or is_invalid(v):
        return v
    return env.invalid(f"{what} must be Boolean, got {type_name(v)}")


def class_ref_name(v) -> str | None:
    return v.name if isinstance(v, ClassRef) else None
