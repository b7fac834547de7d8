"""Runtime values shared by the OCL and NavEx evaluators.

Python natives carry the scalar cases: ``None`` is Null, ``bool``/``int``/
``float``/``str`` are Bool/Int/Real/Str. Everything else has a small class
here. ``Invalid`` is OCL's error value; all instances compare equal, the
``reason`` is diagnostic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .model import ObjRef

SET, BAG, SEQUENCE = "Set", "Bag", "Sequence"
KINDS = (SET, BAG, SEQUENCE)


@dataclass(frozen=True)
class Invalid:
    reason: str = field(default="invalid", compare=False)

    def __repr__(self) -> str:
        return f"Invalid({self.reason!r})"


INVALID = Invalid()


@dataclass(frozen=True)
class ClassRef:
    name: str


@dataclass(frozen=True)
class SlotHandle:
    object_id: str
    feature: str
    many: bool


@dataclass(frozen=True)
class StoreRef:
    """The model root: ``parent`` of a root object, ``self`` of a store-level query."""


STORE = StoreRef()


@dataclass(frozen=True)
class Closure:
    params: tuple[str, ...]
    body: Any
    captured: tuple = ()


@dataclass(frozen=True)
class Record:
    entries: tuple[tuple[str, Any], ...]

    def as_dict(self) -> dict:
        return dict(self.entries)


@dataclass(frozen=True)
class Builtin:
    """A global namespace such as ``Math`` or ``Date``."""

    name: str


class Coll:
    """Kinded collection. Sets drop duplicates on construction (value equality)."""

    __slots__ = ("kind", "elements")

    def __init__(self, kind: str, elements=()):
        if kind not in KINDS:
            raise ValueError(f"unknown collection kind {kind!r}")
        elements = tuple(elements)
        if kind == SET:
            unique: list = []
            for e in elements:
                if not any(value_equal(e, u) is True for u in unique):
                    unique.append(e)
            elements = tuple(unique)
        self.kind = kind
        self.elements = elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"{self.kind}{{{', '.join(map(repr, self.elements))}}}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coll):
            return NotImplemented
        return value_equal(self, other) is True

    def __hash__(self) -> int:
        return hash((self.kind, len(self.elements)))


# --------------------------------------------------------------------------
# classification helpers


def is_invalid(v) -> bool:
    return isinstance(v, Invalid)


def is_bool(v) -> bool:
    return isinstance(v, bool)


def is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def is_real(v) -> bool:
    return isinstance(v, float)


def is_number(v) -> bool:
    return is_int(v) or is_real(v)


def type_name(v) -> str:
    if v is None:
        return "Null"
    if is_invalid(v):
        return "Invalid"
    if is_bool(v):
        return "Boolean"
    if is_int(v):
        return "Integer"
    if is_real(v):
        return "Real"
    if isinstance(v, str):
        return "String"
    if isinstance(v, Coll):
        return v.kind
    return type(v).__name__


# --------------------------------------------------------------------------
# equality


def value_equal(a, b, *, strict: bool = False):
    """Value equality. Returns True/False, or INVALID when either side is invalid.

    ``strict`` (NavEx ``===``) distinguishes Integer 1 from Real 1.0.
    Collections are equal when kinds match and elements are equal per kind:
    ordered for Sequence, as multisets for Bag, as sets for Set.
    """
    if is_invalid(a) or is_invalid(b):
        return INVALID
    if a is None or b is None:
        return a is None and b is None
    if is_bool(a) or is_bool(b):
        return is_bool(a) and is_bool(b) and a == b
    if is_number(a) and is_number(b):
        if strict and type(a) is not type(b):
            return False
        return a == b
    if isinstance(a, Coll) and isinstance(b, Coll):
        if a.kind != b.kind or len(a) != len(b):
            return False
        if a.kind == SEQUENCE:
            return all(value_equal(x, y, strict=strict) is True for x, y in zip(a, b))
        remaining = list(b.elements)
        for x in a:
            for i, y in enumerate(remaining):
                if value_equal(x, y, strict=strict) is True:
                    del remaining[i]
                    break
            else:
                return False
        return True
    if type(a) is not type(b):
        return False
    return a == b


# --------------------------------------------------------------------------
# four-valued logic
#
# Operands are True, False, None (null) or an Invalid. Any other operand is
# a type error and behaves as invalid. False dominates ``and``, True
# dominates ``or``; otherwise invalid beats null.


def _logical(v):
    if v is True or v is False or v is None or is_invalid(v):
        return v
    return Invalid(f"{type_name(v)} used as Boolean")


def _undefined_merge(a, b):
    if is_invalid(a):
        return a
    if is_invalid(b):
        return b
    return None


def logic_and(a, b):
    a, b = _logical(a), _logical(b)
    if a is False or b is False:
        return False
    if a is True:
        return b
    if b is True:
        return a
    return _undefined_merge(a, b)


def logic_or(a, b):
    a, b = _logical(a), _logical(b)
    if a is True or b is True:
        return True
    if a is False:
        return b
    if b is False:
        return a
    return _undefined_merge(a, b)


def logic_not(a):
    a = _logical(a)
    if a is True or a is False:
        return not a
    return a


def logic_xor(a, b):
    a, b = _logical(a), _logical(b)
    if (a is True or a is False) and (b is True or b is False):
        return a != b
    return _undefined_merge(a if not isinstance(a, bool) else None, b if not isinstance(b, bool) else None)


def logic_implies(a, b):
    a, b = _logical(a), _logical(b)
    if a is False or b is True:
        return True
    if a is True:
        return b
    # a is undefined, b is False or undefined
    if b is False:
        return a
    return _undefined_merge(a, b)


# --------------------------------------------------------------------------
# portable literal notation (JSON-compatible)


def to_portable(v):
    """Encode a runtime value as JSON-compatible data."""
    if v is None or is_bool(v) or is_number(v) or isinstance(v, str):
        return v
    if is_invalid(v):
        return {"invalid": True}
    if isinstance(v, Coll):
        return {v.kind: [to_portable(e) for e in v]}
    if isinstance(v, ObjRef):
        return {"ref": v.id}
    if isinstance(v, ClassRef):
        return {"class": v.name}
    if isinstance(v, SlotHandle):
        return {"slot": [v.object_id, v.feature]}
    if isinstance(v, StoreRef):
        return {"store": True}
    if isinstance(v, Record):
        return {"record": {k: to_portable(x) for k, x in v.entries}}
    if isinstance(v, Builtin):
        return {"builtin": v.name}
    if isinstance(v, Closure):
        return {"closure": list(v.params)}
    raise TypeError(f"not a runtime value: {v!r}")


def from_portable(data):
    """Inverse of ``to_portable`` (closures decode to parameter lists only)."""
    if data is None or isinstance(data, (bool, int, float, str)):
        return data
    if isinstance(data, list):
        return Coll(SEQUENCE, [from_portable(d) for d in data])
    if isinstance(data, dict) and len(data) == 1:
        (key, payload), = data.items()
        if key in KINDS:
            return Coll(key, [from_portable(d) for d in payload])
        if key == "invalid":
            return INVALID
        if key == "ref":
            return ObjRef(payload)
        if key == "class":
            return ClassRef(payload)
        if key == "slot":
            return SlotHandle(payload[0], payload[1], False)
        if key == "store":
            return STORE
        if key == "record":
            return Record(tuple((k, from_portable(x)) for k, x in payload.items()))
        if key == "builtin":
            return Builtin(payload)
        if key == "closure":
            return Closure(tuple(payload), None)
    raise ValueError(f"not a portable literal: {data!r}")


def render(v) -> str:
    """Human-readable literal, as printed by ``mvx query``."""
    if v is None:
        return "null"
    if is_invalid(v):
        return "invalid"
    if is_bool(v):
        return "true" if v else "false"
    if is_number(v):
        return repr(v)
    if isinstance(v, str):
        return "'" + v.replace("\\", "\\\\").replace("'", "\\'") + "'"
    if isinstance(v, Coll):
        return f"{v.kind}{{{', '.join(render(e) for e in v)}}}"
    if isinstance(v, ObjRef):
        return f"@{v.id}"
    if isinstance(v, ClassRef):
        return v.name
    if isinstance(v, SlotHandle):
        return f"@{v.object_id}.${v.feature}"
    if isinstance(v, StoreRef):
        return "<model>"
    if isinstance(v, Record):
        return "{" + ", ".join(f"{k}: {render(x)}" for k, x in v.entries) + "}"
    if isinstance(v, Builtin):
        return v.name
    if isinstance(v, Closure):
        return f"({', '.join(v.params)}) => ..."
    return repr(v)


# --------------------------------------------------------------------------
# cross-language normalization


def normalize(v):
    """Hashable, representation-independent key for comparing verdicts.

    Integer n matches Real n.0; a Sequence compared against a Bag is a
    multiset; anything compared against a Set is a set. Use ``agree`` for
    the pairwise rule, this function encodes a single value's canonical form.
    """
    if v is None:
        return ("null",)
    if is_invalid(v):
        return ("invalid",)
    if is_bool(v):
        return ("bool", v)
    if is_number(v):
        return ("num", float(v))
    if isinstance(v, str):
        return ("str", v)
    if isinstance(v, Coll):
        return ("coll", v.kind, tuple(normalize(e) for e in v))
    return ("other", repr(to_portable(v)))


def _multiset_agree(ea, eb) -> bool:
    if len(ea) != len(eb):
        return False
    pool = list(eb)
    for x in ea:
        for k, y in enumerate(pool):
            if agree(x, y):
                del pool[k]
                break
        else:
            return False
    return True


def agree(a, b) -> bool:
    """Semantic equality of two verdicts produced by different languages.

    Applied recursively, so nested collections follow the same rules.
    """
    if isinstance(a, Coll) and isinstance(b, Coll):
        ea, eb = list(a), list(b)
        if SET in (a.kind, b.kind):
            return all(any(agree(x, y) for y in eb) for x in ea) and all(any(agree(x, y) for x in ea) for y in eb)
        if BAG in (a.kind, b.kind):
            return _multiset_agree(ea, eb)
        return len(ea) == len(eb) and all(agree(x, y) for x, y in zip(ea, eb))
    if isinstance(a, Coll) or isinstance(b, Coll):
        return False
    return normalize(a) == normalize(b)
