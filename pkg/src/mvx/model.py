"""Metamodel and model store: classes, features, objects, slots.

Documents are plain JSON (see README). Loading a model never checks
conformance; ``check_conformance`` reports problems as data so that broken
models can still be inspected and validated.
"""

from __future__ import annotations

import copy
import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import jsonschema

from .errors import ModelError

PRIMITIVE_TYPES = ("Boolean", "Integer", "Real", "String")


class Unbounded:
    """Marker for an unbounded upper multiplicity (``-1`` in documents)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"

    def __reduce__(self):
        return (Unbounded, ())

    def __deepcopy__(self, memo):
        return self


UNBOUNDED = Unbounded()


def _upper_from_doc(value: int):
    return UNBOUNDED if value == -1 else value


def _upper_to_doc(value) -> int:
    return -1 if value is UNBOUNDED else value


# --------------------------------------------------------------------------
# Metamodel


@dataclass(frozen=True)
class MetaAttribute:
    name: str
    type: str
    lower: int = 0
    upper: int | Unbounded = 1

    @property
    def many(self) -> bool:
        return self.upper is UNBOUNDED or self.upper > 1


@dataclass(frozen=True)
class MetaReference:
    name: str
    target: str
    lower: int = 0
    upper: int | Unbounded = UNBOUNDED
    containment: bool = False

    @property
    def many(self) -> bool:
        return self.upper is UNBOUNDED or self.upper > 1


@dataclass(frozen=True)
class OperationSig:
    name: str
    params: tuple[tuple[str, str], ...] = ()
    return_type: str | None = None


@dataclass
class MetaClass:
    name: str
    is_abstract: bool = False
    supers: list[str] = field(default_factory=list)
    attributes: list[MetaAttribute] = field(default_factory=list)
    references: list[MetaReference] = field(default_factory=list)
    operations: list[OperationSig] = field(default_factory=list)


class MetaModel:
    """A validated set of classes. Build with ``load_metamodel`` or directly."""

    def __init__(self, name: str, classes: Iterable[MetaClass] = ()):
        self.name = name
        self.classes: dict[str, MetaClass] = {}
        for cls in classes:
            if cls.name in self.classes:
                raise ModelError(f"duplicate class {cls.name!r}", kind="DuplicateClass")
            self.classes[cls.name] = cls
        self._linear: dict[str, list[str]] = {}
        self._features: dict[str, dict[str, MetaAttribute | MetaReference]] = {}
        self._check()

    def _check(self) -> None:
        for cls in self.classes.values():
            for sup in cls.supers:
                if sup not in self.classes:
                    raise ModelError(
                        f"class {cls.name!r} extends unknown class {sup!r}", kind="UnknownClass"
                    )
            for ref in cls.references:
                if ref.target not in self.classes:
                    raise ModelError(
                        f"reference {cls.name}.{ref.name} targets unknown class {ref.target!r}",
                        kind="UnknownClass",
                    )
            for feat in [*cls.attributes, *cls.references]:
                if feat.upper is not UNBOUNDED and feat.lower > feat.upper:
                    raise ModelError(
                        f"{cls.name}.{feat.name}: lower {feat.lower} exceeds upper {feat.upper}",
                        kind="InvalidMultiplicity",
                    )
                if isinstance(feat, MetaAttribute) and feat.type not in PRIMITIVE_TYPES:
                    raise ModelError(
                        f"{cls.name}.{feat.name}: unknown primitive type {feat.type!r}",
                        kind="SchemaViolation",
                    )
            for op in cls.operations:
                names = [p for p, _ in op.params]
                if len(set(names)) != len(names):
                    raise ModelError(
                        f"{cls.name}::{op.name} has duplicate parameter names", kind="DuplicateParam"
                    )
        for name in self.classes:
            self._linearize(name, ())
        for name in self.classes:
            self._collect_features(name)

    def _linearize(self, name: str, visiting: tuple[str, ...]) -> list[str]:
        if name in self._linear:
            return self._linear[name]
        if name in visiting:
            cycle = " -> ".join([*visiting[visiting.index(name):], name])
            raise ModelError(f"cyclic inheritance {cycle}", kind="CyclicInheritance")
        order = [name]
        for sup in self.classes[name].supers:
            for anc in self._linearize(sup, (*visiting, name)):
                if anc not in order:
                    order.append(anc)
        self._linear[name] = order
        return order

    def _collect_features(self, name: str) -> None:
        features: dict[str, MetaAttribute | MetaReference] = {}
        for anc in self._linear[name]:
            cls = self.classes[anc]
            for feat in [*cls.attributes, *cls.references]:
                seen = features.get(feat.name)
                if seen is not None and seen is not feat:
                    raise ModelError(
                        f"class {name!r} has feature {feat.name!r} declared twice"
                        f" (via {anc!r})",
                        kind="DuplicateFeature",
                    )
                features[feat.name] = feat
        self._features[name] = features

    # -- queries -----------------------------------------------------------

    def ancestors(self, name: str) -> list[str]:
        """The class itself followed by its supers, depth-first, left to right."""
        return list(self._linear[name])

    def conforms(self, sub: str, sup: str) -> bool:
        return sub in self._linear and sup in self._linear[sub]

    def subclasses(self, name: str) -> list[str]:
        """Every class conforming to ``name`` (including itself), declaration order."""
        return [c for c in self.classes if self.conforms(c, name)]

    def features(self, class_name: str) -> dict[str, MetaAttribute | MetaReference]:
        return self._features[class_name]

    def feature(self, class_name: str, feature_name: str):
        return self._features.get(class_name, {}).get(feature_name)

    def operation(self, class_name: str, op_name: str) -> OperationSig | None:
        for anc in self._linear.get(class_name, ()):
            for op in self.classes[anc].operations:
                if op.name == op_name:
                    return op
        return None


_MULT = {"type": "integer", "minimum": -1}

METAMODEL_SCHEMA = {
    "type": "object",
    "required": ["name", "classes"],
    "properties": {
        "name": {"type": "string"},
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "abstract": {"type": "boolean"},
                    "supers": {"type": "array", "items": {"type": "string"}},
                    "attributes": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["name", "type"],
                            "properties": {
                                "name": {"type": "string", "minLength": 1},
                                "type": {"enum": list(PRIMITIVE_TYPES)},
                                "lower": {"type": "integer", "minimum": 0},
                                "upper": _MULT,
                            },
                        },
                    },
                    "references": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["name", "target"],
                            "properties": {
                                "name": {"type": "string", "minLength": 1},
                                "target": {"type": "string"},
                                "lower": {"type": "integer", "minimum": 0},
                                "upper": _MULT,
                                "containment": {"type": "boolean"},
                            },
                        },
                    },
                    "operations": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["name"],
                            "properties": {
                                "name": {"type": "string"},
                                "params": {
                                    "type": "array",
                                    "items": {
                                        "type": "object",
                                        "required": ["name", "type"],
                                        "properties": {
                                            "name": {"type": "string"},
                                            "type": {"type": "string"},
                                        },
                                    },
                                },
                                "returns": {"type": ["string", "null"]},
                            },
                        },
                    },
                },
            },
        },
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["objects"],
    "properties": {
        "metamodel": {"type": "string"},
        "objects": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "class"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "class": {"type": "string"},
                    "slots": {
                        "type": "object",
                        "additionalProperties": {
                            "anyOf": [
                                {"type": ["string", "number", "boolean"]},
                                {"type": "array", "items": {"type": ["string", "number", "boolean"]}},
                            ]
                        },
                    },
                },
            },
        },
    },
}


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _parse_document(text_or_doc) -> Any:
    if isinstance(text_or_doc, (str, bytes)):
        try:
            return json.loads(text_or_doc)
        except json.JSONDecodeError as exc:
            raise ModelError(
                f"invalid JSON: {exc.msg}", kind="SchemaViolation", path=f"line {exc.lineno}:{exc.colno}"
            ) from None
    return text_or_doc


def _validate_schema(doc, schema) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise ModelError(err.message, kind="SchemaViolation", path=_json_path(err.absolute_path))


def _normalize_type(name: str | None) -> str | None:
    # ``Number`` (JavaScript flavoured signatures) is Real.
    return "Real" if name == "Number" else name


def load_metamodel(text_or_doc) -> MetaModel:
    """Build a MetaModel from a JSON document (text or already-parsed dict)."""
    doc = _parse_document(text_or_doc)
    _validate_schema(doc, METAMODEL_SCHEMA)
    classes = []
    for i, c in enumerate(doc["classes"]):
        cls = MetaClass(
            name=c["name"],
            is_abstract=c.get("abstract", False),
            supers=list(c.get("supers", [])),
            attributes=[
                MetaAttribute(a["name"], a["type"], a.get("lower", 0), _upper_from_doc(a.get("upper", 1)))
                for a in c.get("attributes", [])
            ],
            references=[
                MetaReference(
                    r["name"],
                    r["target"],
                    r.get("lower", 0),
                    _upper_from_doc(r.get("upper", -1)),
                    r.get("containment", False),
                )
                for r in c.get("references", [])
            ],
            operations=[
                OperationSig(
                    o["name"],
                    tuple((p["name"], _normalize_type(p["type"])) for p in o.get("params", [])),
                    _normalize_type(o.get("returns")),
                )
                for o in c.get("operations", [])
            ],
        )
        classes.append((i, cls))
    seen: dict[str, int] = {}
    for i, cls in classes:
        if cls.name in seen:
            raise ModelError(f"duplicate class {cls.name!r}", kind="DuplicateClass", path=f"$.classes[{i}].name")
        seen[cls.name] = i
    try:
        return MetaModel(doc["name"], [cls for _, cls in classes])
    except ModelError as exc:
        if exc.path is None:
            exc.path = "$.classes"
        raise


def dump_metamodel(mm: MetaModel) -> dict:
    return {
        "name": mm.name,
        "classes": [
            {
                "name": c.name,
                "abstract": c.is_abstract,
                "supers": list(c.supers),
                "attributes": [
                    {"name": a.name, "type": a.type, "lower": a.lower, "upper": _upper_to_doc(a.upper)}
                    for a in c.attributes
                ],
                "references": [
                    {
                        "name": r.name,
                        "target": r.target,
                        "lower": r.lower,
                        "upper": _upper_to_doc(r.upper),
                        "containment": r.containment,
                    }
                    for r in c.references
                ],
                "operations": [
                    {"name": o.name, "params": [{"name": n, "type": t} for n, t in o.params], "returns": o.return_type}
                    for o in c.operations
                ],
            }
            for c in mm.classes.values()
        ],
    }


# --------------------------------------------------------------------------
# Model


@dataclass(frozen=True)
class ObjRef:
    """Reference to a model object by id."""

    id: str

    def __repr__(self) -> str:
        return f"@{self.id}"


@dataclass
class MObject:
    id: str
    class_name: str
    slots: dict[str, list] = field(default_factory=dict)


@dataclass(frozen=True)
class ChangeEvent:
    object_id: str
    feature: str
    old_values: tuple
    new_values: tuple


@dataclass(frozen=True)
class FeatureHandle:
    """Result of reflective feature access: slot values with ids resolved."""

    feature: str
    values: tuple
    many: bool


class ViolationKind(enum.Enum):
    UnknownClass = "UnknownClass"
    AbstractInstantiation = "AbstractInstantiation"
    UnknownFeature = "UnknownFeature"
    TypeMismatch = "TypeMismatch"
    MultiplicityViolation = "MultiplicityViolation"
    DanglingReference = "DanglingReference"
    DuplicateContainment = "DuplicateContainment"


_KIND_ORDER = {k: i for i, k in enumerate(ViolationKind)}


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    object_id: str
    feature: str | None
    message: str

    def sort_key(self):
        return (self.object_id, self.feature or "", _KIND_ORDER[self.kind], self.message)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "object": self.object_id, "feature": self.feature, "message": self.message}


def value_matches(type_name: str, value) -> bool:
    if type_name == "Boolean":
        return isinstance(value, bool)
    if type_name == "Integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if type_name == "Real":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if type_name == "String":
        return isinstance(value, str)
    return False


class ModelStore:
    """Objects conforming (or not) to a metamodel, kept in insertion order."""

    def __init__(self, metamodel: MetaModel):
        self.metamodel = metamodel
        self.objects: dict[str, MObject] = {}
        self.listeners: list[Callable[[ChangeEvent], None]] = []
        self._next_id = 1

    def __len__(self) -> int:
        return len(self.objects)

    def __contains__(self, object_id) -> bool:
        return object_id in self.objects

    @property
    def insertion_order(self) -> list[str]:
        return list(self.objects)

    def get(self, object_id: str) -> MObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise ModelError(f"no object with id {object_id!r}", kind="UnknownObject") from None

    def _insert(self, obj: MObject) -> None:
        if obj.id in self.objects:
            raise ModelError(f"duplicate object id {obj.id!r}", kind="DuplicateId")
        self.objects[obj.id] = obj

    def _emit(self, event: ChangeEvent) -> None:
        for listener in list(self.listeners):
            listener(event)

    def _fresh_id(self) -> str:
        while True:
            candidate = f"o{self._next_id}"
            self._next_id += 1
            if candidate not in self.objects:
                return candidate

    # -- mutation ------------------------------------------------------------

    def add_object(self, class_name: str, init: dict | None = None) -> str:
        """Create an object; ``init`` maps ``$feature`` (and ``$id``) to values."""
        mm = self.metamodel
        cls = mm.classes.get(class_name)
        if cls is None:
            raise ModelError(f"unknown class {class_name!r}", kind="UnknownClass")
        if cls.is_abstract:
            raise ModelError(f"class {class_name!r} is abstract", kind="AbstractInstantiation")
        slots: dict[str, list] = {}
        object_id = None
        for key, value in (init or {}).items():
            name = key[1:] if key.startswith("$") else key
            if name == "id":
                object_id = str(value)
                continue
            if mm.feature(class_name, name) is None:
                raise ModelError(f"class {class_name!r} has no feature {name!r}", kind="UnknownFeature")
            slots[name] = _as_list(value)
        if object_id is None:
            object_id = self._fresh_id()
        elif object_id in self.objects:
            raise ModelError(f"duplicate object id {object_id!r}", kind="DuplicateId")
        for name in mm.features(class_name):
            slots.setdefault(name, [])
        self._insert(MObject(object_id, class_name, slots))
        for name, values in slots.items():
            if values:
                self._emit(ChangeEvent(object_id, name, (), tuple(values)))
        return object_id

    def set_value(self, object_id: str, feature: str, values) -> ChangeEvent | None:
        """Replace a slot. Returns the change, or None when nothing changed."""
        obj = self.get(object_id)
        meta = self.metamodel.feature(obj.class_name, feature)
        if meta is None:
            raise ModelError(f"{obj.class_name} has no feature {feature!r}", kind="UnknownFeature")
        values = [v.id if isinstance(v, ObjRef) else v for v in _as_list(values)]
        if isinstance(meta, MetaAttribute):
            for v in values:
                if not value_matches(meta.type, v):
                    raise ModelError(
                        f"{obj.class_name}.{feature} expects {meta.type}, got {v!r}", kind="TypeMismatch"
                    )
        else:
            for v in values:
                if not isinstance(v, str):
                    raise ModelError(f"{obj.class_name}.{feature} expects object ids, got {v!r}", kind="TypeMismatch")
                if v not in self.objects:
                    raise ModelError(f"{obj.class_name}.{feature}: no object {v!r}", kind="DanglingReference")
        if len(values) < meta.lower or (meta.upper is not UNBOUNDED and len(values) > meta.upper):
            raise ModelError(
                f"{obj.class_name}.{feature} takes [{meta.lower}..{meta.upper}] values, got {len(values)}",
                kind="MultiplicityViolation",
            )
        old = obj.slots.get(feature, [])
        if _same_values(old, values):
            return None
        obj.slots[feature] = values
        event = ChangeEvent(object_id, feature, tuple(old), tuple(values))
        self._emit(event)
        return event

    # -- reading -------------------------------------------------------------

    def get_feature(self, object_id: str, feature: str) -> FeatureHandle:
        obj = self.get(object_id)
        meta = self.metamodel.feature(obj.class_name, feature)
        if meta is None:
            raise ModelError(f"{obj.class_name} has no feature {feature!r}", kind="UnknownFeature")
        raw = obj.slots.get(feature, [])
        if isinstance(meta, MetaReference):
            resolved = tuple(ObjRef(v) for v in raw)
        else:
            resolved = tuple(raw)
        return FeatureHandle(feature, resolved, meta.many)

    def all_instances(self, class_name: str, include_subclasses: bool = True) -> list[ObjRef]:
        mm = self.metamodel
        if class_name not in mm.classes:
            raise ModelError(f"unknown class {class_name!r}", kind="UnknownClass")
        if include_subclasses:
            return [ObjRef(o.id) for o in self.objects.values() if mm.conforms(o.class_name, class_name)]
        return [ObjRef(o.id) for o in self.objects.values() if o.class_name == class_name]

    def container_of(self, object_id: str) -> tuple[str, str] | None:
        """(container id, feature) holding ``object_id`` by containment, if any."""
        mm = self.metamodel
        for obj in self.objects.values():
            for name, values in obj.slots.items():
                meta = mm.feature(obj.class_name, name)
                if isinstance(meta, MetaReference) and meta.containment and object_id in values:
                    return obj.id, name
        return None

    # -- whole-store helpers ---------------------------------------------------

    def snapshot(self) -> "ModelStore":
        """An independent copy; evaluation runs against snapshots."""
        clone = ModelStore.__new__(ModelStore)
        clone.metamodel = self.metamodel
        clone.objects = copy.deepcopy(self.objects)
        clone.listeners = []
        clone._next_id = self._next_id
        return clone

    def to_document(self) -> dict:
        return dump_model(self)

    def content_hash(self) -> str:
        return hashlib.sha256(json.dumps(dump_model(self), sort_keys=True).encode()).hexdigest()


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _same_values(a: list, b: list) -> bool:
    # 1 and True compare equal in Python; slot equality must not conflate them.
    return len(a) == len(b) and all(type(x) is type(y) and x == y for x, y in zip(a, b))


def load_model(text_or_doc, mm: MetaModel) -> ModelStore:
    """Build a ModelStore; conformance is *not* checked here."""
    doc = _parse_document(text_or_doc)
    _validate_schema(doc, MODEL_SCHEMA)
    declared = doc.get("metamodel")
    if declared is not None and declared != mm.name:
        raise ModelError(
            f"model is for metamodel {declared!r}, not {mm.name!r}", kind="MetamodelMismatch", path="$.metamodel"
        )
    store = ModelStore(mm)
    for i, o in enumerate(doc["objects"]):
        slots = {name: _as_list(v) for name, v in o.get("slots", {}).items()}
        if o["class"] in mm.classes:
            for name in mm.features(o["class"]):
                slots.setdefault(name, [])
        try:
            store._insert(MObject(o["id"], o["class"], slots))
        except ModelError as exc:
            exc.path = f"$.objects[{i}].id"
            raise
    return store


def dump_model(store: ModelStore) -> dict:
    return {
        "metamodel": store.metamodel.name,
        "objects": [
            {"id": o.id, "class": o.class_name, "slots": {k: list(v) for k, v in o.slots.items()}}
            for o in store.objects.values()
        ],
    }


def load_metamodel_file(path) -> MetaModel:
    path = Path(path)
    try:
        return load_metamodel(path.read_text(encoding="utf-8"))
    except ModelError as exc:
        exc.path = f"{path}:{exc.path}" if exc.path else str(path)
        raise


def load_model_file(path, mm: MetaModel) -> ModelStore:
    path = Path(path)
    try:
        return load_model(path.read_text(encoding="utf-8"), mm)
    except ModelError as exc:
        exc.path = f"{path}:{exc.path}" if exc.path else str(path)
        raise


def check_conformance(store: ModelStore) -> list[Violation]:
    """Every typing, multiplicity and containment problem, deterministically ordered."""
    mm = store.metamodel
    out: list[Violation] = []
    contained_by: dict[str, list[tuple[str, str]]] = {}
    for obj in store.objects.values():
        cls = mm.classes.get(obj.class_name)
        if cls is None:
            out.append(Violation(ViolationKind.UnknownClass, obj.id, None, f"unknown class {obj.class_name!r}"))
            continue
        if cls.is_abstract:
            out.append(
                Violation(ViolationKind.AbstractInstantiation, obj.id, None, f"class {obj.class_name!r} is abstract")
            )
        features = mm.features(obj.class_name)
        for name, values in obj.slots.items():
            if name not in features:
                out.append(
                    Violation(ViolationKind.UnknownFeature, obj.id, name, f"{obj.class_name} has no feature {name!r}")
                )
        for name, meta in features.items():
            values = obj.slots.get(name, [])
            n = len(values)
            if n < meta.lower or (meta.upper is not UNBOUNDED and n > meta.upper):
                out.append(
                    Violation(
                        ViolationKind.MultiplicityViolation,
                        obj.id,
                        name,
                        f"{n} value(s) outside [{meta.lower}..{meta.upper}]",
                    )
                )
            if isinstance(meta, MetaAttribute):
                for v in values:
                    if not value_matches(meta.type, v):
                        out.append(
                            Violation(ViolationKind.TypeMismatch, obj.id, name, f"{v!r} is not a {meta.type}")
                        )
                continue
            for v in values:
                if not isinstance(v, str):
                    out.append(Violation(ViolationKind.TypeMismatch, obj.id, name, f"{v!r} is not an object id"))
                    continue
                target = store.objects.get(v)
                if target is None:
                    out.append(Violation(ViolationKind.DanglingReference, obj.id, name, f"no object {v!r}"))
                    continue
                if not mm.conforms(target.class_name, meta.target):
                    out.append(
                        Violation(
                            ViolationKind.TypeMismatch,
                            obj.id,
                            name,
                            f"{v!r} is a {target.class_name}, expected {meta.target}",
                        )
                    )
                if meta.containment:
                    contained_by.setdefault(v, []).append((obj.id, name))
    for child, holders in contained_by.items():
        for holder_id, feature in holders[1:]:
            out.append(
                Violation(
                    ViolationKind.DuplicateContainment,
                    child,
                    feature,
                    f"{child!r} already contained by {holders[0][0]}.{holders[0][1]}, also by {holder_id}.{feature}",
                )
            )
    out.sort(key=Violation.sort_key)
    return out


# Function-style entry points mirroring the store methods.


def add_object(store: ModelStore, class_name: str, init: dict | None = None) -> str:
    return store.add_object(class_name, init)


def set_value(store: ModelStore, object_id: str, feature: str, values) -> ChangeEvent | None:
    return store.set_value(object_id, feature, values)


def get_feature(store: ModelStore, object_id: str, feature: str) -> FeatureHandle:
    return store.get_feature(object_id, feature)


def all_instances(store: ModelStore, class_name: str, include_subclasses: bool = True) -> list[ObjRef]:
    return store.all_instances(class_name, include_subclasses)
