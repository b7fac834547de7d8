"""Constraint registry: invariants, operation contracts and derived rules.

A registry is read from a JSON document or from a raw ``.ocl`` file; both
produce the same in-memory objects, with every expression already parsed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ParseError, RegistryError
from .model import MetaAttribute, MetaModel, OperationSig
from .navex import ast as NA
from .navex import parse_navex
from .ocl import ast as OA
from .ocl import parse_constraints, parse_expression
from .ocl import to_source as ocl_source

LANGUAGES = ("ocl", "navex")
SEVERITIES = ("error", "warning")
DEFAULT_MESSAGE = "{constraint} does not hold for {object}"


@dataclass(frozen=True)
class Constraint:
    name: str
    language: str
    context_class: str
    body: Any
    severity: str = "error"
    message_template: str = DEFAULT_MESSAGE
    applicability: Any = None
    source: str = ""


@dataclass(frozen=True)
class OperationContract:
    class_name: str
    sig: OperationSig
    pres: tuple = ()
    posts: tuple = ()
    pre_sources: tuple = ()
    post_sources: tuple = ()

    @property
    def name(self) -> str:
        return f"{self.class_name}::{self.sig.name}"


@dataclass(frozen=True)
class DerivedRule:
    context_class: str
    target: str
    dependencies: tuple[str, ...]
    body: Any
    language: str = "ocl"
    source: str = ""


@dataclass
class Registry:
    constraints: list[Constraint] = field(default_factory=list)
    derived: list[DerivedRule] = field(default_factory=list)
    contracts: list[OperationContract] = field(default_factory=list)

    def contract(self, name: str) -> OperationContract:
        matches = [c for c in self.contracts if name in (c.name, c.sig.name)]
        if not matches:
            raise RegistryError(f"no contract named {name!r}", kind="UnknownContract")
        if len(matches) > 1:
            raise RegistryError(f"contract name {name!r} is ambiguous; use Class::operation", kind="UnknownContract")
        return matches[0]


def parse_in(language: str, text: str, **kw):
    if language == "ocl":
        return parse_expression(text, **kw)
    if language == "navex":
        return parse_navex(text)
    raise RegistryError(f"unknown language {language!r}", kind="SchemaViolation")


def _require_class(mm: MetaModel, name: str, path: str) -> None:
    if name not in mm.classes:
        raise RegistryError(f"unknown context class {name!r}", kind="UnknownClass", path=path)


def make_constraint(
    mm: MetaModel,
    name: str,
    language: str,
    context: str,
    expression: str,
    *,
    severity: str = "error",
    message: str = DEFAULT_MESSAGE,
    applicability: str | None = None,
    path: str = "",
) -> Constraint:
    """Parse and register one invariant against ``mm``."""
    if language not in LANGUAGES:
        raise RegistryError(f"unknown language {language!r}", kind="SchemaViolation", path=path)
    if severity not in SEVERITIES:
        raise RegistryError(f"unknown severity {severity!r}", kind="SchemaViolation", path=path)
    _require_class(mm, context, path)
    body = _parse_at(language, expression, f"{path}.expression")
    guard = _parse_at(language, applicability, f"{path}.applicability") if applicability else None
    return Constraint(name, language, context, body, severity, message, guard, expression)


def _parse_at(language, text, path, **kw):
    try:
        return parse_in(language, text, **kw)
    except ParseError as exc:
        raise RegistryError(str(exc), kind="ParseError", path=path) from None


def _parse_type_name(name: str | None) -> str | None:
    return "Real" if name == "Number" else name


def make_contract(mm: MetaModel, context: str, operation: str, params, returns, pres, posts, path="") -> OperationContract:
    _require_class(mm, context, path)
    sig_params = tuple((p["name"], _parse_type_name(p["type"])) for p in params)
    if len({p for p, _ in sig_params}) != len(sig_params):
        raise RegistryError(f"{context}::{operation} has duplicate parameters", kind="DuplicateParam", path=path)
    sig = OperationSig(operation, sig_params, _parse_type_name(returns))
    names = [p for p, _ in sig_params]
    pre_asts = tuple(_parse_at("ocl", t, f"{path}.pre[{i}]", params=names) for i, t in enumerate(pres))
    post_asts = tuple(
        _parse_at("ocl", t, f"{path}.post[{i}]", params=names, postcondition=True, has_result=returns is not None)
        for i, t in enumerate(posts)
    )
    return OperationContract(context, sig, pre_asts, post_asts, tuple(pres), tuple(posts))


def infer_dependencies(mm: MetaModel, class_name: str, body, language: str) -> tuple[str, ...]:
    """Features of ``self``/``data`` that ``body`` reads, in first-use order."""
    names: list[str] = []
    features = mm.features(class_name)
    if language == "ocl":
        for node in OA.walk(body):
            if isinstance(node, OA.Nav) and node.source == OA.Var("self"):
                names.append(node.name)
            elif isinstance(node, OA.Var) and node.name in features:
                names.append(node.name)
    else:
        for node in NA.walk(body):
            if isinstance(node, NA.Dollar) and node.obj == NA.Ident("data"):
                names.append(node.name)
    return tuple(dict.fromkeys(n for n in names if n in features))


def make_derived(mm, context, target, dependencies, language, expression, path="") -> DerivedRule:
    _require_class(mm, context, path)
    meta = mm.feature(context, target)
    if not isinstance(meta, MetaAttribute):
        raise RegistryError(f"{context} has no attribute {target!r}", kind="UnknownFeature", path=path)
    body = _parse_at(language, expression, f"{path}.expression")
    if dependencies is None:
        dependencies = infer_dependencies(mm, context, body, language)
    for dep in dependencies:
        if mm.feature(context, dep) is None:
            raise RegistryError(f"{context} has no feature {dep!r}", kind="UnknownFeature", path=path)
    return DerivedRule(context, target, tuple(dependencies), body, language, expression)


def load_registry(text_or_doc, mm: MetaModel) -> Registry:
    """Build a Registry from the JSON registry document."""
    if isinstance(text_or_doc, (str, bytes)):
        try:
            doc = json.loads(text_or_doc)
        except json.JSONDecodeError as exc:
            raise RegistryError(exc.msg, kind="SchemaViolation", path=f"line {exc.lineno}:{exc.colno}") from None
    else:
        doc = text_or_doc
    if not isinstance(doc, dict):
        raise RegistryError("registry must be a JSON object", kind="SchemaViolation", path="$")
    reg = Registry()
    try:
        for i, c in enumerate(doc.get("constraints", [])):
            path = f"$.constraints[{i}]"
            reg.constraints.append(
                make_constraint(
                    mm,
                    c["name"],
                    c.get("language", "ocl"),
                    c["context"],
                    c["expression"],
                    severity=c.get("severity", "error"),
                    message=c.get("message") or DEFAULT_MESSAGE,
                    applicability=c.get("applicability"),
                    path=path,
                )
            )
        for i, d in enumerate(doc.get("derived", [])):
            reg.derived.append(
                make_derived(
                    mm,
                    d["context"],
                    d["target"],
                    d.get("dependencies"),
                    d.get("language", "ocl"),
                    d["expression"],
                    path=f"$.derived[{i}]",
                )
            )
        for i, k in enumerate(doc.get("contracts", [])):
            reg.contracts.append(
                make_contract(
                    mm,
                    k["context"],
                    k["operation"],
                    k.get("params", []),
                    k.get("returns"),
                    k.get("pre", []),
                    k.get("post", []),
                    path=f"$.contracts[{i}]",
                )
            )
    except (KeyError, TypeError) as exc:
        raise RegistryError(f"malformed registry entry: {exc}", kind="SchemaViolation") from None
    return reg


def registry_from_ocl(text: str, mm: MetaModel) -> Registry:
    """Convert a raw ``.ocl`` constraint file into registry entries."""
    reg = Registry()
    for decl in parse_constraints(text):
        _require_class(mm, decl.class_name, decl.class_name)
        if isinstance(decl, OA.ClassContext):
            for label, body in decl.invariants:
                name = label or f"{decl.class_name}-inv{len(reg.constraints) + 1}"
                reg.constraints.append(Constraint(name, "ocl", decl.class_name, body, source=ocl_source(body)))
        elif isinstance(decl, OA.OperationContext):
            reg.contracts.append(
                OperationContract(
                    decl.class_name,
                    decl.sig,
                    tuple(b for _, b in decl.pres),
                    tuple(b for _, b in decl.posts),
                    tuple(ocl_source(b) for _, b in decl.pres),
                    tuple(ocl_source(b) for _, b in decl.posts),
                )
            )
        else:
            meta = mm.feature(decl.class_name, decl.attribute)
            if not isinstance(meta, MetaAttribute):
                raise RegistryError(
                    f"{decl.class_name} has no attribute {decl.attribute!r}", kind="UnknownFeature"
                )
            deps = infer_dependencies(mm, decl.class_name, decl.body, "ocl")
            reg.derived.append(
                DerivedRule(decl.class_name, decl.attribute, deps, decl.body, "ocl", ocl_source(decl.body))
            )
    return reg


def load_registry_file(path, mm: MetaModel) -> Registry:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".ocl":
            return registry_from_ocl(text, mm)
        return load_registry(text, mm)
    except (RegistryError, ParseError) as exc:
        if isinstance(exc, ParseError):
            raise RegistryError(str(exc), kind="ParseError", path=f"{path}:{exc.line}:{exc.column}") from None
        exc.path = f"{path}:{exc.path}" if exc.path else str(path)
        raise


__all__ = [
    "Constraint",
    "DerivedRule",
    "OperationContract",
    "Registry",
    "infer_dependencies",
    "load_registry",
    "load_registry_file",
    "make_constraint",
    "make_contract",
    "make_derived",
    "registry_from_ocl",
]
