"""Invariant checking, model validation, transition checking and queries."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import MvxError, TransitionError
from .evaluation import Env, eval_navex, eval_ocl
from .evaluation.env import UNSET
from .model import ModelStore, ObjRef, value_matches
from .registry import Constraint, OperationContract, parse_in
from .values import STORE, is_bool, is_invalid, render

log = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    TRUE = "True"
    FALSE = "False"
    NULL = "Null"
    INVALID = "Invalid"
    EVAL_ERROR = "EvalError"

    def __str__(self) -> str:
        return self.value


def classify(value) -> Verdict:
    if value is True:
        return Verdict.TRUE
    if value is False:
        return Verdict.FALSE
    if value is None:
        return Verdict.NULL
    return Verdict.INVALID


def evaluate(language: str, ast, env: Env):
    if language == "ocl":
        return eval_ocl(ast, env)
    return eval_navex(ast, env)


class CheckResult(NamedTuple):
    object_id: str
    verdict: Verdict
    message: str


class _Fields(dict):
    def __missing__(self, key):
        return "{" + key + "}"


def _message(constraint: Constraint, object_id: str, verdict: Verdict, detail: str) -> str:
    if verdict is Verdict.TRUE:
        return ""
    text = constraint.message_template.format_map(
        _Fields(constraint=constraint.name, object=object_id, verdict=verdict.value, context=constraint.context_class)
    )
    return f"{text} ({detail})" if detail else text


def _run_predicate(language, ast, env) -> tuple[Verdict, str]:
    try:
        value = evaluate(language, ast, env)
    except RecursionError:
        return Verdict.EVAL_ERROR, "expression nests too deeply"
    except (MvxError, ArithmeticError, TypeError, ValueError) as exc:
        log.debug("evaluation failed: %s", exc)
        return Verdict.EVAL_ERROR, f"{type(exc).__name__}: {exc}"
    if not (is_bool(value) or value is None or is_invalid(value)):
        return Verdict.INVALID, f"expected a Boolean, got {render(value)}"
    detail = env.diagnostics[-1] if is_invalid(value) and env.diagnostics else ""
    return classify(value), detail


def check_invariant(store: ModelStore, constraint: Constraint) -> list[CheckResult]:
    """Verdict per applicable instance of the context class, subclasses included."""
    out = []
    for ref in store.all_instances(constraint.context_class, include_subclasses=True):
        if constraint.applicability is not None:
            guard, _ = _run_predicate(constraint.language, constraint.applicability, Env(store, context=ref))
            if guard is not Verdict.TRUE:
                continue
        verdict, detail = _run_predicate(constraint.language, constraint.body, Env(store, context=ref))
        out.append(CheckResult(ref.id, verdict, _message(constraint, ref.id, verdict, detail)))
    return out


@dataclass(frozen=True)
class ReportEntry:
    constraint: str
    object_id: str
    verdict: Verdict
    severity: str
    message: str

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint,
            "object": self.object_id,
            "verdict": self.verdict.value,
            "severity": self.severity,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    entries: list[ReportEntry] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(e.verdict is Verdict.TRUE for e in self.entries if e.severity == "error")

    def count(self, verdict: Verdict) -> int:
        return sum(1 for e in self.entries if e.verdict is verdict)

    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.verdict is not Verdict.TRUE]

    def to_dict(self) -> dict:
        return {"overall": self.overall, "entries": [e.to_dict() for e in self.entries]}


def validate_model(store: ModelStore, registry) -> ValidationReport:
    """Run every constraint over a snapshot of ``store``, in registry order.

    ``registry`` is a Registry or a plain list of constraints.
    """
    constraints = getattr(registry, "constraints", registry)
    snap = store.snapshot()
    report = ValidationReport()
    for c in constraints:
        for r in check_invariant(snap, c):
            report.entries.append(ReportEntry(c.name, r.object_id, r.verdict, c.severity, r.message))
    return report


# -- transitions ----------------------------------------------------------------


@dataclass(frozen=True)
class TransitionResult:
    contract: str
    receiver: str
    pre_verdicts: tuple[Verdict, ...]
    post_verdicts: tuple[Verdict, ...]

    @property
    def admissible(self) -> bool:
        return all(v is Verdict.TRUE for v in self.pre_verdicts)

    @property
    def correct(self) -> bool:
        return self.admissible and all(v is Verdict.TRUE for v in self.post_verdicts)

    def to_dict(self) -> dict:
        return {
            "contract": self.contract,
            "receiver": self.receiver,
            "pre": [v.value for v in self.pre_verdicts],
            "post": [v.value for v in self.post_verdicts],
            "admissible": self.admissible,
            "correct": self.correct,
        }


def _arg_ok(store: ModelStore, type_name: str, value) -> bool:
    if type_name in store.metamodel.classes:
        return (
            isinstance(value, ObjRef)
            and value.id in store.objects
            and store.metamodel.conforms(store.objects[value.id].class_name, type_name)
        )
    return value_matches(type_name, value)


def _check_receiver(store: ModelStore, class_name: str, receiver_id: str, which: str) -> None:
    obj = store.objects.get(receiver_id)
    if obj is None:
        raise TransitionError(f"receiver {receiver_id!r} is not in the {which} state", kind="UnknownReceiver")
    if not store.metamodel.conforms(obj.class_name, class_name):
        raise TransitionError(
            f"receiver {receiver_id!r} is a {obj.class_name}, not a {class_name}", kind="UnknownReceiver"
        )


def check_transition(
    pre: ModelStore,
    post: ModelStore,
    contract: OperationContract,
    receiver_id: str,
    args: dict,
    result=UNSET,
) -> TransitionResult:
    """Judge one observed (pre, post) pair against an operation contract."""
    _check_receiver(pre, contract.class_name, receiver_id, "pre")
    _check_receiver(post, contract.class_name, receiver_id, "post")
    names = [n for n, _ in contract.sig.params]
    extra = sorted(set(args) - set(names))
    if extra:
        raise TransitionError(f"{contract.name} has no parameter {extra[0]!r}", kind="UnknownArgument")
    for name, type_name in contract.sig.params:
        if name not in args:
            raise TransitionError(f"missing argument {name!r} for {contract.name}", kind="MissingArgument")
        if not _arg_ok(pre, type_name, args[name]):
            raise TransitionError(
                f"argument {name}={render(args[name])} does not conform to {type_name}", kind="TypeMismatch"
            )
    if result is not UNSET and contract.sig.return_type and result is not None:
        if not _arg_ok(post, contract.sig.return_type, result):
            raise TransitionError(
                f"result {render(result)} does not conform to {contract.sig.return_type}", kind="TypeMismatch"
            )
    recv = ObjRef(receiver_id)
    pre_snap, post_snap = pre.snapshot(), post.snapshot()
    pres = tuple(_run_predicate("ocl", p, Env(pre_snap, context=recv, vars=dict(args)))[0] for p in contract.pres)
    posts: tuple[Verdict, ...] = ()
    if all(v is Verdict.TRUE for v in pres):
        posts = tuple(
            _run_predicate(
                "ocl", q, Env(post_snap, context=recv, vars=dict(args), pre_store=pre_snap, result=result)
            )[0]
            for q in contract.posts
        )
    return TransitionResult(contract.name, receiver_id, pres, posts)


# -- queries ----------------------------------------------------------------------


def execute_query(store: ModelStore, language: str, text: str, *, context=None, diagnostics=None):
    """Evaluate ``text`` with the store root (or ``context``) as the free context."""
    ast = parse_in(language, text)
    if context is None:
        ctx = STORE
    else:
        if context not in store.objects:
            raise MvxError(f"no object {context!r}", kind="UnknownObject")
        ctx = ObjRef(context)
    env = Env(store.snapshot(), context=ctx)
    value = evaluate(language, ast, env)
    if diagnostics is not None:
        diagnostics.extend(env.diagnostics)
    return value


__all__ = [
    "CheckResult",
    "ReportEntry",
    "TransitionResult",
    "ValidationReport",
    "Verdict",
    "check_invariant",
    "check_transition",
    "classify",
    "evaluate",
    "execute_query",
    "validate_model",
]
