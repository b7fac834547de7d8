"""Derived attributes: dependency planning and selective recomputation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .errors import RegistryError
from .evaluation import Env
from .model import ChangeEvent, MetaAttribute, MetaModel, ModelStore, ObjRef
from .registry import DerivedRule
from .validation import evaluate
from .values import Coll, is_invalid, render

log = logging.getLogger(__name__)


class CycleDetected(RegistryError):
    def __init__(self, cycle: list[str]):
        super().__init__("derived rules form a cycle: " + " -> ".join(cycle + cycle[:1]), kind="CycleDetected")
        self.cycle = cycle


@dataclass
class DependencyPlan:
    order: list[DerivedRule]
    metamodel: MetaModel | None = None
    recomputations: int = 0

    @property
    def targets(self) -> list[str]:
        return [r.target for r in self.order]

    def rules_for(self, class_name: str, feature: str) -> list[DerivedRule]:
        return [r for r in self.order if feature in r.dependencies and self._applies(r, class_name)]

    def _applies(self, rule: DerivedRule, class_name: str) -> bool:
        if self.metamodel is None:
            return class_name == rule.context_class
        return self.metamodel.conforms(class_name, rule.context_class)


def _related(mm: MetaModel | None, a: str, b: str) -> bool:
    if mm is None:
        return a == b
    return mm.conforms(a, b) or mm.conforms(b, a)


def register_derived(rules, mm: MetaModel | None = None) -> DependencyPlan:
    """Order ``rules`` so every rule runs after the rules producing its inputs.

    Ties keep registration order. Raises CycleDetected naming the targets on
    the cycle.
    """
    rules = list(rules)
    if mm is not None:
        for r in rules:
            if not isinstance(mm.feature(r.context_class, r.target), MetaAttribute):
                raise RegistryError(f"{r.context_class} has no attribute {r.target!r}", kind="UnknownFeature")
            for dep in r.dependencies:
                if mm.feature(r.context_class, dep) is None:
                    raise RegistryError(f"{r.context_class} has no feature {dep!r}", kind="UnknownFeature")
    # edge i -> j: rule j reads what rule i writes
    succ: dict[int, list[int]] = {i: [] for i in range(len(rules))}
    indeg = [0] * len(rules)
    for i, a in enumerate(rules):
        for j, b in enumerate(rules):
            if a.target in b.dependencies and _related(mm, a.context_class, b.context_class):
                succ[i].append(j)
                indeg[j] += 1
    order: list[int] = []
    ready = sorted(i for i in range(len(rules)) if indeg[i] == 0)
    while ready:
        i = ready.pop(0)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
                ready.sort()
    if len(order) < len(rules):
        raise CycleDetected(_find_cycle(rules, succ, set(order)))
    return DependencyPlan([rules[i] for i in order], mm)


def _find_cycle(rules, succ, done) -> list[str]:
    # walk successors among the unsorted rules until a rule repeats
    start = min(i for i in range(len(rules)) if i not in done)
    path: list[int] = []
    seen: dict[int, int] = {}
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = next(j for j in succ[node] if j not in done)
    return [rules[i].target for i in path[seen[node]:]]


def _slot_values(value) -> list:
    if value is None:
        return []
    if isinstance(value, Coll):
        return [e.id if isinstance(e, ObjRef) else e for e in value]
    return [value.id if isinstance(value, ObjRef) else value]


def recompute(store: ModelStore, rule: DerivedRule, object_id: str) -> ChangeEvent | None:
    """Evaluate ``rule`` for one object and write the result back."""
    env = Env(store, context=ObjRef(object_id))
    value = evaluate(rule.language, rule.body, env)
    if is_invalid(value):
        log.warning(
            "derived %s.%s on %s is invalid; slot left unchanged (%s)",
            rule.context_class,
            rule.target,
            object_id,
            env.diagnostics[-1] if env.diagnostics else render(value),
        )
        return None
    return store.set_value(object_id, rule.target, _slot_values(value))


OnRecompute = Callable[[DerivedRule, str], None]


def apply_update(
    store: ModelStore, event: ChangeEvent, plan: DependencyPlan, on_recompute: OnRecompute | None = None
) -> list[ChangeEvent]:
    """Recompute the rules that read ``event.feature``, then their dependents.

    Returns the secondary events, in the order they were produced.
    """
    produced: list[ChangeEvent] = []
    pending = [event]
    while pending:
        ev = pending.pop(0)
        obj = store.objects.get(ev.object_id)
        if obj is None:
            continue
        for rule in plan.rules_for(obj.class_name, ev.feature):
            plan.recomputations += 1
            if on_recompute is not None:
                on_recompute(rule, ev.object_id)
            out = recompute(store, rule, ev.object_id)
            if out is not None:
                produced.append(out)
                pending.append(out)
    return produced


def recompute_all(store: ModelStore, plan: DependencyPlan, on_recompute: OnRecompute | None = None) -> list[ChangeEvent]:
    """Bring every derived slot up to date, objects in insertion order."""
    produced = []
    for obj in list(store.objects.values()):
        for rule in plan.order:
            if not plan._applies(rule, obj.class_name):
                continue
            plan.recomputations += 1
            if on_recompute is not None:
                on_recompute(rule, obj.id)
            out = recompute(store, rule, obj.id)
            if out is not None:
                produced.append(out)
    return produced


@dataclass
class DerivedEngine:
    """Keeps derived slots current by listening to a store's change events."""

    store: ModelStore
    plan: DependencyPlan
    log: list[ChangeEvent] = field(default_factory=list)
    _busy: bool = False

    def attach(self) -> "DerivedEngine":
        self.store.listeners.append(self._on_change)
        return self

    def detach(self) -> None:
        self.store.listeners.remove(self._on_change)

    def _on_change(self, event: ChangeEvent) -> None:
        # secondary writes are already handled by the running apply_update
        if self._busy:
            return
        self._busy = True
        try:
            self.log.extend(apply_update(self.store, event, self.plan))
        finally:
            self._busy = False


__all__ = [
    "CycleDetected",
    "DependencyPlan",
    "DerivedEngine",
    "apply_update",
    "recompute",
    "recompute_all",
    "register_derived",
]
