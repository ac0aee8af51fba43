"""Instantiate typed action schemas over the object table into a ground problem.

Grounding is full and up-front; a configurable instance budget guards
against blowups.  Ground actions are ordered lexicographically by
(schema name, argument tuple), which makes every engine's tie-breaking
reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from plankit.model import (
    Goal,
    GroundAction,
    GroundAtom,
    State,
)
from plankit.pddl.ast import ActionSchema, Literal, TypedName, TypeGraph
from plankit.pddl.linker import LinkedProblem

__all__ = [
    "ClassicalProblem",
    "GroundingError",
    "TooManyInstances",
    "GoalUsesUnknownObject",
    "objects_of_type",
    "instance_count",
    "ground_schema",
    "build_problem",
    "prune_statics",
]

DEFAULT_INSTANCE_BUDGET = 1_000_000


class GroundingError(Exception):
    pass


class TooManyInstances(GroundingError):
    pass


class GoalUsesUnknownObject(GroundingError):
    pass


@dataclass(frozen=True)
class ClassicalProblem:
    """The ground planning problem: fluents, actions, initial state, goal."""

    fluents: tuple[GroundAtom, ...]  # canonical (predicate, args) order
    actions: tuple[GroundAction, ...]  # canonical (name, args) order
    init: State
    goal: Goal
    name: str = ""

    @cached_property
    def _action_index(self) -> dict[tuple[str, tuple[str, ...]], GroundAction]:
        return {a.key: a for a in self.actions}

    def find_action(self, name: str, args: tuple[str, ...]) -> GroundAction | None:
        return self._action_index.get((name, args))

    @cached_property
    def fluent_set(self) -> frozenset[GroundAtom]:
        return frozenset(self.fluents)


def objects_of_type(type_name: str, objects: tuple[TypedName, ...],
                    types: TypeGraph) -> list[str]:
    """All objects whose type is `type_name` or a descendant, in declaration order."""
    return [name for name, t in objects if types.is_subtype(t, type_name)]


def instance_count(schema: ActionSchema, objects: tuple[TypedName, ...],
                   types: TypeGraph) -> int:
    """Number of ground instances of `schema`, computed without materializing them."""
    count = 1
    for _, type_name in schema.params:
        count *= len(objects_of_type(type_name, objects, types))
    return count


def _instantiate(literals: tuple[Literal, ...], binding: dict[str, str],
                 positive: bool) -> frozenset[GroundAtom]:
    return frozenset(
        GroundAtom(lit.predicate, tuple(binding.get(a, a) for a in lit.args))
        for lit in literals if lit.negated is not positive)


def _check_schema_conflicts(schema: ActionSchema) -> None:
    """A literal appearing both positively and negatively at the schema level
    (identical arguments) conflicts in every instance: a modeling error."""
    effect_pos = {(l.predicate, l.args) for l in schema.effect if not l.negated}
    effect_neg = {(l.predicate, l.args) for l in schema.effect if l.negated}
    if effect_pos & effect_neg:
        raise GroundingError(
            f"schema '{schema.name}' both adds and deletes the same literal")
    pre_pos = {(l.predicate, l.args) for l in schema.precondition if not l.negated}
    pre_neg = {(l.predicate, l.args) for l in schema.precondition if l.negated}
    if pre_pos & pre_neg:
        raise GroundingError(
            f"schema '{schema.name}' has a contradictory precondition")


def ground_schema(schema: ActionSchema, objects: tuple[TypedName, ...],
                  types: TypeGraph, *, instance_budget: int | None = None) -> list[GroundAction]:
    """One ground action per element of the Cartesian product of typed object lists.

    Repeated object bindings can collapse distinct literals into one atom,
    leaving an instance with a contradictory precondition (never applicable)
    or a self-cancelling effect (undefined semantics); such degenerate
    instances are skipped.  Conflicts already present at the schema level are
    modeling errors and raise.
    """
    _check_schema_conflicts(schema)
    if instance_budget is not None:
        total = instance_count(schema, objects, types)
        if total > instance_budget:
            raise TooManyInstances(
                f"schema '{schema.name}' grounds to {total} instances "
                f"(budget {instance_budget})")
    pools = [objects_of_type(t, objects, types) for _, t in schema.params]
    names = schema.param_names
    out: list[GroundAction] = []
    for combo in itertools.product(*pools):
        binding = dict(zip(names, combo))
        pre_pos = _instantiate(schema.precondition, binding, positive=True)
        pre_neg = _instantiate(schema.precondition, binding, positive=False)
        if pre_pos & pre_neg:
            continue
        add = _instantiate(schema.effect, binding, positive=True)
        delete = _instantiate(schema.effect, binding, positive=False)
        if add & delete:
            continue
        out.append(GroundAction(
            name=schema.name,
            args=tuple(combo),
            pre_pos=pre_pos,
            pre_neg=pre_neg,
            add=add,
            delete=delete,
        ))
    return out


def _all_fluents(linked: LinkedProblem) -> list[GroundAtom]:
    fluents: list[GroundAtom] = []
    for decl in linked.domain.predicates:
        pools = [objects_of_type(t, linked.objects, linked.types) for _, t in decl.params]
        for combo in itertools.product(*pools):
            fluents.append(GroundAtom(decl.name, tuple(combo)))
    fluents.sort(key=lambda a: a.key)
    return fluents


def build_problem(linked: LinkedProblem, *, prune: bool = True,
                  instance_budget: int | None = DEFAULT_INSTANCE_BUDGET) -> ClassicalProblem:
    """Ground a linked instance; static pruning is on by default."""
    fluents = _all_fluents(linked)
    fluent_set = set(fluents)

    if instance_budget is not None:
        total = sum(instance_count(s, linked.objects, linked.types)
                    for s in linked.domain.actions)
        if total > instance_budget:
            raise TooManyInstances(
                f"problem grounds to {total} action instances (budget {instance_budget})")

    actions: list[GroundAction] = []
    for schema in linked.domain.actions:
        actions.extend(ground_schema(schema, linked.objects, linked.types))
    actions.sort(key=lambda a: a.key)

    for a in linked.goal_positive + linked.goal_negative:
        if a not in fluent_set:
            unknown = [arg for arg in a.args if linked.object_type(arg) is None]
            if unknown:
                raise GoalUsesUnknownObject(
                    f"goal atom {a} references unknown objects: {unknown}")
            raise GroundingError(f"goal atom {a} is not a known fluent")

    for a in linked.init:
        if a not in fluent_set:
            raise GroundingError(f"init atom {a} is not a known fluent")

    problem = ClassicalProblem(
        fluents=tuple(fluents),
        actions=tuple(actions),
        init=State.of(linked.init),
        goal=Goal.of(linked.goal_positive, linked.goal_negative),
        name=linked.problem.name,
    )
    return prune_statics(problem) if prune else problem


def prune_statics(p: ClassicalProblem) -> ClassicalProblem:
    """Evaluate static preconditions once against the initial state.

    An atom is static when no action adds or deletes it, so its truth is fixed
    by the initial state.  Actions with an unsatisfiable static precondition
    are removed (iterated to a fixpoint, since removals can make more atoms
    static); always-satisfied static preconditions are dropped from the
    surviving actions.  Fluents, init, and goal are left untouched, so the
    reachable state set is preserved exactly.
    """
    actions = list(p.actions)
    while True:
        changing = frozenset().union(*(a.add | a.delete for a in actions)) if actions else frozenset()
        kept = []
        for a in actions:
            static_pos = {f for f in a.pre_pos if f not in changing}
            static_neg = {f for f in a.pre_neg if f not in changing}
            if any(f not in p.init.atoms for f in static_pos):
                continue
            if any(f in p.init.atoms for f in static_neg):
                continue
            kept.append(a)
        if len(kept) == len(actions):
            break
        actions = kept

    changing = frozenset().union(*(a.add | a.delete for a in actions)) if actions else frozenset()
    stripped = [
        GroundAction(
            name=a.name,
            args=a.args,
            pre_pos=frozenset(f for f in a.pre_pos if f in changing),
            pre_neg=frozenset(f for f in a.pre_neg if f in changing),
            add=a.add,
            delete=a.delete,
        )
        for a in actions
    ]
    return ClassicalProblem(
        fluents=p.fluents,
        actions=tuple(stripped),
        init=p.init,
        goal=p.goal,
        name=p.name,
    )
