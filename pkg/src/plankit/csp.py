"""Bounded planning as constraint satisfaction.

A problem bounded at horizon k becomes a CSP with one boolean variable per
(fluent, step) pair and one action variable per step; constraints encode the
initial state, the goal, and each ground action's preconditions, effects,
and frame axioms as explicit allowed-tuple tables.  Action-conditional
tables universally allow every tuple whose action entry differs from the
conditioning action.

The encoding has exact-horizon semantics: an action variable has no "none"
value, so satisfiability at k means a plan of length exactly k, and
`plan_bounded` recovers shorter plans by iterative deepening.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Mapping, Sequence

from plankit.grounding import ClassicalProblem
from plankit.model import GroundAction, GroundAtom, Plan
from plankit.search import Outcome, SearchResult, SearchStats
from plankit import validation

__all__ = [
    "VarKind",
    "CspVariable",
    "Constraint",
    "CspInstance",
    "Assignment",
    "SolveStats",
    "MinConflictsResult",
    "DecodeMismatch",
    "encode",
    "solve_backtracking",
    "forward_check",
    "min_conflicts",
    "decode_plan",
    "plan_bounded",
    "export_text",
]

Value = bool | GroundAction


class VarKind(str, Enum):
    STATE = "state"
    ACTION = "action"


@dataclass(frozen=True)
class CspVariable:
    id: int
    kind: VarKind
    step: int
    fluent: GroundAtom | None  # None for action variables
    domain: tuple[Value, ...]


@dataclass(frozen=True)
class Constraint:
    tag: str  # init | goal | precondition | effect | frame
    scope: tuple[int, ...]
    allowed: frozenset[tuple[Value, ...]]

    def satisfied_by(self, values: tuple[Value, ...]) -> bool:
        return values in self.allowed


@dataclass(frozen=True)
class CspInstance:
    variables: tuple[CspVariable, ...]
    constraints: tuple[Constraint, ...]
    horizon: int
    num_fluents: int

    @cached_property
    def constraints_by_var(self) -> dict[int, tuple[Constraint, ...]]:
        index: dict[int, list[Constraint]] = {v.id: [] for v in self.variables}
        for con in self.constraints:
            for var_id in con.scope:
                index[var_id].append(con)
        return {k: tuple(v) for k, v in index.items()}

    def state_var_id(self, fluent_index: int, step: int) -> int:
        return step * (self.num_fluents + 1) + fluent_index

    def action_var_id(self, step: int) -> int:
        return step * (self.num_fluents + 1) + self.num_fluents


@dataclass
class Assignment:
    values: dict[int, Value]
    num_variables: int

    @property
    def is_complete(self) -> bool:
        return len(self.values) == self.num_variables

    def is_consistent(self, c: CspInstance) -> bool:
        """All constraints whose scope is fully assigned hold."""
        for con in c.constraints:
            if all(v in self.values for v in con.scope):
                if tuple(self.values[v] for v in con.scope) not in con.allowed:
                    return False
        return True


def encode(p: ClassicalProblem, k: int) -> CspInstance:
    """Encode `p` bounded at horizon `k` (k >= 0).

    Variable ids are assigned in time layers: the step-0 state variables,
    then a[0], then the step-1 state variables, and so on, so ascending id
    order is the solver's assignment order.
    """
    if k < 0:
        raise ValueError("horizon must be non-negative")
    fluents = p.fluents
    n = len(fluents)
    actions = p.actions

    variables: list[CspVariable] = []
    for step in range(k + 1):
        for f in fluents:
            variables.append(CspVariable(len(variables), VarKind.STATE, step, f, (False, True)))
        if step < k:
            variables.append(CspVariable(len(variables), VarKind.ACTION, step, None, actions))

    def state_id(fluent_index: int, step: int) -> int:
        return step * (n + 1) + fluent_index

    def action_id(step: int) -> int:
        return step * (n + 1) + n

    fluent_index = {f: i for i, f in enumerate(fluents)}
    constraints: list[Constraint] = []

    for i, f in enumerate(fluents):
        value = f in p.init.atoms
        constraints.append(Constraint("init", (state_id(i, 0),), frozenset({(value,)})))
    for f in sorted(p.goal.positive, key=lambda a: a.key):
        constraints.append(Constraint("goal", (state_id(fluent_index[f], k),), frozenset({(True,)})))
    for f in sorted(p.goal.negative, key=lambda a: a.key):
        constraints.append(Constraint("goal", (state_id(fluent_index[f], k),), frozenset({(False,)})))

    # Condition tables are shared across steps: tuples with a different action
    # entry are universally allowed.
    others = {a: frozenset((b, v) for b in actions if b is not a for v in (False, True))
              for a in actions}
    pair_table = {(a, v): others[a] | {(a, v)} for a in actions for v in (False, True)}
    frame_table = {
        a: frozenset((b, v, w) for b in actions if b is not a for v in (False, True) for w in (False, True))
           | {(a, False, False), (a, True, True)}
        for a in actions
    }

    for step in range(k):
        a_id = action_id(step)
        for a in actions:
            for f in sorted(a.pre_pos, key=lambda x: x.key):
                constraints.append(Constraint(
                    "precondition", (a_id, state_id(fluent_index[f], step)), pair_table[(a, True)]))
            for f in sorted(a.pre_neg, key=lambda x: x.key):
                constraints.append(Constraint(
                    "precondition", (a_id, state_id(fluent_index[f], step)), pair_table[(a, False)]))
            for f in sorted(a.add, key=lambda x: x.key):
                constraints.append(Constraint(
                    "effect", (a_id, state_id(fluent_index[f], step + 1)), pair_table[(a, True)]))
            for f in sorted(a.delete, key=lambda x: x.key):
                constraints.append(Constraint(
                    "effect", (a_id, state_id(fluent_index[f], step + 1)), pair_table[(a, False)]))
            affected = a.add | a.delete
            for i, f in enumerate(fluents):
                if f not in affected:
                    constraints.append(Constraint(
                        "frame", (a_id, state_id(i, step), state_id(i, step + 1)), frame_table[a]))

    return CspInstance(tuple(variables), tuple(constraints), k, n)


@dataclass
class SolveStats:
    assignments: int = 0
    backtracks: int = 0


def forward_check(c: CspInstance, partial: Assignment, just_assigned: int,
                  domains: Mapping[int, Sequence[Value]]) -> dict[int, tuple[Value, ...]] | None:
    """Prune future domains against constraints touching `just_assigned`.

    A value survives when some allowed tuple matches the partial assignment,
    takes that value, and draws its remaining entries from current domains.
    Returns the pruned domains, or None on a domain wipeout.
    """
    new_domains = dict(domains)
    for con in c.constraints_by_var[just_assigned]:
        unassigned = [v for v in con.scope if v not in partial.values]
        if not unassigned:
            continue
        for x in unassigned:
            keep = tuple(v for v in new_domains[x]
                         if _supported(con, partial, x, v, new_domains))
            if not keep:
                return None
            if len(keep) < len(new_domains[x]):
                new_domains[x] = keep
    return new_domains


def _supported(con: Constraint, partial: Assignment, var_id: int, value: Value,
               domains: Mapping[int, Sequence[Value]]) -> bool:
    for allowed in con.allowed:
        ok = True
        for pos, scoped in enumerate(con.scope):
            entry = allowed[pos]
            if scoped == var_id:
                if entry != value:
                    ok = False
                    break
            elif scoped in partial.values:
                if entry != partial.values[scoped]:
                    ok = False
                    break
            elif entry not in domains[scoped]:
                ok = False
                break
        if ok:
            return True
    return False


def solve_backtracking(c: CspInstance, use_forward_checking: bool = True,
                       stats: SolveStats | None = None) -> Assignment | None:
    """Systematic time-layered backtracking; returns a solution or None (unsat).

    Variables are assigned in ascending id order, which starts with the
    initial-state layer (forced by the unary init constraints) and proceeds
    action by action toward the horizon.
    """
    stats = stats if stats is not None else SolveStats()
    num_vars = len(c.variables)

    # Unary constraints prune domains up front.
    domains: dict[int, tuple[Value, ...]] = {}
    for var in c.variables:
        domain = var.domain
        for con in c.constraints_by_var[var.id]:
            if len(con.scope) == 1:
                domain = tuple(v for v in domain if (v,) in con.allowed)
        if not domain:
            return None
        domains[var.id] = domain

    assignment = Assignment({}, num_vars)

    def consistent_with_assigned(var_id: int) -> bool:
        for con in c.constraints_by_var[var_id]:
            if all(v in assignment.values for v in con.scope):
                if tuple(assignment.values[v] for v in con.scope) not in con.allowed:
                    return False
        return True

    def backtrack(index: int, current: Mapping[int, tuple[Value, ...]]) -> bool:
        if index == num_vars:
            return True
        var = c.variables[index]
        for value in current[var.id]:
            assignment.values[var.id] = value
            stats.assignments += 1
            if consistent_with_assigned(var.id):
                if use_forward_checking:
                    pruned = forward_check(c, assignment, var.id, current)
                    if pruned is not None and backtrack(index + 1, pruned):
                        return True
                elif backtrack(index + 1, current):
                    return True
            del assignment.values[var.id]
            stats.backtracks += 1
        return False

    if backtrack(0, domains):
        return assignment
    return None


@dataclass
class MinConflictsResult:
    assignment: Assignment | None  # None on timeout
    best_conflicts: int
    steps: int

    @property
    def solved(self) -> bool:
        return self.assignment is not None


def min_conflicts(c: CspInstance, max_steps: int = 10_000, seed: int = 0) -> MinConflictsResult:
    """Seeded local search over complete assignments; incomplete by design.

    Each step repairs one randomly chosen conflicted variable with a value
    minimizing the number of violated constraints, breaking ties randomly so
    plateaus do not trap the walk.  Everything is driven by one seeded RNG,
    so identical arguments reproduce identical runs.  A timeout does not
    imply unsatisfiability.
    """
    rng = random.Random(seed)
    values: dict[int, Value] = {v.id: rng.choice(v.domain) for v in c.variables}

    def violated_constraints() -> list[Constraint]:
        return [con for con in c.constraints
                if tuple(values[v] for v in con.scope) not in con.allowed]

    def conflicts_at(var_id: int) -> int:
        return sum(1 for con in c.constraints_by_var[var_id]
                   if tuple(values[v] for v in con.scope) not in con.allowed)

    best = len(violated_constraints())
    for step in range(max_steps):
        violated = violated_constraints()
        best = min(best, len(violated))
        if not violated:
            return MinConflictsResult(Assignment(values, len(c.variables)), 0, step)
        conflicted = sorted({v for con in violated for v in con.scope})
        var_id = rng.choice(conflicted)
        var = c.variables[var_id]
        counts: list[tuple[int, Value]] = []
        for candidate in var.domain:
            values[var_id] = candidate
            counts.append((conflicts_at(var_id), candidate))
        minimum = min(count for count, _ in counts)
        values[var_id] = rng.choice([v for count, v in counts if count == minimum])
    best = min(best, len(violated_constraints()))
    return MinConflictsResult(None, best, max_steps)


class DecodeMismatch(Exception):
    """A decoded plan failed validation: the encoding and solver disagree."""


def decode_plan(c: CspInstance, a: Assignment, p: ClassicalProblem) -> Plan:
    """Read the action variables off a complete, consistent assignment in step order."""
    if not a.is_complete:
        raise ValueError("assignment is not complete")
    plan = tuple(a.values[c.action_var_id(step)] for step in range(c.horizon))
    verdict = validation.validate_plan(p, plan)
    if not verdict.valid:
        raise DecodeMismatch(f"decoded plan fails validation: {verdict.failure}")
    return plan


def plan_bounded(p: ClassicalProblem, k_max: int,
                 use_forward_checking: bool = True) -> SearchResult:
    """Iterative deepening over the horizon: the first satisfiable k wins.

    Because the encoding is exact-horizon, the returned plan is
    length-minimal.  Failure means unsolvable within `k_max` only.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    start = time.perf_counter()
    stats = SearchStats()
    solve_stats = SolveStats()
    for k in range(k_max + 1):
        instance = encode(p, k)
        solution = solve_backtracking(instance, use_forward_checking, solve_stats)
        stats.nodes_expanded = solve_stats.assignments
        if solution is not None:
            plan = decode_plan(instance, solution, p)
            stats.duration = time.perf_counter() - start
            return SearchResult(Outcome.PLAN, plan, stats)
    stats.duration = time.perf_counter() - start
    return SearchResult(Outcome.UNSOLVABLE, None, stats)


def _render_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def export_text(c: CspInstance) -> str:
    """Plain-text listing: one variable per line, one constraint per line."""
    lines = [
        f"csp horizon {c.horizon}",
        f"variables {len(c.variables)}",
        f"constraints {len(c.constraints)}",
    ]
    for v in c.variables:
        domain = " ".join(_render_value(x) for x in v.domain)
        if v.kind is VarKind.STATE:
            lines.append(f"v{v.id} state {v.fluent} step {v.step} domain {{{domain}}}")
        else:
            lines.append(f"v{v.id} action step {v.step} domain {{{domain}}}")
    for i, con in enumerate(c.constraints):
        scope = " ".join(f"v{x}" for x in con.scope)
        tuples = sorted("(" + " ".join(_render_value(x) for x in t) + ")" for t in con.allowed)
        lines.append(f"c{i} {con.tag} scope ({scope}) allow {{{' '.join(tuples)}}}")
    return "\n".join(lines) + "\n"
