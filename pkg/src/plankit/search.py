"""Forward state-space search and backward regression search.

Both engines determinize their choice points by iterating candidate actions
in the grounder's canonical order and backtracking, so identical inputs give
identical plans and statistics.  Forward search checks visited states by
default: without it, domains containing inverse action pairs never terminate.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from plankit.grounding import ClassicalProblem
from plankit.model import (
    Goal,
    GroundAction,
    InconsistentGoal,
    Plan,
    State,
    applicable,
    apply,
    regress,
    relevant,
    satisfies,
)

__all__ = [
    "Strategy",
    "Outcome",
    "SearchConfig",
    "SearchStats",
    "SearchResult",
    "applicable_actions",
    "relevant_actions",
    "forward_search",
    "backward_search",
]


class Strategy(str, Enum):
    DFS = "dfs"
    BFS = "bfs"


class Outcome(str, Enum):
    PLAN = "plan"
    UNSOLVABLE = "unsolvable"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class SearchConfig:
    strategy: Strategy = Strategy.DFS
    max_depth: int | None = None  # None = unlimited
    node_budget: int | None = None
    cycle_checking: bool = True

    def __post_init__(self) -> None:
        if self.max_depth is not None and self.max_depth <= 0:
            raise ValueError("max_depth must be positive")
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    max_frontier: int = 0
    duration: float = 0.0


@dataclass
class SearchResult:
    outcome: Outcome
    plan: Plan | None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solved(self) -> bool:
        return self.outcome is Outcome.PLAN


def applicable_actions(s: State, p: ClassicalProblem) -> list[GroundAction]:
    """All ground actions applicable in `s`, in canonical order."""
    return [a for a in p.actions if applicable(s, a)]


def relevant_actions(g: Goal, p: ClassicalProblem) -> list[GroundAction]:
    """All ground actions relevant to `g`, in canonical order."""
    return [a for a in p.actions if relevant(a, g)]


def forward_search(p: ClassicalProblem, config: SearchConfig = SearchConfig()) -> SearchResult:
    start = time.perf_counter()
    if config.strategy is Strategy.BFS:
        result = _forward_bfs(p, config)
    else:
        result = _forward_dfs(p, config)
    result.stats.duration = time.perf_counter() - start
    return result


def _forward_bfs(p: ClassicalProblem, config: SearchConfig) -> SearchResult:
    stats = SearchStats()
    parents: dict[State, tuple[State, GroundAction]] = {}
    queue: deque[tuple[State, int]] = deque([(p.init, 0)])
    visited = {p.init}
    budget_hit = False
    while queue:
        stats.max_frontier = max(stats.max_frontier, len(queue))
        state, depth = queue.popleft()
        if config.node_budget is not None and stats.nodes_expanded >= config.node_budget:
            return SearchResult(Outcome.BUDGET_EXHAUSTED, None, stats)
        stats.nodes_expanded += 1
        if satisfies(state, p.goal):
            return SearchResult(Outcome.PLAN, _reconstruct(parents, state), stats)
        if config.max_depth is not None and depth >= config.max_depth:
            budget_hit = True
            continue
        for a in p.actions:
            if not applicable(state, a):
                continue
            successor = apply(state, a)
            if config.cycle_checking and successor in visited:
                continue
            visited.add(successor)
            parents[successor] = (state, a)
            queue.append((successor, depth + 1))
    outcome = Outcome.BUDGET_EXHAUSTED if budget_hit else Outcome.UNSOLVABLE
    return SearchResult(outcome, None, stats)


def _reconstruct(parents: dict[State, tuple[State, GroundAction]], state: State) -> Plan:
    steps: list[GroundAction] = []
    while state in parents:
        state, a = parents[state]
        steps.append(a)
    return tuple(reversed(steps))


def _forward_dfs(p: ClassicalProblem, config: SearchConfig) -> SearchResult:
    stats = SearchStats(nodes_expanded=1, max_frontier=1)
    if satisfies(p.init, p.goal):
        return SearchResult(Outcome.PLAN, (), stats)
    visited = {p.init}
    path: list[GroundAction] = []
    stack: list[tuple[State, Iterator[GroundAction]]] = [(p.init, iter(p.actions))]
    budget_hit = False
    while stack:
        stats.max_frontier = max(stats.max_frontier, len(stack))
        state, candidates = stack[-1]
        pushed = False
        for a in candidates:
            if not applicable(state, a):
                continue
            if config.max_depth is not None and len(path) >= config.max_depth:
                budget_hit = True
                break
            successor = apply(state, a)
            if config.cycle_checking and successor in visited:
                continue
            path.append(a)
            if satisfies(successor, p.goal):
                return SearchResult(Outcome.PLAN, tuple(path), stats)
            if config.node_budget is not None and stats.nodes_expanded >= config.node_budget:
                return SearchResult(Outcome.BUDGET_EXHAUSTED, None, stats)
            visited.add(successor)
            stack.append((successor, iter(p.actions)))
            stats.nodes_expanded += 1
            pushed = True
            break
        if not pushed:
            stack.pop()
            if path:
                path.pop()
    outcome = Outcome.BUDGET_EXHAUSTED if budget_hit else Outcome.UNSOLVABLE
    return SearchResult(outcome, None, stats)


def backward_search(p: ClassicalProblem, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Regress the goal toward the initial state, prepending each chosen action.

    Backtracking explores relevant actions in canonical order; visited goal
    sets are never revisited (exact-set match), which bounds the search on the
    finite regression space.
    """
    start = time.perf_counter()
    stats = SearchStats(nodes_expanded=1, max_frontier=1)

    def finish(outcome: Outcome, plan: Plan | None) -> SearchResult:
        stats.duration = time.perf_counter() - start
        return SearchResult(outcome, plan, stats)

    def goal_key(g: Goal) -> tuple[frozenset, frozenset]:
        return (g.positive, g.negative)

    if satisfies(p.init, p.goal):
        return finish(Outcome.PLAN, ())
    visited = {goal_key(p.goal)}
    # path[i] is the action chosen at depth i; the plan is its reverse.
    path: list[GroundAction] = []
    stack: list[tuple[Goal, Iterator[GroundAction]]] = [(p.goal, iter(p.actions))]
    budget_hit = False
    while stack:
        stats.max_frontier = max(stats.max_frontier, len(stack))
        goal, candidates = stack[-1]
        pushed = False
        for a in candidates:
            if not relevant(a, goal):
                continue
            if config.max_depth is not None and len(path) >= config.max_depth:
                budget_hit = True
                break
            try:
                subgoal = regress(goal, a)
            except InconsistentGoal:
                continue
            if goal_key(subgoal) in visited:
                continue
            path.append(a)
            if satisfies(p.init, subgoal):
                return finish(Outcome.PLAN, tuple(reversed(path)))
            if config.node_budget is not None and stats.nodes_expanded >= config.node_budget:
                return finish(Outcome.BUDGET_EXHAUSTED, None)
            visited.add(goal_key(subgoal))
            stack.append((subgoal, iter(p.actions)))
            stats.nodes_expanded += 1
            pushed = True
            break
        if not pushed:
            stack.pop()
            if path:
                path.pop()
    outcome = Outcome.BUDGET_EXHAUSTED if budget_hit else Outcome.UNSOLVABLE
    return finish(outcome, None)
