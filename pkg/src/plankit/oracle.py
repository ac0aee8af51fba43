"""Desk-scale brute-force oracle: the explicit state graph of a ground problem.

Vertices are states (every subset of the fluents, or just the reachable
ones), and there is an edge (s, a, s') exactly when `a` is applicable in `s`
and produces `s'`.  Exhaustive construction is guarded at 16 fluents.
Engines are tested against this graph, never the other way around.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from plankit.grounding import ClassicalProblem
from plankit.model import GroundAction, State, applicable, apply, satisfies

__all__ = [
    "StateGraph",
    "TooLarge",
    "build_state_graph",
    "shortest_solving_trajectory",
    "solvable_at_exact_length",
    "eccentricity",
]

MAX_EXHAUSTIVE_FLUENTS = 16
MAX_REACHABLE_STATES = 200_000


class TooLarge(Exception):
    pass


@dataclass(frozen=True)
class StateGraph:
    states: tuple[State, ...]
    edges: tuple[tuple[int, GroundAction, int], ...]
    initial: int
    goal_states: frozenset[int]
    reachable_only: bool

    @cached_property
    def index(self) -> dict[State, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def successors(self) -> dict[int, tuple[tuple[GroundAction, int], ...]]:
        out: dict[int, list[tuple[GroundAction, int]]] = {i: [] for i in range(len(self.states))}
        for src, action, dst in self.edges:
            out[src].append((action, dst))
        return {k: tuple(v) for k, v in out.items()}


def build_state_graph(p: ClassicalProblem, *, reachable_only: bool = False,
                      max_fluents: int = MAX_EXHAUSTIVE_FLUENTS,
                      max_states: int = MAX_REACHABLE_STATES) -> StateGraph:
    """Materialize the full transition graph of `p` by enumeration."""
    if reachable_only:
        states = _reachable_states(p, max_states)
    else:
        n = len(p.fluents)
        if n > max_fluents:
            raise TooLarge(f"{n} fluents means 2^{n} states; exhaustive bound is {max_fluents}")
        states = [State(frozenset(combo))
                  for r in range(n + 1)
                  for combo in itertools.combinations(p.fluents, r)]
    index = {s: i for i, s in enumerate(states)}
    edges: list[tuple[int, GroundAction, int]] = []
    for i, s in enumerate(states):
        for a in p.actions:
            if applicable(s, a):
                edges.append((i, a, index[apply(s, a)]))
    goal_states = frozenset(i for i, s in enumerate(states) if satisfies(s, p.goal))
    return StateGraph(tuple(states), tuple(edges), index[p.init], goal_states, reachable_only)


def _reachable_states(p: ClassicalProblem, max_states: int) -> list[State]:
    seen = {p.init}
    order = [p.init]
    queue = deque([p.init])
    while queue:
        s = queue.popleft()
        for a in p.actions:
            if applicable(s, a):
                successor = apply(s, a)
                if successor not in seen:
                    if len(seen) >= max_states:
                        raise TooLarge(f"more than {max_states} reachable states")
                    seen.add(successor)
                    order.append(successor)
                    queue.append(successor)
    return order


def _distances_from_initial(g: StateGraph) -> dict[int, int]:
    dist = {g.initial: 0}
    queue = deque([g.initial])
    while queue:
        v = queue.popleft()
        for _, w in g.successors[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def shortest_solving_trajectory(g: StateGraph) -> int | None:
    """BFS distance from the initial state to the nearest goal state, or None."""
    dist = _distances_from_initial(g)
    reachable_goals = [dist[v] for v in g.goal_states if v in dist]
    return min(reachable_goals) if reachable_goals else None


def solvable_at_exact_length(g: StateGraph, k: int) -> bool:
    """True iff some walk of length exactly `k` leads from the initial state to a goal.

    Walks may revisit states, matching the exact-horizon semantics of the
    bounded encoding.
    """
    frontier = {g.initial}
    for _ in range(k):
        frontier = {w for v in frontier for _, w in g.successors[v]}
        if not frontier:
            return False
    return bool(frontier & g.goal_states)


def eccentricity(g: StateGraph) -> int:
    """Largest BFS distance from the initial state over reachable states."""
    dist = _distances_from_initial(g)
    return max(dist.values())
