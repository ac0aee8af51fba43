"""Independent plan checking: replay a plan and verify each step and the goal.

The validator resolves each step to the owning problem's ground action by
name and arguments, then replays through the core transition semantics; it
never shares engine code paths, so every engine can be checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from plankit.grounding import ClassicalProblem
from plankit.model import (
    Goal,
    GroundAction,
    GroundAtom,
    State,
    applicable,
    apply,
    satisfies,
)
from plankit.pddl.lexer import LexError, TokenKind, tokenize

__all__ = [
    "Verdict",
    "StepFailure",
    "GoalFailure",
    "UnknownAction",
    "PlanSyntaxError",
    "validate_plan",
    "validate_htn_solution",
    "parse_plan_text",
    "format_plan",
]

# A plan step referenced by name and arguments.
PlanStep = tuple[str, tuple[str, ...]]


class UnknownAction(Exception):
    """A plan step names no ground action of the problem."""

    def __init__(self, index: int, name: str, args: tuple[str, ...]):
        self.index = index
        self.name = name
        self.args = args
        step = "({})".format(" ".join((name,) + args))
        super().__init__(f"step {index}: {step} is not a ground action of the problem")


class PlanSyntaxError(Exception):
    pass


@dataclass(frozen=True)
class StepFailure:
    """Step `index` was inapplicable; the exact blocking literals are listed."""

    index: int
    action: GroundAction
    missing: frozenset[GroundAtom]  # positive preconditions absent from the state
    violated: frozenset[GroundAtom]  # negative preconditions present in the state

    def __str__(self) -> str:
        parts = [f"step {self.index} {self.action} is not applicable"]
        if self.missing:
            parts.append("missing " + ", ".join(str(a) for a in sorted(self.missing, key=lambda x: x.key)))
        if self.violated:
            parts.append("violated " + ", ".join(f"(not {a})" for a in sorted(self.violated, key=lambda x: x.key)))
        return "; ".join(parts)


@dataclass(frozen=True)
class GoalFailure:
    """The final state does not satisfy the goal."""

    missing: frozenset[GroundAtom]
    violated: frozenset[GroundAtom]

    def __str__(self) -> str:
        parts = ["goal unsatisfied"]
        if self.missing:
            parts.append("missing " + ", ".join(str(a) for a in sorted(self.missing, key=lambda x: x.key)))
        if self.violated:
            parts.append("violated " + ", ".join(f"(not {a})" for a in sorted(self.violated, key=lambda x: x.key)))
        return "; ".join(parts)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    failure: StepFailure | GoalFailure | None = None
    state_trace: tuple[State, ...] | None = None

    def __post_init__(self) -> None:
        assert self.valid == (self.failure is None)


def _resolve(p: ClassicalProblem, plan: Iterable[GroundAction | PlanStep]) -> list[GroundAction]:
    steps: list[GroundAction] = []
    for i, step in enumerate(plan):
        if isinstance(step, GroundAction):
            name, args = step.name, step.args
        else:
            name, args = step
        action = p.find_action(name, tuple(args))
        if action is None:
            raise UnknownAction(i, name, tuple(args))
        steps.append(action)
    return steps


def _replay(init: State, steps: Sequence[GroundAction], goal: Goal | None,
            with_trace: bool) -> Verdict:
    state = init
    trace = [state] if with_trace else None
    for i, action in enumerate(steps):
        if not applicable(state, action):
            return Verdict(
                valid=False,
                failure=StepFailure(
                    index=i,
                    action=action,
                    missing=frozenset(action.pre_pos - state.atoms),
                    violated=frozenset(action.pre_neg & state.atoms),
                ),
                state_trace=tuple(trace) if trace is not None else None,
            )
        state = apply(state, action)
        if trace is not None:
            trace.append(state)
    if goal is not None and not satisfies(state, goal):
        return Verdict(
            valid=False,
            failure=GoalFailure(
                missing=frozenset(goal.positive - state.atoms),
                violated=frozenset(goal.negative & state.atoms),
            ),
            state_trace=tuple(trace) if trace is not None else None,
        )
    return Verdict(valid=True, state_trace=tuple(trace) if trace is not None else None)


def validate_plan(p: ClassicalProblem, plan: Iterable[GroundAction | PlanStep],
                  with_trace: bool = False) -> Verdict:
    """Replay `plan` from the initial state and check the goal at the end.

    Raises UnknownAction when a step names no ground action of `p`.
    """
    steps = _resolve(p, plan)
    return _replay(p.init, steps, p.goal, with_trace)


def validate_htn_solution(p, plan: Iterable[GroundAction | PlanStep],
                          with_trace: bool = False) -> Verdict:
    """Replay-only check for hierarchical solutions (no goal test).

    `p` is an HtnProblem; a hierarchical solution is defined by decomposability
    plus applicability in the initial state, and decomposability is certified
    by the planner's trace.
    """
    steps = _resolve(p.ground_problem, plan)
    return _replay(p.init, steps, None, with_trace)


def parse_plan_text(text: str) -> list[PlanStep]:
    """Parse a plan file: one `(action-name arg1 arg2 ...)` per line, `;` comments."""
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise PlanSyntaxError(str(exc)) from exc
    steps: list[PlanStep] = []
    depth = 0
    current: list[str] = []
    for tok in tokens:
        if tok.kind is TokenKind.LPAREN:
            depth += 1
            if depth > 1:
                raise PlanSyntaxError(f"{tok.line}:{tok.col}: nested '(' in plan step")
            current = []
        elif tok.kind is TokenKind.RPAREN:
            if depth == 0:
                raise PlanSyntaxError(f"{tok.line}:{tok.col}: unbalanced ')'")
            depth -= 1
            if not current:
                raise PlanSyntaxError(f"{tok.line}:{tok.col}: empty plan step")
            steps.append((current[0], tuple(current[1:])))
        elif tok.kind is TokenKind.NAME and depth == 1:
            current.append(tok.text)
        else:
            raise PlanSyntaxError(f"{tok.line}:{tok.col}: unexpected token {tok.text!r} in plan file")
    if depth != 0:
        raise PlanSyntaxError("unclosed '(' in plan file")
    return steps


def format_plan(plan: Iterable[GroundAction]) -> str:
    return "".join(f"{a}\n" for a in plan)
