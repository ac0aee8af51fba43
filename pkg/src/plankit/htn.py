"""Totally ordered, state-based hierarchical planning.

Compound tasks are refined by methods whose subtasks splice in place of the
refined task, preserving the total order; primitive tasks execute through
the shared ground-action semantics.  Search is depth-first backtracking over
the decomposition choices, with a depth bound that turns recursive method
sets into a budget stop instead of divergence.

Domain files extend the classical grammar with `(:task name :parameters
(...))` and `(:method name :parameters (...) :task (name args...)
:precondition (...) :ordered-subtasks ((t1 ...) (t2 ...)))`; problem files
replace `:goal` with `(:htn :ordered-subtasks (...))`.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from plankit.grounding import ClassicalProblem, build_problem, objects_of_type
from plankit.model import GroundAction, GroundAtom, Plan, State, applicable, apply
from plankit.pddl.ast import Diagnostic, Literal, PredicateDecl, TypedName, TypeGraph, unify
from plankit.pddl.lexer import Token, TokenKind
from plankit.pddl.linker import link
from plankit.pddl.parser import (
    Group,
    parse_conjunction,
    parse_domain,
    parse_problem,
    parse_typed_list,
    split_sections,
)
from plankit.search import Outcome, SearchConfig, SearchResult, SearchStats

__all__ = [
    "TaskName",
    "Task",
    "TaskNetwork",
    "Method",
    "HtnProblem",
    "HtnParse",
    "TraceNode",
    "DecompositionTrace",
    "HtnResult",
    "parse_htn",
    "applicable_methods",
    "decompose_step",
    "seek_plan",
]

PRIMITIVE = "primitive"
COMPOUND = "compound"


@dataclass(frozen=True)
class TaskName:
    name: str
    kind: str  # primitive | compound
    arity: int


@dataclass(frozen=True)
class Task:
    """A task occurrence; arguments are constants or variables."""

    name: str
    args: tuple[str, ...] = ()

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)

    def __str__(self) -> str:
        if self.args:
            return "({} {})".format(self.name, " ".join(self.args))
        return f"({self.name})"


# The constraint set of a network is exactly this total order.
TaskNetwork = tuple[Task, ...]


@dataclass(frozen=True)
class Method:
    """A decomposition rule: the compound task it refines and its subtasks."""

    name: str
    task: Task  # pattern; may contain variables
    parameters: tuple[TypedName, ...] = ()
    precondition: tuple[Literal, ...] = ()  # evaluated in the current state
    subtasks: TaskNetwork = ()


@dataclass(frozen=True)
class HtnProblem:
    domain_name: str
    problem_name: str
    predicates: tuple[PredicateDecl, ...]
    task_names: dict[str, TaskName]
    methods: tuple[Method, ...]
    init_network: TaskNetwork
    init: State
    objects: tuple[TypedName, ...]
    types: TypeGraph
    ground_problem: ClassicalProblem  # grounded operators; goal is empty

    @property
    def num_operators(self) -> int:
        return sum(1 for t in self.task_names.values() if t.kind == PRIMITIVE)

    def default_depth_bound(self) -> int:
        return 10 * (self.num_operators + len(self.methods))


@dataclass
class HtnParse:
    problem: HtnProblem | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.problem is not None and not any(d.severity == "error" for d in self.diagnostics)


def _parse_task_form(form: Group, diags: list[Diagnostic], *, where: str) -> Task | None:
    if not isinstance(form, Group) or form.head() is None:
        diags.append(Diagnostic("error", f"expected a task in {where}",
                                getattr(form, "line", 0), getattr(form, "col", 0)))
        return None
    args: list[str] = []
    for item in form.items[1:]:
        if isinstance(item, Token) and item.kind in (TokenKind.NAME, TokenKind.VARIABLE):
            args.append(item.text)
        else:
            diags.append(Diagnostic("error", f"expected a task argument in {where}",
                                    form.line, form.col))
            return None
    return Task(form.head(), tuple(args))


def _parse_subtask_list(values: list, diags: list[Diagnostic], *, where: str) -> TaskNetwork:
    if len(values) != 1 or not isinstance(values[0], Group):
        diags.append(Diagnostic("error", f"':ordered-subtasks' in {where} requires "
                                         "a parenthesized task list"))
        return ()
    tasks: list[Task] = []
    for item in values[0].items:
        task = _parse_task_form(item, diags, where=where)
        if task is not None:
            tasks.append(task)
    return tuple(tasks)


def _parse_method(form: Group, diags: list[Diagnostic]) -> Method | None:
    sections = split_sections(form.items, diags)
    if not sections or not sections[0][1]:
        diags.append(Diagnostic("error", "':method' requires a name", form.line, form.col))
        return None
    head_token = sections[0][1][0]
    if not (isinstance(head_token, Token) and head_token.kind is TokenKind.NAME):
        diags.append(Diagnostic("error", "':method' requires a name", form.line, form.col))
        return None
    name = head_token.text
    parameters: tuple[TypedName, ...] = ()
    task: Task | None = None
    precondition: tuple[Literal, ...] = ()
    subtasks: TaskNetwork = ()
    for keyword, values in sections[1:]:
        if keyword.text == ":parameters":
            if values and isinstance(values[0], Group):
                parameters = tuple(parse_typed_list(values[0].items, diags,
                                                    kind=TokenKind.VARIABLE,
                                                    what="parameter variable"))
            else:
                diags.append(Diagnostic("error", f"method '{name}': ':parameters' requires "
                                                 "a parenthesized list", keyword.line, keyword.col))
        elif keyword.text == ":task":
            if values and isinstance(values[0], Group):
                task = _parse_task_form(values[0], diags, where=f"method '{name}'")
            else:
                diags.append(Diagnostic("error", f"method '{name}': ':task' requires a task",
                                        keyword.line, keyword.col))
        elif keyword.text == ":precondition":
            if values:
                precondition = parse_conjunction(values[0], diags,
                                                 where=f"precondition of method '{name}'")
        elif keyword.text == ":ordered-subtasks":
            subtasks = _parse_subtask_list(values, diags, where=f"method '{name}'")
        else:
            diags.append(Diagnostic("error", f"unknown method section '{keyword.text}'",
                                    keyword.line, keyword.col))
    if task is None:
        diags.append(Diagnostic("error", f"method '{name}' has no ':task'", form.line, form.col))
        return None
    return Method(name, task, parameters, precondition, subtasks)


def parse_htn(domain_text: str, problem_text: str) -> HtnParse:
    """Parse and link a hierarchical domain/problem pair."""
    domain_parse = parse_domain(domain_text)
    problem_parse = parse_problem(problem_text)
    diags = list(domain_parse.diagnostics) + list(problem_parse.diagnostics)
    if domain_parse.domain is None or problem_parse.problem is None:
        return HtnParse(None, diags)
    domain = domain_parse.domain

    task_names: dict[str, TaskName] = {
        schema.name: TaskName(schema.name, PRIMITIVE, len(schema.params))
        for schema in domain.actions
    }
    methods: list[Method] = []
    for form in domain_parse.htn_forms:
        if form.head() == ":task":
            sections = split_sections(form.items, diags)
            values = sections[0][1] if sections else []
            if not values or not (isinstance(values[0], Token) and values[0].kind is TokenKind.NAME):
                diags.append(Diagnostic("error", "':task' requires a name", form.line, form.col))
                continue
            name = values[0].text
            params: tuple[TypedName, ...] = ()
            for keyword, sub_values in sections[1:]:
                if keyword.text == ":parameters" and sub_values and isinstance(sub_values[0], Group):
                    params = tuple(parse_typed_list(sub_values[0].items, diags,
                                                    kind=TokenKind.VARIABLE,
                                                    what="parameter variable"))
                elif keyword.text != ":parameters":
                    diags.append(Diagnostic("error", f"unknown task section '{keyword.text}'",
                                            keyword.line, keyword.col))
            if name in task_names:
                diags.append(Diagnostic("error", f"task '{name}' collides with an existing "
                                                 f"{task_names[name].kind} task", form.line, form.col))
            else:
                task_names[name] = TaskName(name, COMPOUND, len(params))
        else:
            method = _parse_method(form, diags)
            if method is not None:
                methods.append(method)

    predicate_decls = {p.name: p for p in domain.predicates}
    for m in methods:
        declared = task_names.get(m.task.name)
        if declared is None or declared.kind != COMPOUND:
            diags.append(Diagnostic("error", f"method '{m.name}' refines unknown "
                                             f"compound task '{m.task.name}'"))
        elif declared.arity != len(m.task.args):
            diags.append(Diagnostic("error", f"method '{m.name}': task '{m.task.name}' "
                                             f"expects {declared.arity} arguments"))
        bound = {a for a in m.task.args if a.startswith("?")}
        bound |= {v for v, _ in m.parameters}
        for lit in m.precondition:
            decl = predicate_decls.get(lit.predicate)
            if decl is None:
                diags.append(Diagnostic("error", f"method '{m.name}' uses undeclared "
                                                 f"predicate '{lit.predicate}'"))
            elif decl.arity != len(lit.args):
                diags.append(Diagnostic("error", f"method '{m.name}': predicate "
                                                 f"'{lit.predicate}' expects {decl.arity} arguments"))
            for arg in lit.args:
                if arg.startswith("?") and arg not in bound:
                    diags.append(Diagnostic("error", f"method '{m.name}' uses unbound "
                                                     f"variable '{arg}'"))
        for sub in m.subtasks:
            declared = task_names.get(sub.name)
            if declared is None:
                diags.append(Diagnostic("error", f"method '{m.name}' references unknown "
                                                 f"task '{sub.name}'"))
            elif declared.arity != len(sub.args):
                diags.append(Diagnostic("error", f"method '{m.name}': task '{sub.name}' "
                                                 f"expects {declared.arity} arguments"))
            for arg in sub.args:
                if arg.startswith("?") and arg not in bound:
                    diags.append(Diagnostic("error", f"method '{m.name}' uses unbound "
                                                     f"variable '{arg}'"))

    refined = {m.task.name for m in methods}
    for t in task_names.values():
        if t.kind == COMPOUND and t.name not in refined:
            diags.append(Diagnostic("warning", f"compound task '{t.name}' has no methods "
                                               "and cannot be decomposed"))

    htn_form = problem_parse.htn_form
    if htn_form is None:
        diags.append(Diagnostic("error", "problem has no '(:htn ...)' section"))
        return HtnParse(None, diags)
    init_network: TaskNetwork = ()
    for keyword, values in split_sections(htn_form.items[1:], diags):
        if keyword.text == ":ordered-subtasks":
            init_network = _parse_subtask_list(values, diags, where=":htn")
        else:
            diags.append(Diagnostic("error", f"unknown ':htn' section '{keyword.text}'",
                                    keyword.line, keyword.col))
    for task in init_network:
        if not task.is_ground:
            diags.append(Diagnostic("error", f"initial network task {task} is not ground"))
        declared = task_names.get(task.name)
        if declared is None:
            diags.append(Diagnostic("error", f"initial network references unknown task '{task.name}'"))
        elif declared.arity != len(task.args):
            diags.append(Diagnostic("error", f"initial network task '{task.name}' "
                                             f"expects {declared.arity} arguments"))

    link_result = link(domain, problem_parse.problem)
    diags.extend(link_result.diagnostics)
    if link_result.linked is None or any(d.severity == "error" for d in diags):
        return HtnParse(None, diags)
    linked = link_result.linked
    object_names = {name for name, _ in linked.objects}
    for task in init_network:
        for arg in task.args:
            if arg not in object_names:
                diags.append(Diagnostic("error", f"initial network task {task} references "
                                                 f"unknown object '{arg}'"))
    if any(d.severity == "error" for d in diags):
        return HtnParse(None, diags)
    ground = build_problem(linked, prune=False)

    problem = HtnProblem(
        domain_name=domain.name,
        problem_name=problem_parse.problem.name,
        predicates=domain.predicates,
        task_names=task_names,
        methods=tuple(methods),
        init_network=init_network,
        init=ground.init,
        objects=linked.objects,
        types=linked.types,
        ground_problem=ground,
    )
    return HtnParse(problem, diags)


def _instantiate_task(task: Task, binding: dict[str, str]) -> Task:
    return Task(task.name, tuple(binding.get(a, a) for a in task.args))


def applicable_methods(t: Task, s: State, p: HtnProblem) -> list[tuple[Method, dict[str, str]]]:
    """Methods (with full bindings) that refine `t` and whose precondition holds in `s`.

    Candidates are ordered by method declaration order, then by binding
    enumeration order over the typed object lists.
    """
    out: list[tuple[Method, dict[str, str]]] = []
    object_types = dict(p.objects)
    for m in p.methods:
        if m.task.name != t.name or len(m.task.args) != len(t.args):
            continue
        base = unify(Literal(m.task.name, m.task.args), GroundAtom(t.name, t.args))
        if base is None:
            continue
        declared_types = dict(m.parameters)
        # A pattern-bound parameter must still respect its declared type.
        well_typed = True
        for v, obj in base.items():
            if v in declared_types:
                actual = object_types.get(obj)
                if actual is None or not p.types.is_subtype(actual, declared_types[v]):
                    well_typed = False
                    break
        if not well_typed:
            continue
        free = [(v, tp) for v, tp in m.parameters if v not in base]
        pools = [objects_of_type(tp, p.objects, p.types) for _, tp in free]
        for combo in itertools.product(*pools):
            binding = dict(base)
            binding.update(zip((v for v, _ in free), combo))
            if _precondition_holds(m.precondition, binding, s):
                out.append((m, binding))
    return out


def _precondition_holds(precondition: tuple[Literal, ...], binding: dict[str, str],
                        s: State) -> bool:
    for lit in precondition:
        ground = GroundAtom(lit.predicate, tuple(binding.get(a, a) for a in lit.args))
        if lit.negated == (ground in s.atoms):
            return False
    return True


def decompose_step(tn: TaskNetwork, s: State,
                   p: HtnProblem) -> list[tuple[TaskNetwork, State, tuple[GroundAction, ...]]]:
    """Successor networks from refining or executing the first task of `tn`.

    The total order forces selecting the first task.  A primitive task yields
    at most one successor (the task applied); a compound task yields one
    successor per applicable method, its subtasks spliced in front of the
    remaining network, in the same state.
    """
    if not tn:
        raise ValueError("cannot decompose an empty task network")
    t, rest = tn[0], tn[1:]
    declared = p.task_names.get(t.name)
    if declared is not None and declared.kind == PRIMITIVE:
        action = p.ground_problem.find_action(t.name, t.args)
        if action is None or not applicable(s, action):
            return []
        return [(rest, apply(s, action), (action,))]
    successors = []
    for m, binding in applicable_methods(t, s, p):
        spliced = tuple(_instantiate_task(sub, binding) for sub in m.subtasks) + rest
        successors.append((spliced, s, ()))
    return successors


@dataclass(frozen=True)
class TraceNode:
    """One decomposition record; leaves carry the applied ground action."""

    task: Task
    action: GroundAction | None = None
    method: str | None = None
    binding: tuple[tuple[str, str], ...] = ()
    children: tuple["TraceNode", ...] = ()


@dataclass(frozen=True)
class DecompositionTrace:
    roots: tuple[TraceNode, ...]

    def primitive_actions(self) -> list[GroundAction]:
        """In-order primitive leaves; equals the returned plan exactly."""
        out: list[GroundAction] = []

        def walk(node: TraceNode) -> None:
            if node.action is not None:
                out.append(node.action)
            for child in node.children:
                walk(child)

        for root in self.roots:
            walk(root)
        return out

    def render(self) -> str:
        lines: list[str] = []

        def walk(node: TraceNode, depth: int) -> None:
            indent = "  " * depth
            if node.action is not None:
                lines.append(f"{indent}{node.action}")
            else:
                binding = " ".join(f"{v}={obj}" for v, obj in node.binding)
                suffix = f" [{binding}]" if binding else ""
                lines.append(f"{indent}{node.task} via {node.method}{suffix}")
            for child in node.children:
                walk(child, depth + 1)

        for root in self.roots:
            walk(root, 0)
        return "\n".join(lines) + ("\n" if lines else "")

    def to_dict(self) -> list[dict]:
        def walk(node: TraceNode) -> dict:
            if node.action is not None:
                return {"task": str(node.task), "action": str(node.action)}
            return {
                "task": str(node.task),
                "method": node.method,
                "binding": {v: obj for v, obj in node.binding},
                "children": [walk(c) for c in node.children],
            }

        return [walk(root) for root in self.roots]


@dataclass
class HtnResult:
    result: SearchResult
    trace: DecompositionTrace | None

    @property
    def plan(self) -> Plan | None:
        return self.result.plan


def seek_plan(p: HtnProblem, config: SearchConfig | None = None) -> HtnResult:
    """Depth-first backtracking over decomposition choices from the initial network.

    Success is an empty network; the returned plan is the in-order sequence of
    executed primitive tasks, applicable in the initial state by construction.
    The depth bound (default 10 * (|operators| + |methods|)) converts
    unbounded recursive decompositions into a budget stop.
    """
    cfg = config or SearchConfig()
    depth_limit = cfg.max_depth if cfg.max_depth is not None else p.default_depth_bound()
    start = time.perf_counter()
    stats = SearchStats()
    budget_hit = False

    def solve(tn: TaskNetwork, s: State, depth: int) -> tuple[list[GroundAction], list[TraceNode]] | None:
        nonlocal budget_hit
        if not tn:
            return ([], [])
        if depth >= depth_limit:
            budget_hit = True
            return None
        if cfg.node_budget is not None and stats.nodes_expanded >= cfg.node_budget:
            budget_hit = True
            return None
        stats.nodes_expanded += 1
        stats.max_frontier = max(stats.max_frontier, depth + 1)
        t, rest = tn[0], tn[1:]
        declared = p.task_names.get(t.name)
        if declared is not None and declared.kind == PRIMITIVE:
            action = p.ground_problem.find_action(t.name, t.args)
            if action is None or not applicable(s, action):
                return None
            sub = solve(rest, apply(s, action), depth + 1)
            if sub is None:
                return None
            plan, traces = sub
            leaf = TraceNode(task=t, action=action)
            return ([action] + plan, [leaf] + traces)
        for m, binding in applicable_methods(t, s, p):
            subtasks = tuple(_instantiate_task(sub, binding) for sub in m.subtasks)
            result = solve(subtasks + rest, s, depth + 1)
            if result is None:
                continue
            plan, traces = result
            count = len(subtasks)
            node = TraceNode(task=t, method=m.name,
                             binding=tuple(sorted(binding.items())),
                             children=tuple(traces[:count]))
            return (plan, [node] + traces[count:])
        return None

    solved = solve(p.init_network, p.init, 0)
    stats.duration = time.perf_counter() - start
    if solved is not None:
        plan, traces = solved
        return HtnResult(SearchResult(Outcome.PLAN, tuple(plan), stats),
                         DecompositionTrace(tuple(traces)))
    outcome = Outcome.BUDGET_EXHAUSTED if budget_hit else Outcome.UNSOLVABLE
    return HtnResult(SearchResult(outcome, None, stats), None)
