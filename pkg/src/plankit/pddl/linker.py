"""Combine a parsed domain with a parsed problem into one checked instance.

Linking resolves the two object-declaration styles (a `:objects` block, or
unary type predicates inside `:init`) into a single object table, and
arity- and type-checks every atom against the domain's declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from plankit.model import GroundAtom
from plankit.pddl.ast import (
    OBJECT_TYPE,
    Diagnostic,
    DomainAst,
    Literal,
    ProblemAst,
    TypedName,
    TypeGraph,
)

__all__ = ["LinkedProblem", "LinkResult", "link"]


@dataclass(frozen=True)
class LinkedProblem:
    domain: DomainAst
    problem: ProblemAst
    types: TypeGraph
    objects: tuple[TypedName, ...]  # declaration order: constants, :objects, init-style
    init: tuple[GroundAtom, ...]  # object-declaring unary type atoms removed
    goal_positive: tuple[GroundAtom, ...]
    goal_negative: tuple[GroundAtom, ...]
    uses_negative_preconditions: bool

    def object_type(self, name: str) -> str | None:
        for obj, type_name in self.objects:
            if obj == name:
                return type_name
        return None


@dataclass
class LinkResult:
    linked: LinkedProblem | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.linked is not None and not any(d.severity == "error" for d in self.diagnostics)


def _check_atom(atom_args: tuple[str, ...], predicate: str, domain: DomainAst,
                graph: TypeGraph, table: dict[str, str], diags: list[Diagnostic],
                *, where: str, require_known: bool) -> None:
    decl = domain.predicate(predicate)
    if decl is None:
        diags.append(Diagnostic("error", f"unknown predicate '{predicate}' in {where}"))
        return
    if decl.arity != len(atom_args):
        diags.append(Diagnostic(
            "error", f"arity mismatch in {where}: '{predicate}' expects {decl.arity} "
                     f"arguments, got {len(atom_args)}"))
        return
    for arg, (_, expected) in zip(atom_args, decl.params):
        actual = table.get(arg)
        if actual is None:
            if require_known:
                diags.append(Diagnostic("error", f"unknown object '{arg}' in {where}"))
            continue
        if not graph.is_subtype(actual, expected):
            diags.append(Diagnostic(
                "error", f"type mismatch in {where}: '{arg}' has type '{actual}', "
                         f"'{predicate}' expects '{expected}'"))


def link(domain: DomainAst, problem: ProblemAst, *, strict_strips: bool = False) -> LinkResult:
    """Link a domain and a problem; all violations become error diagnostics."""
    diags: list[Diagnostic] = []
    if problem.domain_name != domain.name:
        diags.append(Diagnostic(
            "error", f"domain name mismatch: problem '{problem.name}' requires "
                     f"'{problem.domain_name}', domain file declares '{domain.name}'"))
        return LinkResult(None, diags)

    graph = TypeGraph(domain.types)
    predicate_names = {p.name for p in domain.predicates}

    # One object table from both declaration styles.
    table: dict[str, str] = {}
    order: list[TypedName] = []

    def declare(name: str, type_name: str) -> None:
        if not graph.is_declared(type_name):
            diags.append(Diagnostic("error", f"object '{name}' has undeclared type '{type_name}'"))
            return
        existing = table.get(name)
        if existing is None:
            table[name] = type_name
            order.append((name, type_name))
        elif existing != type_name:
            diags.append(Diagnostic(
                "error", f"object '{name}' declared with conflicting types "
                         f"'{existing}' and '{type_name}'"))

    for name, type_name in domain.constants:
        declare(name, type_name)
    for name, type_name in problem.objects:
        declare(name, type_name)

    # Unary init atoms naming a declared type (and not a predicate) declare objects.
    kept_init: list[GroundAtom] = []
    for a in problem.init:
        if (len(a.args) == 1 and a.predicate not in predicate_names
                and graph.is_declared(a.predicate) and a.predicate != OBJECT_TYPE):
            declare(a.args[0], a.predicate)
        else:
            kept_init.append(a)

    # Constants mentioned only inside init atoms default to the root type.
    for a in kept_init:
        for arg in a.args:
            if arg not in table:
                declare(arg, OBJECT_TYPE)

    for a in kept_init:
        _check_atom(a.args, a.predicate, domain, graph, table, diags,
                    where=":init", require_known=True)

    goal_positive: list[GroundAtom] = []
    goal_negative: list[GroundAtom] = []
    for lit in problem.goal:
        _check_atom(lit.args, lit.predicate, domain, graph, table, diags,
                    where=":goal", require_known=True)
        target = goal_negative if lit.negated else goal_positive
        target.append(GroundAtom(lit.predicate, lit.args))
    both = set(goal_positive) & set(goal_negative)
    for a in sorted(both, key=lambda x: x.key):
        diags.append(Diagnostic("error", f"goal requires {a} both true and false"))

    # Action bodies: constants must be known and every literal type-compatible.
    uses_negative_pre = any(lit.negated for s in domain.actions for lit in s.precondition)
    for schema in domain.actions:
        param_types = dict(schema.params)
        for lit in schema.precondition + schema.effect:
            decl = domain.predicate(lit.predicate)
            if decl is None or decl.arity != len(lit.args):
                continue  # already reported when the domain was parsed
            for arg, (_, expected) in zip(lit.args, decl.params):
                if arg.startswith("?"):
                    actual = param_types.get(arg)
                    if actual is not None and not graph.is_subtype(actual, expected):
                        diags.append(Diagnostic(
                            "error", f"type mismatch in action '{schema.name}': parameter "
                                     f"'{arg}' has type '{actual}', '{lit.predicate}' "
                                     f"expects '{expected}'"))
                elif arg not in table:
                    diags.append(Diagnostic(
                        "error", f"action '{schema.name}' references unknown constant '{arg}'"))

    if strict_strips:
        if uses_negative_pre:
            diags.append(Diagnostic(
                "error", "strict STRIPS mode: negative preconditions are not allowed"))
        if goal_negative:
            diags.append(Diagnostic(
                "error", "strict STRIPS mode: negative goal literals are not allowed"))

    if any(d.severity == "error" for d in diags):
        return LinkResult(None, diags)
    linked = LinkedProblem(
        domain=domain,
        problem=problem,
        types=graph,
        objects=tuple(order),
        init=tuple(kept_init),
        goal_positive=tuple(goal_positive),
        goal_negative=tuple(goal_negative),
        uses_negative_preconditions=uses_negative_pre,
    )
    return LinkResult(linked, diags)
