"""Render syntax trees back to text; output re-parses to an identical tree."""

from __future__ import annotations

from plankit.model import GroundAtom
from plankit.pddl.ast import ActionSchema, DomainAst, Literal, ProblemAst, TypedName

__all__ = ["format_domain", "format_problem", "format_literal"]


def _typed(pairs: tuple[TypedName, ...]) -> str:
    return " ".join(f"{name} - {type_name}" for name, type_name in pairs)


def format_literal(lit: Literal) -> str:
    return str(lit)


def _format_atom(a: GroundAtom) -> str:
    return str(a)


def _conjunction(literals: tuple[Literal, ...]) -> str:
    if not literals:
        return "(and)"
    return "(and {})".format(" ".join(format_literal(l) for l in literals))


def _format_action(a: ActionSchema) -> str:
    lines = [f"  (:action {a.name}"]
    lines.append(f"    :parameters ({_typed(a.params)})")
    lines.append(f"    :precondition {_conjunction(a.precondition)}")
    lines.append(f"    :effect {_conjunction(a.effect)})")
    return "\n".join(lines)


def format_domain(d: DomainAst) -> str:
    lines = [f"(define (domain {d.name})"]
    if d.types:
        lines.append(f"  (:types {_typed(d.types)})")
    if d.constants:
        lines.append(f"  (:constants {_typed(d.constants)})")
    if d.predicates:
        lines.append("  (:predicates")
        for p in d.predicates:
            body = f" {_typed(p.params)}" if p.params else ""
            lines.append(f"    ({p.name}{body})")
        lines.append("  )")
    else:
        lines.append("  (:predicates)")
    for a in d.actions:
        lines.append(_format_action(a))
    lines.append(")")
    return "\n".join(lines) + "\n"


def format_problem(p: ProblemAst) -> str:
    lines = [f"(define (problem {p.name})", f"  (:domain {p.domain_name})"]
    if p.objects:
        lines.append(f"  (:objects {_typed(p.objects)})")
    lines.append("  (:init")
    for a in p.init:
        lines.append(f"    {_format_atom(a)}")
    lines.append("  )")
    lines.append(f"  (:goal {_conjunction(p.goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"
