"""Checked syntax trees for domain and problem descriptions.

AST nodes are immutable and carry no source spans, so two parses of
structurally identical text compare equal; spans live on diagnostics only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from plankit.model import GroundAtom

__all__ = [
    "Diagnostic",
    "TypedName",
    "PredicateDecl",
    "Literal",
    "ActionSchema",
    "DomainAst",
    "ProblemAst",
    "TypeGraph",
    "OBJECT_TYPE",
    "is_variable",
    "unify",
]

OBJECT_TYPE = "object"  # built-in root of every type hierarchy


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"


# A (name, type) pair: action/predicate parameter, object, or constant.
TypedName = tuple[str, str]


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[TypedName, ...]  # variables with their types

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class Literal:
    """A possibly negated predicate application; args are variables or constants."""

    predicate: str
    args: tuple[str, ...] = ()
    negated: bool = False

    def __str__(self) -> str:
        inner = "({})".format(" ".join((self.predicate,) + self.args))
        return f"(not {inner})" if self.negated else inner


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[TypedName, ...]
    precondition: tuple[Literal, ...]  # conjunction
    effect: tuple[Literal, ...]  # conjunction; negated literal = delete

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)


@dataclass(frozen=True)
class DomainAst:
    name: str
    types: tuple[TypedName, ...] = ()  # (type, parent) pairs, declaration order
    constants: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def predicate(self, name: str) -> PredicateDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[TypedName, ...] = ()
    init: tuple[GroundAtom, ...] = ()  # declaration order, duplicates preserved
    goal: tuple[Literal, ...] = ()  # conjunction of ground literals


class TypeGraph:
    """The declared type forest rooted at the built-in `object` type."""

    def __init__(self, types: tuple[TypedName, ...] = ()):
        self.parent: dict[str, str] = {}
        for t, parent in types:
            self.parent.setdefault(t, parent)

    def is_declared(self, t: str) -> bool:
        return t == OBJECT_TYPE or t in self.parent

    def is_subtype(self, t: str, ancestor: str) -> bool:
        """Reflexive-transitive subtype check; everything is a subtype of `object`."""
        if ancestor == OBJECT_TYPE:
            return True
        seen = set()
        while t is not None and t not in seen:
            if t == ancestor:
                return True
            seen.add(t)
            t = self.parent.get(t)
        return False

    def declared_types(self) -> list[str]:
        return list(self.parent)


def is_variable(term: str) -> bool:
    return term.startswith("?")


def unify(pattern: Literal | GroundAtom, target: GroundAtom) -> dict[str, str] | None:
    """Match a predicate pattern against a ground atom positionally.

    Returns the variable binding, or None if predicate, arity, a constant, or
    a repeated variable clashes.
    """
    predicate = pattern.predicate
    args = pattern.args
    if predicate != target.predicate or len(args) != len(target.args):
        return None
    binding: dict[str, str] = {}
    for term, value in zip(args, target.args):
        if is_variable(term):
            bound = binding.setdefault(term, value)
            if bound != value:
                return None
        elif term != value:
            return None
    return binding
