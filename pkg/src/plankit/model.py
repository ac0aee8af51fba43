"""Ground planning model: atoms, states, actions, goals, and transition semantics.

States are finite sets of ground atoms under the closed-world assumption
(any atom not in the set is false).  All values are immutable after
construction and safe to share across search branches and threads.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "GroundAtom",
    "State",
    "Goal",
    "GroundAction",
    "Plan",
    "ModelError",
    "NotApplicable",
    "NotApplicableAt",
    "InconsistentGoal",
    "intern_symbol",
    "is_symbol",
    "atom",
    "applicable",
    "apply",
    "apply_sequence",
    "satisfies",
    "relevant",
    "regress",
]

# Identifiers: letters, digits, hyphens, underscores; leading letter.
# Case-insensitive, normalized to lowercase.
_IDENT_RE = re.compile(r"[a-z][a-z0-9_-]*\Z")


class ModelError(Exception):
    """A malformed model construct (bad symbol, conflicting literal sets, ...)."""


class NotApplicable(ModelError):
    """An action's preconditions do not hold in the state it was applied to."""


class NotApplicableAt(NotApplicable):
    """Step `index` of an action sequence failed its precondition check."""

    def __init__(self, index: int, action: "GroundAction | None" = None):
        self.index = index
        self.action = action
        suffix = f" ({action})" if action is not None else ""
        super().__init__(f"step {index}{suffix} is not applicable")


class InconsistentGoal(ModelError):
    """Regression produced a goal requiring some atom to be both true and false."""


def intern_symbol(text: str) -> str:
    """Normalize an identifier to its canonical interned lowercase form."""
    norm = text.lower()
    if not _IDENT_RE.match(norm):
        raise ModelError(f"invalid symbol: {text!r}")
    return sys.intern(norm)


def is_symbol(text: str) -> bool:
    return bool(_IDENT_RE.match(text.lower()))


@dataclass(frozen=True)
class GroundAtom:
    """A predicate applied to constant arguments; true or false in a state."""

    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if self.args:
            return "({} {})".format(self.predicate, " ".join(self.args))
        return f"({self.predicate})"

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        return (self.predicate, self.args)


def atom(predicate: str, *args: str) -> GroundAtom:
    """Build a ground atom, normalizing all symbols."""
    return GroundAtom(intern_symbol(predicate), tuple(intern_symbol(a) for a in args))


@dataclass(frozen=True)
class State:
    """A finite set of true ground atoms; everything absent is false."""

    atoms: frozenset[GroundAtom] = frozenset()

    @classmethod
    def of(cls, atoms: Iterable[GroundAtom]) -> "State":
        return cls(frozenset(atoms))

    def __contains__(self, a: GroundAtom) -> bool:
        return a in self.atoms

    def __iter__(self) -> Iterator[GroundAtom]:
        return iter(sorted(self.atoms, key=lambda a: a.key))

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self) + "}"


@dataclass(frozen=True)
class Goal:
    """Atoms required true (positive) and required false (negative)."""

    positive: frozenset[GroundAtom] = frozenset()
    negative: frozenset[GroundAtom] = frozenset()

    def __post_init__(self) -> None:
        overlap = self.positive & self.negative
        if overlap:
            raise ModelError(f"goal requires atoms both true and false: {sorted(map(str, overlap))}")

    @classmethod
    def of(cls, positive: Iterable[GroundAtom] = (), negative: Iterable[GroundAtom] = ()) -> "Goal":
        return cls(frozenset(positive), frozenset(negative))

    @property
    def is_empty(self) -> bool:
        return not self.positive and not self.negative

    def __str__(self) -> str:
        parts = [str(a) for a in sorted(self.positive, key=lambda a: a.key)]
        parts += [f"(not {a})" for a in sorted(self.negative, key=lambda a: a.key)]
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class GroundAction:
    """A fully instantiated operator.

    `pre_pos`/`pre_neg` are the positive and negative preconditions; `add` and
    `delete` the effect lists.  An operator adding and deleting the same atom
    is rejected at construction time as a modeling error, as is a
    contradictory precondition.
    """

    name: str
    args: tuple[str, ...] = ()
    pre_pos: frozenset[GroundAtom] = frozenset()
    pre_neg: frozenset[GroundAtom] = frozenset()
    add: frozenset[GroundAtom] = frozenset()
    delete: frozenset[GroundAtom] = frozenset()

    def __post_init__(self) -> None:
        if self.add & self.delete:
            raise ModelError(f"action {self} both adds and deletes: "
                             f"{sorted(str(a) for a in self.add & self.delete)}")
        if self.pre_pos & self.pre_neg:
            raise ModelError(f"action {self} has contradictory preconditions: "
                             f"{sorted(str(a) for a in self.pre_pos & self.pre_neg)}")

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        """Canonical sort key: (name, argument tuple)."""
        return (self.name, self.args)

    def __str__(self) -> str:
        if self.args:
            return "({} {})".format(self.name, " ".join(self.args))
        return f"({self.name})"


# A plan is simply an ordered sequence of ground actions; it may be empty.
Plan = tuple[GroundAction, ...]


def applicable(s: State, a: GroundAction) -> bool:
    """True iff all positive preconditions hold and no negative one does."""
    return a.pre_pos <= s.atoms and not (a.pre_neg & s.atoms)


def apply(s: State, a: GroundAction) -> State:
    """Progress `s` through `a`: (s ∪ add) minus delete.  Raises NotApplicable."""
    if not applicable(s, a):
        raise NotApplicable(f"action {a} is not applicable in {s}")
    return State((s.atoms | a.add) - a.delete)


def apply_sequence(s: State, plan: Iterable[GroundAction]) -> State:
    """Left fold of `apply`; raises NotApplicableAt(i) at the first bad step."""
    for i, a in enumerate(plan):
        if not applicable(s, a):
            raise NotApplicableAt(i, a)
        s = apply(s, a)
    return s


def satisfies(s: State, g: Goal) -> bool:
    """True iff every positive goal atom holds in `s` and no negative one does."""
    return g.positive <= s.atoms and not (g.negative & s.atoms)


def relevant(a: GroundAction, g: Goal) -> bool:
    """True iff `a`'s effects contribute to `g` without negating any part of it.

    Contribution means adding a positive goal atom or deleting a negative one;
    negation means deleting a positive goal atom or adding a negative one.
    """
    contributes = bool(a.add & g.positive) or bool(a.delete & g.negative)
    conflicts = bool(a.delete & g.positive) or bool(a.add & g.negative)
    return contributes and not conflicts


def regress(g: Goal, a: GroundAction) -> Goal:
    """Regress `g` backward through `a`: drop its effects, insert its preconditions.

    Precondition: relevant(a, g).  Raises InconsistentGoal when the regressed
    goal would require some atom to be both true and false.
    """
    positive = (g.positive - a.add) | a.pre_pos
    negative = (g.negative - a.delete) | a.pre_neg
    overlap = positive & negative
    if overlap:
        raise InconsistentGoal(
            f"regression through {a} requires atoms both true and false: "
            f"{sorted(str(x) for x in overlap)}")
    return Goal(positive, negative)
