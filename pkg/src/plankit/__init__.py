"""plankit: parse, ground, solve, and validate STRIPS-style planning problems.

Subsystems: a PDDL frontend (`plankit.pddl`), a grounder (`plankit.grounding`),
forward and backward state-space search (`plankit.search`), bounded planning
as constraint satisfaction (`plankit.csp`), totally ordered hierarchical
planning (`plankit.htn`), plan validation (`plankit.validation`), and a
brute-force state-graph oracle with the fixture corpus (`plankit.oracle`,
`plankit.fixtures`).
"""

from plankit.model import (
    Goal,
    GroundAction,
    GroundAtom,
    InconsistentGoal,
    ModelError,
    NotApplicable,
    NotApplicableAt,
    Plan,
    State,
    applicable,
    apply,
    apply_sequence,
    atom,
    regress,
    relevant,
    satisfies,
)

__version__ = "0.1.0"

__all__ = [
    "Goal",
    "GroundAction",
    "GroundAtom",
    "InconsistentGoal",
    "ModelError",
    "NotApplicable",
    "NotApplicableAt",
    "Plan",
    "State",
    "applicable",
    "apply",
    "apply_sequence",
    "atom",
    "regress",
    "relevant",
    "satisfies",
    "__version__",
]
