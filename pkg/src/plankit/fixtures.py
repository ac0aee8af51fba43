"""The canonical fixture corpus and its oracle-generated expectations.

Expected optimal lengths are never hand-entered: they are recomputed from the
explicit state graph, and `python -m plankit.fixtures` regenerates the cached
listing (`fixtures/oracle_cache.txt`) that the test suite compares against.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from plankit import oracle
from plankit.grounding import ClassicalProblem, build_problem
from plankit.htn import HtnProblem, parse_htn
from plankit.pddl import link, parse_domain, parse_problem

__all__ = [
    "Fixture",
    "FIXTURES",
    "CACHE_FILE",
    "fixture_path",
    "read_fixture_file",
    "load_classical",
    "load_htn",
    "oracle_length",
    "cache_lines",
    "main",
]

CACHE_FILE = "oracle_cache.txt"


@dataclass(frozen=True)
class Fixture:
    name: str
    domain_file: str
    problem_file: str
    htn: bool = False
    exhaustive_oracle: bool = True  # False: enumerate the reachable subset only
    note: str = ""


FIXTURES: tuple[Fixture, ...] = (
    Fixture("keys-out-with-keys", "keys/domain.pddl", "keys/goal-out-keys.pddl",
            note="single-door smart home; get out holding the key"),
    Fixture("keys-out-keys-locked", "keys/domain.pddl", "keys/goal-out-keys-locked.pddl",
            note="as above, but the door must be locked again at the end"),
    Fixture("keys-locked-out", "keys/domain.pddl", "keys/unsolvable.pddl",
            note="agent locked out without the key; nothing is applicable"),
    Fixture("keys3-leave", "keys3/domain.pddl", "keys3/problem.pddl",
            note="three-operator variant: getkeys / unlock / exit"),
    Fixture("logistics-deliver-c1", "logistics/domain.pddl", "logistics/problem.pddl",
            exhaustive_oracle=False,
            note="2 trucks, 2 containers, 3 locations; exercises grounding counts"),
    Fixture("smart-home-instance1", "smart-home/domain.pddl", "smart-home/problem-init-style.pddl",
            exhaustive_oracle=False,
            note="typed household; objects declared through unary :init atoms"),
    Fixture("smart-home-instance2", "smart-home/domain.pddl", "smart-home/problem-objects-style.pddl",
            exhaustive_oracle=False,
            note="typed household; objects declared in an :objects block"),
    Fixture("keys-htn", "htn-keys/domain.pddl", "htn-keys/problem.pddl", htn=True,
            note="hierarchical keys: one compound task, one method"),
    Fixture("busywork", "htn-recursive/domain.pddl", "htn-recursive/problem.pddl", htn=True,
            note="recursive method set; terminates only through the depth bound"),
)


def fixture_path(relative: str) -> Path:
    return Path(str(resources.files(__package__).joinpath("fixtures", relative)))


def read_fixture_file(relative: str) -> str:
    return fixture_path(relative).read_text(encoding="utf-8")


def load_classical(fixture: Fixture, *, prune: bool = True) -> ClassicalProblem:
    if fixture.htn:
        raise ValueError(f"fixture '{fixture.name}' is hierarchical")
    domain_parse = parse_domain(read_fixture_file(fixture.domain_file))
    problem_parse = parse_problem(read_fixture_file(fixture.problem_file))
    assert domain_parse.ok, [str(d) for d in domain_parse.diagnostics]
    assert problem_parse.ok, [str(d) for d in problem_parse.diagnostics]
    linked = link(domain_parse.domain, problem_parse.problem)
    assert linked.ok, [str(d) for d in linked.diagnostics]
    return build_problem(linked.linked, prune=prune)


def load_htn(fixture: Fixture) -> HtnProblem:
    if not fixture.htn:
        raise ValueError(f"fixture '{fixture.name}' is classical")
    parsed = parse_htn(read_fixture_file(fixture.domain_file),
                       read_fixture_file(fixture.problem_file))
    assert parsed.ok, [str(d) for d in parsed.diagnostics]
    return parsed.problem


def oracle_length(fixture: Fixture) -> int | None:
    """Optimal plan length from the explicit state graph; None if unsolvable."""
    problem = load_classical(fixture)
    graph = oracle.build_state_graph(problem, reachable_only=not fixture.exhaustive_oracle)
    return oracle.shortest_solving_trajectory(graph)


def cache_lines() -> list[str]:
    lines = ["; oracle expectations, regenerate with: python -m plankit.fixtures"]
    for fixture in FIXTURES:
        if fixture.htn:
            lines.append(f"{fixture.name} hierarchical")
            continue
        length = oracle_length(fixture)
        expected = "unsolvable" if length is None else f"optimal={length}"
        lines.append(f"{fixture.name} {expected}")
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m plankit.fixtures",
        description="Regenerate (or check) the oracle expectations cache.")
    parser.add_argument("--check", action="store_true",
                        help="verify the cache instead of rewriting it")
    args = parser.parse_args(argv)
    cache = fixture_path(CACHE_FILE)
    fresh = "\n".join(cache_lines()) + "\n"
    if args.check:
        if not cache.exists() or cache.read_text(encoding="utf-8") != fresh:
            print("oracle cache is stale; run: python -m plankit.fixtures", file=sys.stderr)
            return 1
        print("oracle cache is up to date")
        return 0
    cache.write_text(fresh, encoding="utf-8")
    print(f"wrote {cache}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
