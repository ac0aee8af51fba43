"""Command-line entry point tying the frontend, grounder, engines, and validator together.

Exit codes: 0 success / valid plan, 1 unsolvable or invalid plan, 2 usage or
parse error, 3 budget exhausted.  Reports render as text or JSON carrying
identical facts; JSON output is byte-stable across runs except for the
wall-time field.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from plankit import csp as csp_mod
from plankit import htn as htn_mod
from plankit import validation
from plankit.grounding import ClassicalProblem, GroundingError, build_problem
from plankit.pddl import Diagnostic, link, parse_domain, parse_problem
from plankit.search import (
    Outcome,
    SearchConfig,
    SearchResult,
    Strategy,
    backward_search,
    forward_search,
)

__all__ = ["main", "main_entry", "RunReport", "FORMAT_VERSION"]

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_NEGATIVE = 1  # unsolvable / invalid plan
EXIT_USAGE = 2  # usage or parse error
EXIT_BUDGET = 3

_OUTCOME_EXIT = {
    Outcome.PLAN: EXIT_OK,
    Outcome.UNSOLVABLE: EXIT_NEGATIVE,
    Outcome.BUDGET_EXHAUSTED: EXIT_BUDGET,
}


@dataclass
class RunReport:
    """Everything one invocation reports; both renderings draw on the same fields."""

    command: list[str]
    outcome: str
    domain: str | None = None
    problem: str | None = None
    engine: str | None = None
    plan: list[str] | None = None
    statistics: dict | None = None
    counts: dict | None = None
    diagnostics: list[str] = field(default_factory=list)
    trace: list | None = None
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        out: dict = {"format_version": FORMAT_VERSION, "command": self.command,
                     "outcome": self.outcome}
        for key in ("domain", "problem", "engine", "plan", "statistics", "counts", "trace"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        out["wall_time_s"] = self.wall_time_s
        return out

    def render_text(self) -> str:
        lines = [f"outcome: {self.outcome}"]
        if self.engine:
            lines.append(f"engine: {self.engine}")
        if self.domain:
            lines.append(f"domain: {self.domain}")
        if self.problem:
            lines.append(f"problem: {self.problem}")
        if self.counts:
            lines.append("counts: " + " ".join(f"{k}={v}" for k, v in self.counts.items()))
        if self.plan is not None:
            lines.append(f"plan ({len(self.plan)} steps):")
            lines.extend(f"  {step}" for step in self.plan)
        if self.statistics:
            lines.append("statistics: " + " ".join(f"{k}={v}" for k, v in self.statistics.items()))
        if self.trace is not None:
            lines.append("trace:")
            lines.extend("  " + line for line in self.trace)
        if self.diagnostics:
            lines.append("diagnostics:")
            lines.extend(f"  {d}" for d in self.diagnostics)
        lines.append(f"wall_time_s: {self.wall_time_s:.6f}")
        return "\n".join(lines) + "\n"


def _emit(report: RunReport, fmt: str, started: float) -> None:
    report.wall_time_s = time.perf_counter() - started
    if fmt == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(report.render_text(), end="")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _diag_strings(path: str, diagnostics: list[Diagnostic]) -> list[str]:
    return [f"{path}:{d}" for d in diagnostics]


_KIND_RE = re.compile(r"\(\s*define\s*\(\s*(domain|problem)\b")


def _detect_kind(text: str) -> str:
    match = _KIND_RE.search(text)
    return match.group(1) if match else "domain"


def _load_problem(domain_path: str, problem_path: str, *, prune: bool,
                  diagnostics: list[str]) -> ClassicalProblem | None:
    domain_parse = parse_domain(_read(domain_path))
    diagnostics.extend(_diag_strings(domain_path, domain_parse.diagnostics))
    problem_parse = parse_problem(_read(problem_path))
    diagnostics.extend(_diag_strings(problem_path, problem_parse.diagnostics))
    if domain_parse.domain is None or problem_parse.problem is None:
        return None
    if not (domain_parse.ok and problem_parse.ok):
        return None
    linked = link(domain_parse.domain, problem_parse.problem)
    diagnostics.extend(_diag_strings(problem_path, linked.diagnostics))
    if not linked.ok:
        return None
    return build_problem(linked.linked, prune=prune)


def _cmd_parse(args: argparse.Namespace, argv: list[str], started: float) -> int:
    report = RunReport(command=argv, outcome="ok", domain=args.domain, problem=args.problem)
    paths = [args.domain] + ([args.problem] if args.problem else [])
    try:
        texts = [(path, _read(path)) for path in paths]
    except OSError as exc:
        report.outcome = "error"
        report.diagnostics.append(str(exc))
        _emit(report, args.format, started)
        return EXIT_USAGE

    ok = True
    domain_ast = None
    problem_ast = None
    for path, text in texts:
        if _detect_kind(text) == "problem":
            parsed = parse_problem(text)
            report.diagnostics.extend(_diag_strings(path, parsed.diagnostics))
            ok = ok and parsed.ok
            problem_ast = parsed.problem
        else:
            parsed_domain = parse_domain(text)
            report.diagnostics.extend(_diag_strings(path, parsed_domain.diagnostics))
            ok = ok and parsed_domain.ok
            domain_ast = parsed_domain.domain
    if ok and domain_ast is not None and problem_ast is not None:
        linked = link(domain_ast, problem_ast, strict_strips=args.strict_strips)
        report.diagnostics.extend(str(d) for d in linked.diagnostics)
        ok = linked.ok
    report.outcome = "ok" if ok else "error"
    _emit(report, args.format, started)
    return EXIT_OK if ok else EXIT_USAGE


def _cmd_ground(args: argparse.Namespace, argv: list[str], started: float) -> int:
    report = RunReport(command=argv, outcome="ok", domain=args.domain, problem=args.problem)
    try:
        problem = _load_problem(args.domain, args.problem,
                                prune=not args.no_static_pruning,
                                diagnostics=report.diagnostics)
    except (OSError, GroundingError) as exc:
        problem = None
        report.diagnostics.append(str(exc))
    if problem is None:
        report.outcome = "error"
        _emit(report, args.format, started)
        return EXIT_USAGE
    report.counts = {"fluents": len(problem.fluents), "actions": len(problem.actions)}
    if args.dump:
        report.counts["listing"] = {
            "fluents": [str(f) for f in problem.fluents],
            "actions": [str(a) for a in problem.actions],
        }
    _emit(report, args.format, started)
    return EXIT_OK


def _search_statistics(result: SearchResult) -> dict:
    return {
        "nodes_expanded": result.stats.nodes_expanded,
        "max_frontier": result.stats.max_frontier,
    }


def _cmd_plan(args: argparse.Namespace, argv: list[str], started: float) -> int:
    report = RunReport(command=argv, outcome="error", domain=args.domain,
                       problem=args.problem, engine=args.engine)

    if args.engine == "htn":
        try:
            parsed = htn_mod.parse_htn(_read(args.domain), _read(args.problem))
        except OSError as exc:
            report.diagnostics.append(str(exc))
            _emit(report, args.format, started)
            return EXIT_USAGE
        report.diagnostics.extend(str(d) for d in parsed.diagnostics)
        if not parsed.ok:
            _emit(report, args.format, started)
            return EXIT_USAGE
        config = SearchConfig(max_depth=args.depth_budget, node_budget=args.node_budget)
        outcome = htn_mod.seek_plan(parsed.problem, config)
        result = outcome.result
        report.outcome = result.outcome.value
        report.statistics = _search_statistics(result)
        if result.plan is not None:
            report.plan = [str(a) for a in result.plan]
        if args.trace and outcome.trace is not None:
            report.trace = outcome.trace.render().splitlines()
        _emit(report, args.format, started)
        return _OUTCOME_EXIT[result.outcome]

    try:
        problem = _load_problem(args.domain, args.problem,
                                prune=not args.no_static_pruning,
                                diagnostics=report.diagnostics)
    except (OSError, GroundingError) as exc:
        problem = None
        report.diagnostics.append(str(exc))
    if problem is None:
        _emit(report, args.format, started)
        return EXIT_USAGE

    if args.engine in ("forward", "backward"):
        config = SearchConfig(
            strategy=Strategy(args.strategy),
            node_budget=args.node_budget,
            cycle_checking=not args.no_cycle_check,
        )
        engine = forward_search if args.engine == "forward" else backward_search
        result = engine(problem, config)
    else:  # csp
        if args.csp_method == "min-conflicts":
            if args.bound is None:
                report.diagnostics.append("--csp-method min-conflicts requires --bound")
                _emit(report, args.format, started)
                return EXIT_USAGE
            instance = csp_mod.encode(problem, args.bound)
            mc = csp_mod.min_conflicts(instance, max_steps=args.max_steps, seed=args.seed)
            if mc.solved:
                plan = csp_mod.decode_plan(instance, mc.assignment, problem)
                result = SearchResult(Outcome.PLAN, plan)
            else:
                result = SearchResult(Outcome.BUDGET_EXHAUSTED, None)
            result.stats.nodes_expanded = mc.steps
            report.statistics = {"steps": mc.steps, "best_conflicts": mc.best_conflicts,
                                 "seed": args.seed}
        elif args.bound is not None:
            instance = csp_mod.encode(problem, args.bound)
            stats = csp_mod.SolveStats()
            assignment = csp_mod.solve_backtracking(instance, not args.no_forward_checking, stats)
            if assignment is not None:
                plan = csp_mod.decode_plan(instance, assignment, problem)
                result = SearchResult(Outcome.PLAN, plan)
            else:
                result = SearchResult(Outcome.UNSOLVABLE, None)
            result.stats.nodes_expanded = stats.assignments
        else:
            result = csp_mod.plan_bounded(problem, args.max_bound,
                                          not args.no_forward_checking)
    report.outcome = result.outcome.value
    if report.statistics is None:
        report.statistics = _search_statistics(result)
    if result.plan is not None:
        report.plan = [str(a) for a in result.plan]
    _emit(report, args.format, started)
    return _OUTCOME_EXIT[result.outcome]


def _cmd_validate(args: argparse.Namespace, argv: list[str], started: float) -> int:
    report = RunReport(command=argv, outcome="error", domain=args.domain, problem=args.problem)
    try:
        problem = _load_problem(args.domain, args.problem, prune=False,
                                diagnostics=report.diagnostics)
        steps = validation.parse_plan_text(_read(args.plan_file))
    except (OSError, GroundingError, validation.PlanSyntaxError) as exc:
        report.diagnostics.append(str(exc))
        _emit(report, args.format, started)
        return EXIT_USAGE
    if problem is None:
        _emit(report, args.format, started)
        return EXIT_USAGE
    report.plan = ["({})".format(" ".join((name,) + args_)) for name, args_ in steps]
    try:
        verdict = validation.validate_plan(problem, steps, with_trace=args.trace)
    except validation.UnknownAction as exc:
        report.outcome = "invalid"
        report.diagnostics.append(str(exc))
        _emit(report, args.format, started)
        return EXIT_NEGATIVE
    report.outcome = "valid" if verdict.valid else "invalid"
    if not verdict.valid:
        report.diagnostics.append(str(verdict.failure))
    if args.trace and verdict.state_trace is not None:
        report.trace = [str(s) for s in verdict.state_trace]
    _emit(report, args.format, started)
    return EXIT_OK if verdict.valid else EXIT_NEGATIVE


def _cmd_csp_export(args: argparse.Namespace, argv: list[str], started: float) -> int:
    report = RunReport(command=argv, outcome="ok", domain=args.domain, problem=args.problem)
    try:
        problem = _load_problem(args.domain, args.problem, prune=not args.no_static_pruning,
                                diagnostics=report.diagnostics)
    except (OSError, GroundingError) as exc:
        problem = None
        report.diagnostics.append(str(exc))
    if problem is None:
        report.outcome = "error"
        _emit(report, args.format, started)
        return EXIT_USAGE
    listing = csp_mod.export_text(csp_mod.encode(problem, args.bound))
    if args.output:
        Path(args.output).write_text(listing, encoding="utf-8")
        report.counts = {"written": args.output}
        _emit(report, args.format, started)
    else:
        print(listing, end="")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plankit",
        description="Parse, ground, solve, and validate STRIPS-style planning problems.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_parse = sub.add_parser("parse", help="syntax- and type-check files")
    p_parse.add_argument("domain")
    p_parse.add_argument("problem", nargs="?")
    p_parse.add_argument("--strict-strips", action="store_true",
                         help="reject negative preconditions and negative goals")
    common(p_parse)

    p_ground = sub.add_parser("ground", help="ground and report fluent/action counts")
    p_ground.add_argument("domain")
    p_ground.add_argument("problem")
    p_ground.add_argument("--count", action="store_true",
                          help="report counts only (the default behaviour)")
    p_ground.add_argument("--dump", action="store_true", help="list fluents and actions")
    p_ground.add_argument("--no-static-pruning", action="store_true")
    common(p_ground)

    p_plan = sub.add_parser("plan", help="solve a problem")
    p_plan.add_argument("domain")
    p_plan.add_argument("problem")
    p_plan.add_argument("--engine", choices=("forward", "backward", "csp", "htn"),
                        required=True)
    p_plan.add_argument("--strategy", choices=("dfs", "bfs"), default="dfs")
    p_plan.add_argument("--bound", type=int, default=None,
                        help="exact horizon for the csp engine")
    p_plan.add_argument("--max-bound", type=int, default=20,
                        help="iterative-deepening cap for the csp engine")
    p_plan.add_argument("--node-budget", type=int, default=None)
    p_plan.add_argument("--depth-budget", type=int, default=None,
                        help="decomposition depth bound for the htn engine")
    p_plan.add_argument("--seed", type=int, default=0, help="seed for min-conflicts")
    p_plan.add_argument("--max-steps", type=int, default=10_000,
                        help="step budget for min-conflicts")
    p_plan.add_argument("--csp-method", choices=("backtracking", "min-conflicts"),
                        default="backtracking")
    p_plan.add_argument("--no-forward-checking", action="store_true")
    p_plan.add_argument("--trace", action="store_true",
                        help="emit the decomposition trace (htn engine)")
    p_plan.add_argument("--no-static-pruning", action="store_true")
    p_plan.add_argument("--no-cycle-check", action="store_true")
    common(p_plan)

    p_validate = sub.add_parser("validate", help="replay a plan file")
    p_validate.add_argument("domain")
    p_validate.add_argument("problem")
    p_validate.add_argument("plan_file")
    p_validate.add_argument("--trace", action="store_true", help="include the state trace")
    common(p_validate)

    p_csp = sub.add_parser("csp", help="bounded-encoding utilities")
    csp_sub = p_csp.add_subparsers(dest="csp_subcommand", required=True)
    p_export = csp_sub.add_parser("export", help="write the encoding as a text listing")
    p_export.add_argument("domain")
    p_export.add_argument("problem")
    p_export.add_argument("--bound", type=int, required=True)
    p_export.add_argument("--output", default=None)
    p_export.add_argument("--no-static-pruning", action="store_true")
    common(p_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    started = time.perf_counter()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.subcommand == "parse":
        return _cmd_parse(args, argv, started)
    if args.subcommand == "ground":
        return _cmd_ground(args, argv, started)
    if args.subcommand == "plan":
        return _cmd_plan(args, argv, started)
    if args.subcommand == "validate":
        return _cmd_validate(args, argv, started)
    if args.subcommand == "csp":
        return _cmd_csp_export(args, argv, started)
    parser.error(f"unknown subcommand {args.subcommand!r}")
    return EXIT_USAGE


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
