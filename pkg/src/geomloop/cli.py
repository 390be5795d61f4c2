"""Command-line interface.

    geomloop render <form.json> [-o out.svg]
    geomloop fix <form.json> [--pin A,B] [-o repaired.json]
    geomloop exec <form.json> <action-json>
    geomloop solve <problem.json> --reasoner rules [--max-steps N] [--trace DIR]
    geomloop bench <problems.jsonl> --reasoner scripted:<file> [--workers N]
    geomloop stats <problems.jsonl>

Reasoner specs: "rules", "scripted:<steps.json>", "http:<url>", "pipe:<cmd>".
Exit codes: 0 success, 1 usage error, 2 data/engine error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .actions import execute, parse_action
from .constraints import solve
from .errors import GeomLoopError
from .harness import (
    DEFAULT_MAX_STEPS,
    load_problem,
    load_problems,
    r_format,
    r_result,
    run_episode,
    score_benchmark,
    serialize_trajectory,
    stats,
)
from .harness import answer_wire
from .logic_form import parse_logic_form, serialize_logic_form
from .reasoning import HttpReasoner, PipeReasoner, RuleProver, ScriptedReasoner
from .render import render_svg


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; usage errors are 1
        raise UsageError(message)


def _read_form(path: str):
    return parse_logic_form(Path(path).read_text(encoding="utf-8"))


def _write_or_print(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        print(text)


def make_reasoner(spec: str):
    if spec == "rules":
        return RuleProver()
    kind, _, arg = spec.partition(":")
    if not arg:
        raise UsageError(f"reasoner spec {spec!r} needs an argument")
    if kind == "scripted":
        return ScriptedReasoner.from_file(arg)
    if kind == "http":
        return HttpReasoner(arg if "://" in arg else f"http:{arg}")
    if kind == "pipe":
        return PipeReasoner(arg)
    raise UsageError(f"unknown reasoner spec {spec!r}")


def _cmd_render(args) -> int:
    svg = render_svg(_read_form(args.form))
    _write_or_print(svg, args.output)
    return 0


def _cmd_fix(args) -> int:
    lf = _read_form(args.form)
    pins = frozenset(p for p in (args.pin or "").split(",") if p)
    repaired, report = solve(lf, pins)
    print(report)
    _write_or_print(serialize_logic_form(repaired), args.output)
    return 0


def _cmd_exec(args) -> int:
    lf = _read_form(args.form)
    result = execute(lf, parse_action(args.action))
    if result.terminal:
        print(f"terminal answer: {answer_wire(result.answer)}")
    _write_or_print(serialize_logic_form(result.next_form), args.output)
    return 0


def _cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    reasoner = make_reasoner(args.reasoner)
    trace_dir = Path(args.trace) if args.trace else None
    if trace_dir is not None:
        trace_dir.mkdir(parents=True, exist_ok=True)

    def on_frame(index, form, svg):
        if trace_dir is not None:
            (trace_dir / f"step_{index:03d}.svg").write_text(svg, encoding="utf-8")

    try:
        trajectory = run_episode(
            problem, reasoner, max_steps=args.max_steps, on_frame=on_frame
        )
    finally:
        if hasattr(reasoner, "close"):
            reasoner.close()
    if trace_dir is not None:
        (trace_dir / "trajectory.json").write_text(
            serialize_trajectory(trajectory), encoding="utf-8"
        )
    fmt = r_format(trajectory)
    res = r_result(trajectory.terminal_answer, problem)
    print(f"problem: {problem.id}")
    print(f"steps: {len(trajectory.steps)}  truncated: {trajectory.truncated}")
    if trajectory.error:
        print(f"error: {trajectory.error}")
    print(f"answer: {answer_wire(trajectory.terminal_answer)}")
    print(f"r_format: {fmt}  r_result: {res}")
    return 0


def _cmd_bench(args) -> int:
    problems = load_problems(args.problems)
    reasoner = make_reasoner(args.reasoner)
    try:
        report = score_benchmark(
            problems, reasoner, max_steps=args.max_steps, workers=args.workers
        )
    finally:
        if hasattr(reasoner, "close"):
            reasoner.close()
    print(report.format_table())
    return 0


def _cmd_stats(args) -> int:
    counts = stats(args.problems)
    for name in ("Numerical", "Ratio", "Descriptor"):
        print(f"{name:<12}{counts[name]:>6}")
    print(f"{'Total':<12}{sum(counts.values()):>6}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="geomloop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a logic form to SVG")
    p.add_argument("form")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("fix", help="repair coordinates with the constraint solver")
    p.add_argument("form")
    p.add_argument("--pin", help="comma-separated labels held fixed")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_fix)

    p = sub.add_parser("exec", help="apply one action to a form")
    p.add_argument("form")
    p.add_argument("action", help="action command JSON")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_exec)

    p = sub.add_parser("solve", help="run one episode on a problem")
    p.add_argument("problem")
    p.add_argument("--reasoner", required=True)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--trace", help="directory for per-step SVGs + trajectory JSON")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="score a benchmark file")
    p.add_argument("problems")
    p.add_argument("--reasoner", required=True)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stats", help="problem counts by answer type")
    p.add_argument("problems")
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (GeomLoopError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
