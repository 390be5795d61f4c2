"""Episode orchestration, rewards, and benchmark loading/scoring.

Problems live in line-delimited JSON, one object per line:

    {"id": "p1",
     "text": "In triangle ABC ...",
     "logic_form": { ... },                  # or "logic_form_path": "p1_form.json"
     "answer_type": "numerical",             # numerical | ratio | descriptor
     "gold_answer": "30",
     "answer_unit": "degrees",               # optional, numerical only
     "answer_aliases": ["right angle"],      # optional, descriptor only
     "gold_proof": [{"reasoning": "...", "action": {...}}, ...],  # optional
     "diagram_image": "p1.png",              # optional, carried but unused
     "solution_image": "p1_solution.png"}    # optional

An episode loops reasoner step -> executor -> re-render until the reasoner
answers, fails, or hits the step limit. Rewards are binary and awarded per
trajectory: format (every step parsed under the strict schema and executed)
and result (final answer matches gold); otherwise each reward is 0.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .actions import execute
from .answers import (
    ANSWER_TYPES,
    AnswerValue,
    Descriptor,
    Numerical,
    Ratio,
    answer_to_wire,
    answers_match,
    parse_gold_answer,
)
from .errors import (
    ActionSchemaError,
    DuplicateProblemIdError,
    GeomLoopError,
    ProblemFormatError,
    ProtocolError,
    ReasonerExhausted,
    ReasonerTimeout,
)
from .logic_form import LogicForm, parse_logic_form, serialize_logic_form
from .reasoning.base import (
    Reasoner,
    ReasonerInput,
    StepOutput,
    parse_step_output,
    serialize_step_output,
    step_output_to_dict,
)
from .render import DEFAULT_STYLE, RenderStyle, render_svg

DEFAULT_MAX_STEPS = 12

# Hook called with (frame_index, form, svg) after each re-rendering.
FrameHook = Callable[[int, LogicForm, str], None]


@dataclass(frozen=True)
class Problem:
    id: str
    text: str
    initial_form: LogicForm
    answer_type: str  # numerical | ratio | descriptor
    gold_answer: AnswerValue
    answer_aliases: tuple[str, ...] = ()
    gold_proof: tuple[StepOutput, ...] | None = None


@dataclass(frozen=True)
class Trajectory:
    problem_id: str
    frames: tuple[LogicForm, ...]  # length = len(steps) + 1
    steps: tuple[StepOutput, ...]
    terminal_answer: AnswerValue | None
    truncated: bool  # hit the step limit without answering
    format_violations: tuple[str, ...] = ()
    error: str | None = None


# --- problem files --------------------------------------------------------------


_PROBLEM_KEYS = {
    "id",
    "text",
    "logic_form",
    "logic_form_path",
    "answer_type",
    "gold_answer",
    "answer_unit",
    "answer_aliases",
    "gold_proof",
    "diagram_image",
    "solution_image",
}


def parse_problem(record: dict, base_dir: Path | None = None) -> Problem:
    if not isinstance(record, dict):
        raise ProblemFormatError("problem record must be a JSON object")
    unknown = set(record) - _PROBLEM_KEYS
    if unknown:
        raise ProblemFormatError(f"unknown problem keys {sorted(unknown)}")
    for key in ("id", "text", "answer_type", "gold_answer"):
        if key not in record:
            raise ProblemFormatError(f"problem record lacks {key!r}")
    problem_id = record["id"]
    if not isinstance(problem_id, str) or not problem_id:
        raise ProblemFormatError("problem id must be a nonempty string")
    answer_type = record["answer_type"]
    if answer_type not in ANSWER_TYPES:
        raise ProblemFormatError(f"unknown answer type {answer_type!r}")

    if ("logic_form" in record) == ("logic_form_path" in record):
        raise ProblemFormatError(
            f"problem {problem_id!r} needs exactly one of logic_form / logic_form_path"
        )
    if "logic_form" in record:
        form_text = json.dumps(record["logic_form"])
    else:
        path = Path(record["logic_form_path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        form_text = path.read_text(encoding="utf-8")
    initial_form = parse_logic_form(form_text)

    gold_raw = record["gold_answer"]
    if isinstance(gold_raw, (int, float)) and not isinstance(gold_raw, bool):
        gold_raw = repr(gold_raw)
    if not isinstance(gold_raw, str):
        raise ProblemFormatError("gold_answer must be text or a number")
    gold = parse_gold_answer(gold_raw, answer_type, record.get("answer_unit"))

    aliases = record.get("answer_aliases", [])
    if not (isinstance(aliases, list) and all(isinstance(a, str) for a in aliases)):
        raise ProblemFormatError("answer_aliases must be a list of strings")

    proof = None
    if "gold_proof" in record:
        raw_proof = record["gold_proof"]
        if not isinstance(raw_proof, list):
            raise ProblemFormatError("gold_proof must be a list of steps")
        try:
            proof = tuple(parse_step_output(step) for step in raw_proof)
        except ActionSchemaError as exc:
            raise ProblemFormatError(f"bad gold_proof step: {exc}") from exc

    return Problem(
        id=problem_id,
        text=record["text"],
        initial_form=initial_form,
        answer_type=answer_type,
        gold_answer=gold,
        answer_aliases=tuple(aliases),
        gold_proof=proof,
    )


def load_problems(path: str | Path) -> list[Problem]:
    """Read a JSONL benchmark file; ids must be unique."""
    path = Path(path)
    problems: list[Problem] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProblemFormatError(f"{path}:{lineno}: {exc}") from exc
            problem = parse_problem(record, base_dir=path.parent)
            if problem.id in seen:
                raise DuplicateProblemIdError(problem.id)
            seen.add(problem.id)
            problems.append(problem)
    return problems


def load_problem(path: str | Path) -> Problem:
    """Read a single-problem JSON document."""
    path = Path(path)
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc
    return parse_problem(record, base_dir=path.parent)


def stats(path: str | Path) -> dict[str, int]:
    """Exact problem counts by answer type."""
    counts = {"Numerical": 0, "Ratio": 0, "Descriptor": 0}
    for problem in load_problems(path):
        counts[problem.answer_type.capitalize()] += 1
    return counts


# --- the episode loop -------------------------------------------------------------


def run_episode(
    problem: Problem,
    reasoner: Reasoner,
    max_steps: int = DEFAULT_MAX_STEPS,
    style: RenderStyle = DEFAULT_STYLE,
    on_frame: FrameHook | None = None,
) -> Trajectory:
    """Run the closed perception-reasoning-action loop on one problem.

    Failures never escape: schema violations, execution errors, timeouts, and
    reasoner exhaustion are recorded on the trajectory.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    frames: list[LogicForm] = [problem.initial_form]
    steps: list[StepOutput] = []
    violations: list[str] = []
    answer: AnswerValue | None = None
    truncated = False
    error: str | None = None

    svg = render_svg(frames[0], style)
    if on_frame is not None:
        on_frame(0, frames[0], svg)

    for k in range(max_steps):
        inp = ReasonerInput(
            problem_text=problem.text,
            current_form=frames[-1],
            history=tuple(steps),
            step_index=k,
        )
        try:
            step = reasoner.next_step(inp)
        except ReasonerExhausted as exc:
            error = f"step {k}: reasoner exhausted: {exc}"
            break
        except (ProtocolError, ReasonerTimeout) as exc:
            violations.append(f"step {k}: {exc}")
            error = f"step {k}: {exc}"
            break
        # Schema conformance: the emitted step must survive a strict reparse.
        try:
            parse_step_output(json.loads(serialize_step_output(step)))
        except (ActionSchemaError, ValueError) as exc:
            violations.append(f"step {k}: schema violation: {exc}")
            error = f"step {k}: schema violation: {exc}"
            break
        try:
            result = execute(frames[-1], step.action)
        except GeomLoopError as exc:
            violations.append(f"step {k}: inexecutable action: {exc}")
            error = f"step {k}: inexecutable action: {exc}"
            break
        steps.append(step)
        frames.append(result.next_form)
        # Close the loop: the updated diagram is re-rendered every step.
        svg = render_svg(result.next_form, style)
        if on_frame is not None:
            on_frame(len(frames) - 1, result.next_form, svg)
        if result.terminal:
            answer = result.answer
            break
    else:
        truncated = True

    return Trajectory(
        problem_id=problem.id,
        frames=tuple(frames),
        steps=tuple(steps),
        terminal_answer=answer,
        truncated=truncated,
        format_violations=tuple(violations),
        error=error,
    )


# --- rewards ------------------------------------------------------------------------


def r_format(trajectory: Trajectory) -> int:
    """1 iff every step output adheres to the strict schema and executed."""
    if trajectory.format_violations:
        return 0
    for step in trajectory.steps:
        try:
            parse_step_output(json.loads(serialize_step_output(step)))
        except (ActionSchemaError, ValueError):
            return 0
    return 1


def r_result(answer: AnswerValue | None, problem: Problem) -> int:
    """1 iff the final answer matches gold under type-specific equality."""
    return 1 if answers_match(answer, problem.gold_answer, problem.answer_aliases) else 0


# --- benchmark scoring -----------------------------------------------------------------


@dataclass
class TypeScore:
    solved: int = 0
    total: int = 0

    @property
    def accuracy(self) -> float:
        return 100.0 * self.solved / self.total if self.total else 0.0


@dataclass
class BenchmarkReport:
    per_type: dict[str, TypeScore] = field(default_factory=dict)
    per_problem: dict[str, tuple[int, int]] = field(default_factory=dict)  # id -> (fmt, res)

    @property
    def total(self) -> TypeScore:
        out = TypeScore()
        for score in self.per_type.values():
            out.solved += score.solved
            out.total += score.total
        return out

    def format_table(self) -> str:
        columns = ["Total", "Numerical", "Ratio", "Descriptor"]
        scores = {name: self.per_type.get(name, TypeScore()) for name in columns[1:]}
        scores["Total"] = self.total
        header = f"{'type':<12}{'n':>6}{'solved':>8}{'accuracy':>10}"
        rows = [header, "-" * len(header)]
        for name in columns:
            s = scores[name]
            rows.append(f"{name:<12}{s.total:>6}{s.solved:>8}{s.accuracy:>9.2f}%")
        return "\n".join(rows)


def score_benchmark(
    problems: Iterable[Problem],
    reasoner_factory: Callable[[], Reasoner] | Reasoner,
    max_steps: int = DEFAULT_MAX_STEPS,
    workers: int = 1,
) -> BenchmarkReport:
    """Accuracy by answer type; episodes are independent and may run in parallel.

    Pass a factory when the reasoner is stateful (e.g. holds a subprocess);
    a plain reasoner instance is shared across episodes.
    """
    problems = list(problems)
    if not problems:
        raise ValueError("benchmark needs at least one problem")

    def make_reasoner() -> Reasoner:
        if callable(reasoner_factory) and not hasattr(reasoner_factory, "next_step"):
            return reasoner_factory()  # type: ignore[operator]
        return reasoner_factory  # type: ignore[return-value]

    def run_one(problem: Problem) -> tuple[str, str, int, int]:
        trajectory = run_episode(problem, make_reasoner(), max_steps=max_steps)
        return (
            problem.id,
            problem.answer_type.capitalize(),
            r_format(trajectory),
            r_result(trajectory.terminal_answer, problem),
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, problems))
    else:
        results = [run_one(p) for p in problems]

    report = BenchmarkReport()
    for name in ("Numerical", "Ratio", "Descriptor"):
        report.per_type[name] = TypeScore()
    for problem_id, type_name, fmt, res in results:
        score = report.per_type[type_name]
        score.total += 1
        score.solved += res
        report.per_problem[problem_id] = (fmt, res)
    return report


# --- trajectory serialization ------------------------------------------------------------


def answer_wire(answer: AnswerValue | None) -> dict | None:
    if answer is None:
        return None
    out = answer_to_wire(answer)
    if isinstance(answer, Numerical):
        out["type"] = "numerical"
    elif isinstance(answer, Ratio):
        out["type"] = "ratio"
    else:
        out["type"] = "descriptor"
    return out


def serialize_trajectory(trajectory: Trajectory) -> str:
    """Canonical JSON for a recorded episode (forms in canonical shape)."""
    payload = {
        "problem_id": trajectory.problem_id,
        "steps": [step_output_to_dict(s) for s in trajectory.steps],
        "frames": [json.loads(serialize_logic_form(f)) for f in trajectory.frames],
        "terminal_answer": answer_wire(trajectory.terminal_answer),
        "truncated": trajectory.truncated,
        "format_violations": list(trajectory.format_violations),
        "error": trajectory.error,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
