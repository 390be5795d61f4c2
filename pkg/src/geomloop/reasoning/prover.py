"""Forward-chaining rule prover: a deterministic symbolic reasoner.

Each step it derives the fact closure of the current form, answers when the
goal is implied, and otherwise proposes the auxiliary construction whose
simulated execution yields the most new facts. It holds no hidden state:
everything is recomputed from the input, so equal inputs give equal outputs.

Goals live in the form's annotations under the key "goal":

    angle A V B              ->  numerical answer in degrees
    ratio A B : C D          ->  ratio of segment lengths
    relation A B : C D       ->  "parallel" / "perpendicular"
    classify A B C           ->  triangle classification descriptor
    congruent A B C : D E F  ->  "congruent" when derivable
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..actions import (
    Action,
    DrawLine,
    EPSILON_SNAP,
    LabelPoint,
    Answer,
    Reflect,
    Rotate,
    execute,
    make_object_ref,
    serialize_action,
)
from ..answers import AnswerValue, Descriptor, Numerical, Ratio
from ..errors import GeomLoopError, ReasonerExhausted
from ..geom import Vec2, distance, segment_contains
from ..logic_form import CircleDecl, LogicForm, PolygonDecl, is_label
from .base import ReasonerInput, StepOutput
from .facts import (
    EPSILON_FACT,
    Fact,
    FactSet,
    _FormGeometry,
    angle_key,
    derive_facts,
    seed_facts,
    seg_key,
    segment_ratio,
)

TRANSFORM_DEGREES = (60.0, 90.0, 180.0)
MAX_CANDIDATES = 400


@dataclass(frozen=True)
class Goal:
    kind: str  # angle | ratio | relation | classify | congruent
    args: tuple[str, ...]


def parse_goal(text: str | None) -> Goal:
    if not text:
        raise ReasonerExhausted("form carries no goal annotation")
    tokens = [t for t in text.replace(":", " : ").split() if t]
    head, rest = tokens[0], tokens[1:]
    labels = tuple(t for t in rest if t != ":")
    if not all(is_label(t) for t in labels):
        raise ReasonerExhausted(f"goal has malformed labels: {text!r}")
    shapes = {"angle": 3, "ratio": 4, "relation": 4, "classify": 3, "congruent": 6}
    if head not in shapes or len(labels) != shapes[head]:
        raise ReasonerExhausted(f"unsupported goal: {text!r}")
    return Goal(head, labels)


@dataclass(frozen=True)
class GoalAnswer:
    value: AnswerValue
    support: tuple[Fact, ...]  # facts establishing the answer


def try_answer(goal: Goal, lf: LogicForm, facts: FactSet) -> GoalAnswer | None:
    if goal.kind == "angle":
        fact = facts.get("angle_value", angle_key(*goal.args))
        if fact is not None:
            return GoalAnswer(Numerical(fact.value, "degrees"), (fact,))
        return None
    if goal.kind == "ratio":
        s1 = (goal.args[0], goal.args[1])
        s2 = (goal.args[2], goal.args[3])
        ratio = segment_ratio(facts, s1, s2)
        if ratio is None:
            return None
        support = tuple(facts.by_kind("equal_segments")) + tuple(
            facts.by_kind("midpoint")
        )
        return GoalAnswer(Ratio(ratio.numerator, ratio.denominator), support)
    if goal.kind == "relation":
        key = seg_key(goal.args[0], goal.args[1]) + seg_key(goal.args[2], goal.args[3])
        alt = seg_key(goal.args[2], goal.args[3]) + seg_key(goal.args[0], goal.args[1])
        for kind in ("parallel", "perpendicular"):
            fact = facts.get(kind, key) or facts.get(kind, alt)
            if fact is not None:
                return GoalAnswer(Descriptor(kind), (fact,))
        return None
    if goal.kind == "classify":
        return _classify_triangle(goal.args, lf, facts)
    # congruent: accept any derived correspondence between the two vertex sets
    want = (frozenset(goal.args[:3]), frozenset(goal.args[3:]))
    for fact in facts.by_kind("congruent_triangles"):
        have = (frozenset(fact.args[:3]), frozenset(fact.args[3:]))
        if have == want or have == (want[1], want[0]):
            return GoalAnswer(Descriptor("congruent"), (fact,))
    return None


def _classify_triangle(
    tri: tuple[str, ...], lf: LogicForm, facts: FactSet
) -> GoalAnswer | None:
    a, b, c = tri
    geo = _FormGeometry(lf)
    if tuple(sorted(tri)) not in geo.triangles():
        return None  # classify only a triangle that is actually drawn
    sides = [seg_key(a, b), seg_key(b, c), seg_key(a, c)]
    support: list[Fact] = []
    equal_pairs = 0
    for s1, s2 in combinations(sides, 2):
        fact = facts.get("equal_segments", s1 + s2) or facts.get(
            "equal_segments", s2 + s1
        )
        if fact is not None:
            equal_pairs += 1
            support.append(fact)
    right = None
    for v, p, q in ((a, b, c), (b, a, c), (c, a, b)):
        fact = facts.get("angle_value", angle_key(p, v, q))
        if fact is not None and abs(fact.value - 90.0) <= 1e-6:
            right = fact
            break
    if right is not None:
        support.append(right)
    if equal_pairs >= 3:
        text = "equilateral triangle"
    elif equal_pairs >= 1 and right is not None:
        text = "isosceles right triangle"
    elif equal_pairs >= 1:
        text = "isosceles triangle"
    elif right is not None:
        text = "right triangle"
    else:
        return None
    return GoalAnswer(Descriptor(text), tuple(support))


# --- construction proposals -----------------------------------------------------


@dataclass(frozen=True)
class Plan:
    actions: tuple[Action, ...]  # length 1 or 2
    gained: int
    reaches_goal: bool

    def sort_key(self) -> tuple:
        # Goal-reaching plans first, then by new-fact count, ties lexicographic.
        return (
            0 if self.reaches_goal else 1,
            -self.gained,
            tuple(serialize_action(a) for a in self.actions),
        )


class _OnFigure:
    """Membership test: does a point lie on the pre-construction figure?

    New facts are only worth counting when they speak about the original
    figure; a transformed copy floating off to the side reveals nothing until
    it lands back on it. Points count when they existed before, sit on a
    pre-existing carrier or circle, or coincide with a pre-existing point.
    """

    def __init__(self, lf: LogicForm):
        self.names = set(lf.point_map)
        self.points = [p.vec for p in lf.points]
        self.segments = []
        self.circles = []
        for obj in lf.objects:
            if isinstance(obj, CircleDecl):
                self.circles.append((lf.vec(obj.center), obj.radius))
            else:
                pts = [lf.vec(name) for name in obj.labels]
                if isinstance(obj, PolygonDecl):
                    self.segments.extend(
                        (pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))
                    )
                else:
                    self.segments.append((pts[0], pts[1]))

    def __call__(self, label: str, form: LogicForm) -> bool:
        if label in self.names:
            return True
        v = form.vec(label)
        if any(distance(v, p) <= EPSILON_FACT for p in self.points):
            return True
        if any(segment_contains(seg, v, EPSILON_FACT) for seg in self.segments):
            return True
        return any(
            abs(distance(v, c) - r) <= EPSILON_FACT for c, r in self.circles
        )


def _simulate(
    lf: LogicForm,
    actions: tuple[Action, ...],
    baseline: set,
    goal: Goal,
    on_figure: _OnFigure,
) -> tuple[int, bool] | None:
    form = lf
    try:
        for action in actions:
            form = execute(form, action).next_form
    except GeomLoopError:
        return None
    closure = derive_facts(form, seed_facts(form, measured_midpoints=True))
    grounded: dict[str, bool] = {}

    def counts(fact) -> bool:
        for label in fact.args:
            hit = grounded.get(label)
            if hit is None:
                hit = on_figure(label, form)
                grounded[label] = hit
            if not hit:
                return False
        return True

    gained = sum(
        1 for fact in closure if fact.key() not in baseline and counts(fact)
    )
    reaches = try_answer(goal, form, closure) is not None
    return gained, reaches


def _fresh_midpoint_name(lf: LogicForm, used: set[str]) -> str:
    i = 1
    while f"M{i}" in lf.point_map or f"M{i}" in used:
        i += 1
    return f"M{i}"


def _unprimed(label: str) -> bool:
    return not label.endswith("'")


def _enumerate_plans(lf: LogicForm, facts: FactSet) -> list[tuple[Action, ...]]:
    geo = _FormGeometry(lf)
    names = [p.name for p in lf.points]
    plans: list[tuple[Action, ...]] = []

    # (a) connect unconnected labeled point pairs
    for p, q in combinations(sorted(names), 2):
        if geo.connected(p, q):
            continue
        if (lf.vec(p) - lf.vec(q)).norm() <= EPSILON_SNAP:
            continue
        plans.append((DrawLine(p, q),))

    # Transform copies are rarely worth transforming again; midpoint and
    # transform families stay on the original (unprimed) geometry.
    if len(names) > 18:
        return plans[:MAX_CANDIDATES]
    base_triangles = [t for t in geo.triangles() if all(map(_unprimed, t))]

    # (b) midpoint of a triangle side, then the median to the opposite vertex
    used_names: set[str] = set()
    for tri in base_triangles:
        for i, j, k in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
            p, q, v = tri[i], tri[j], tri[k]
            mid = (lf.vec(p) + lf.vec(q)) * 0.5
            if any((lf.vec(n) - mid).norm() <= EPSILON_SNAP for n in names):
                continue
            name = _fresh_midpoint_name(lf, used_names)
            used_names.add(name)
            plans.append((LabelPoint(name, Vec2(mid.x, mid.y)), DrawLine(name, v)))

    # (c) reflect/rotate each drawn triangle over each axis/vertex
    axes = [s for s in geo.segments if all(map(_unprimed, s))]
    centers = [n for n in sorted(names) if _unprimed(n)]
    for tri in base_triangles:
        ref = make_object_ref("polygon", tri)
        for axis in axes:
            plans.append((Reflect(ref, axis),))
        for center in centers:
            for degrees in TRANSFORM_DEGREES:
                plans.append((Rotate(ref, center, degrees),))

    return plans[:MAX_CANDIDATES]


def propose_construction(
    lf: LogicForm, goal: Goal, facts: FactSet
) -> list[Action]:
    """Candidate constructions ranked (goal reached, new-fact count, lexical)."""
    if try_answer(goal, lf, facts) is not None:
        return []
    baseline = facts.keys()
    on_figure = _OnFigure(lf)
    ranked: list[Plan] = []
    for actions in _enumerate_plans(lf, facts):
        outcome = _simulate(lf, actions, baseline, goal, on_figure)
        if outcome is None:
            continue
        gained, reaches = outcome
        ranked.append(Plan(actions=actions, gained=gained, reaches_goal=reaches))
    ranked.sort(key=Plan.sort_key)
    out: list[Action] = []
    seen: set[str] = set()
    for plan in ranked:
        first = serialize_action(plan.actions[0])
        if first not in seen:
            seen.add(first)
            out.append(plan.actions[0])
    return out


# --- the reasoner --------------------------------------------------------------------


def _provenance_rules(fact: Fact) -> list[str]:
    out: list[str] = []
    stack = [fact]
    seen: set[tuple] = set()
    while stack:
        current = stack.pop()
        if current.key() in seen:
            continue
        seen.add(current.key())
        if current.rule not in out:
            out.append(current.rule)
        stack.extend(current.premises)
    return out


def _describe_action(action: Action) -> str:
    if isinstance(action, DrawLine):
        return f"Draw the auxiliary segment {action.a}-{action.b}."
    if isinstance(action, LabelPoint):
        return (
            f"Mark point {action.name} at "
            f"({action.coordinates.x:g}, {action.coordinates.y:g})."
        )
    if isinstance(action, Rotate):
        return (
            f"Rotate {action.obj} by {action.degrees:g} degrees about "
            f"{action.center} to overlay a congruent copy."
        )
    if isinstance(action, Reflect):
        return f"Reflect {action.obj} across {action.axis[0]}-{action.axis[1]}."
    return f"Apply {serialize_action(action)}."


class RuleProver:
    """Deterministic reasoner built on the fixed rule set."""

    def __init__(self):
        self.name = "rules"

    def next_step(self, inp: ReasonerInput) -> StepOutput:
        lf = inp.current_form
        goal = parse_goal(lf.annotation_map.get("goal"))
        facts = derive_facts(lf, seed_facts(lf, measured_midpoints=True))
        answer = try_answer(goal, lf, facts)
        if answer is not None:
            rules = [
                r
                for fact in answer.support
                for r in _provenance_rules(fact)
                if not r.startswith("given:")
            ]
            shown = ", ".join(dict.fromkeys(rules)) or "the stated relations"
            reasoning = (
                "The goal follows from the derived facts ("
                + "; ".join(f.describe() for f in answer.support[:3])
                + f") established via {shown}."
            )
            return StepOutput(reasoning=reasoning, action=Answer(answer.value))

        done = {serialize_action(step.action) for step in inp.history}
        for action in propose_construction(lf, goal, facts):
            if serialize_action(action) in done:
                continue
            reasoning = (
                _describe_action(action)
                + " This construction exposes new relationships toward the goal."
            )
            return StepOutput(reasoning=reasoning, action=action)
        raise ReasonerExhausted("no applicable construction remains")
