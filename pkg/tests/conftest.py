"""Shared fixtures: canonical seed forms, prover desk problems, gold replays."""

from __future__ import annotations

import json
import math

import pytest

from geomloop.answers import parse_gold_answer
from geomloop.harness import Problem
from geomloop.logic_form import (
    LineDecl,
    LogicForm,
    PointDecl,
    RelationDecl,
    make_form,
)
from geomloop.reasoning import StepOutput, parse_step_output


def square_form(side: float = 4.0, with_relations: bool = True) -> LogicForm:
    """Unit-square-style seed figure: ABCD counter-clockwise from the origin."""
    pts = [
        PointDecl("A", 0.0, 0.0),
        PointDecl("B", side, 0.0),
        PointDecl("C", side, side),
        PointDecl("D", 0.0, side),
    ]
    objs = [
        LineDecl(("A", "B")),
        LineDecl(("B", "C")),
        LineDecl(("C", "D")),
        LineDecl(("D", "A")),
    ]
    rels = []
    if with_relations:
        rels = [
            RelationDecl("fixed_length", (("A", "B"),), side),
            RelationDecl("fixed_length", (("B", "C"),), side),
            RelationDecl("fixed_length", (("C", "D"),), side),
            RelationDecl("fixed_length", (("D", "A"),), side),
            RelationDecl("perpendicular", (("A", "B"), ("B", "C"))),
            RelationDecl("perpendicular", (("B", "C"), ("C", "D"))),
        ]
    return make_form(pts, objs, rels)


def isosceles_form(extra_midpoint: bool = False) -> LogicForm:
    """Isosceles triangle, apex A over base BC, all sides drawn."""
    h = math.sqrt(6.0**2 - 2.5**2)
    pts = [
        PointDecl("A", 2.5, h),
        PointDecl("B", 0.0, 0.0),
        PointDecl("C", 5.0, 0.0),
    ]
    rels = [RelationDecl("equal_length", (("A", "B"), ("A", "C")))]
    if extra_midpoint:
        pts.append(PointDecl("M", 2.5, 0.0))
        rels.append(RelationDecl("midpoint", ("M", ("B", "C"))))
    objs = [LineDecl(("A", "B")), LineDecl(("B", "C")), LineDecl(("C", "A"))]
    return make_form(pts, objs, rels)


def _problem(name, form, goal, answer_type, gold, unit=None, aliases=()):
    annotated = make_form(
        form.points, form.objects, form.relations, {"goal": goal}
    )
    return Problem(
        id=name,
        text=f"Desk problem {name}",
        initial_form=annotated,
        answer_type=answer_type,
        gold_answer=parse_gold_answer(gold, answer_type, unit),
        answer_aliases=tuple(aliases),
    )


def desk_problems() -> list[Problem]:
    """Eight problems, each needing exactly one auxiliary construction."""
    out = []
    h = math.sqrt(6.0**2 - 2.5**2)

    # angle sum; side CA missing
    out.append(
        _problem(
            "desk1",
            make_form(
                [PointDecl("A", 0, 0), PointDecl("B", 6, 0), PointDecl("C", 2.0, 3.2)],
                [LineDecl(("A", "B")), LineDecl(("B", "C"))],
                [
                    RelationDecl("fixed_angle", ("C", "A", "B"), 70.0),
                    RelationDecl("fixed_angle", ("A", "B", "C"), 80.0),
                ],
            ),
            "angle A C B",
            "numerical",
            "30",
            "degrees",
        )
    )
    # isosceles angle chase; side CA missing
    out.append(
        _problem(
            "desk2",
            make_form(
                [PointDecl("A", 2.5, h), PointDecl("B", 0, 0), PointDecl("C", 5, 0)],
                [LineDecl(("A", "B")), LineDecl(("B", "C"))],
                [
                    RelationDecl("equal_length", (("A", "B"), ("A", "C"))),
                    RelationDecl("fixed_angle", ("A", "B", "C"), 65.0),
                ],
            ),
            "angle B A C",
            "numerical",
            "50",
            "degrees",
        )
    )
    # isosceles median congruence; median AM missing
    out.append(
        _problem(
            "desk3",
            isosceles_form(extra_midpoint=True),
            "congruent A B M : A C M",
            "descriptor",
            "congruent",
        )
    )
    # rotation congruence: DEF is the half-turn image of ABC about O
    a, b, c = (0.0, 0.0), (3.0, 0.0), (1.0, 2.0)
    o = (2.5, 1.5)
    d = (2 * o[0] - a[0], 2 * o[1] - a[1])
    e = (2 * o[0] - b[0], 2 * o[1] - b[1])
    f = (2 * o[0] - c[0], 2 * o[1] - c[1])
    out.append(
        _problem(
            "desk4",
            make_form(
                [
                    PointDecl("A", *a),
                    PointDecl("B", *b),
                    PointDecl("C", *c),
                    PointDecl("O", *o),
                    PointDecl("D", *d),
                    PointDecl("E", *e),
                    PointDecl("F", *f),
                ],
                [
                    LineDecl(("A", "B")),
                    LineDecl(("B", "C")),
                    LineDecl(("C", "A")),
                    LineDecl(("D", "E")),
                    LineDecl(("E", "F")),
                    LineDecl(("F", "D")),
                ],
            ),
            "congruent A B C : D E F",
            "descriptor",
            "congruent",
        )
    )
    # vertical angles; second line CD missing, E is the crossing
    out.append(
        _problem(
            "desk5",
            make_form(
                [
                    PointDecl("A", 0, 0),
                    PointDecl("B", 6, 0),
                    PointDecl("E", 3, 0),
                    PointDecl("C", 1, -2),
                    PointDecl("D", 5, 2),
                ],
                [LineDecl(("A", "B"))],
                [
                    RelationDecl("collinear", ("C", "E", "D")),
                    RelationDecl("fixed_angle", ("A", "E", "C"), 35.0),
                ],
            ),
            "angle B E D",
            "numerical",
            "35",
            "degrees",
        )
    )
    # SAS congruence; side DF missing
    v1, v2 = (-4.0, 0.0), (1.0, 3.0)
    included = math.degrees(
        math.acos(
            (v1[0] * v2[0] + v1[1] * v2[1])
            / (math.hypot(*v1) * math.hypot(*v2))
        )
    )
    out.append(
        _problem(
            "desk6",
            make_form(
                [
                    PointDecl("A", 0, 0),
                    PointDecl("B", 4, 0),
                    PointDecl("C", 5, 3),
                    PointDecl("D", 8, 0),
                    PointDecl("E", 12, 0),
                    PointDecl("F", 13, 3),
                ],
                [
                    LineDecl(("A", "B")),
                    LineDecl(("B", "C")),
                    LineDecl(("C", "A")),
                    LineDecl(("D", "E")),
                    LineDecl(("E", "F")),
                ],
                [
                    RelationDecl("equal_length", (("A", "B"), ("D", "E"))),
                    RelationDecl("equal_length", (("B", "C"), ("E", "F"))),
                    RelationDecl("fixed_angle", ("A", "B", "C"), round(included, 6)),
                    RelationDecl("fixed_angle", ("D", "E", "F"), round(included, 6)),
                ],
            ),
            "congruent A B C : D E F",
            "descriptor",
            "congruent",
        )
    )
    # parallel lines, alternate interior angles; transversal BC missing
    out.append(
        _problem(
            "desk7",
            make_form(
                [
                    PointDecl("A", 0, 0),
                    PointDecl("B", 6, 0),
                    PointDecl("C", 2, 4),
                    PointDecl("D", 9, 4),
                ],
                [LineDecl(("A", "B")), LineDecl(("C", "D"))],
                [
                    RelationDecl("parallel", (("A", "B"), ("C", "D"))),
                    RelationDecl("fixed_angle", ("A", "B", "C"), 48.0),
                ],
            ),
            "angle B C D",
            "numerical",
            "48",
            "degrees",
        )
    )
    # classification; diagonal AC missing
    out.append(
        _problem(
            "desk8",
            make_form(
                [
                    PointDecl("A", 0, 0),
                    PointDecl("B", 4, 0),
                    PointDecl("C", 4, 4),
                    PointDecl("D", 0, 4),
                ],
                [
                    LineDecl(("A", "B")),
                    LineDecl(("B", "C")),
                    LineDecl(("C", "D")),
                    LineDecl(("D", "A")),
                ],
                [
                    RelationDecl("equal_length", (("A", "B"), ("B", "C"))),
                    RelationDecl("fixed_angle", ("A", "B", "C"), 90.0),
                ],
            ),
            "classify A B C",
            "descriptor",
            "isosceles right triangle",
        )
    )
    return out


def _step(reasoning: str, action: dict) -> StepOutput:
    return parse_step_output({"reasoning": reasoning, "action": action})


def gold_problems() -> list[Problem]:
    """Ten problems with hand-authored gold trajectories for scripted replay."""
    out: list[Problem] = []
    sq = square_form()

    def add(name, form, answer_type, gold, proof, unit=None, aliases=()):
        out.append(
            Problem(
                id=name,
                text=f"Gold problem {name}",
                initial_form=form,
                answer_type=answer_type,
                gold_answer=parse_gold_answer(gold, answer_type, unit),
                answer_aliases=tuple(aliases),
                gold_proof=tuple(proof),
            )
        )

    add(
        "gold1",
        sq,
        "ratio",
        "1:1",
        [
            _step("Draw diagonal A-C.", {"op": "draw_line", "from": "A", "to": "C"}),
            _step("Draw diagonal B-D.", {"op": "draw_line", "from": "B", "to": "D"}),
            _step(
                "A square's diagonals have equal length, so AC : BD = 1 : 1.",
                {"op": "answer", "value": "1:1"},
            ),
        ],
    )
    add(
        "gold2",
        sq,
        "numerical",
        "45",
        [
            _step("Draw diagonal A-C.", {"op": "draw_line", "from": "A", "to": "C"}),
            _step(
                "The diagonal bisects the right angle at A, giving 45 degrees.",
                {"op": "answer", "value": 45, "unit": "degrees"},
            ),
        ],
        unit="degrees",
    )
    add(
        "gold3",
        sq,
        "descriptor",
        "congruent",
        [
            _step(
                "Rotate triangle ABC a quarter turn about B.",
                {"op": "rotate", "object": "triangle_ABC", "center": "B", "degrees": 90},
            ),
            _step(
                "A rotation is rigid, so the image triangle is congruent.",
                {"op": "answer", "value": "congruent"},
            ),
        ],
    )
    add(
        "gold4",
        sq,
        "descriptor",
        "congruent",
        [
            _step(
                "Reflect triangle ABD across the diagonal axis B-D.",
                {"op": "reflect", "object": "triangle_ABD", "axis": ["B", "D"]},
            ),
            _step(
                "Reflection preserves all lengths; the halves are congruent.",
                {"op": "answer", "value": "congruent"},
            ),
        ],
    )
    add(
        "gold5",
        sq,
        "numerical",
        "4",
        [
            _step(
                "Translate side A-B one unit upward to compare lengths.",
                {"op": "translate", "object": "line_AB", "vector": [0, 1]},
            ),
            _step(
                "Translation preserves length, so the image still measures 4 units.",
                {"op": "answer", "value": 4},
            ),
        ],
    )
    add(
        "gold6",
        sq,
        "ratio",
        "2:1",
        [
            _step(
                "Mark M, the midpoint of side A-B.",
                {"op": "label_point", "name": "M", "coordinates": [2, 0]},
            ),
            _step("Join M to the opposite corner C.", {"op": "draw_line", "from": "M", "to": "C"}),
            _step(
                "M bisects AB, so AB : AM = 2 : 1.",
                {"op": "answer", "value": "2:1"},
            ),
        ],
    )
    add(
        "gold7",
        sq,
        "descriptor",
        "perpendicular",
        [
            _step("Draw diagonal A-C.", {"op": "draw_line", "from": "A", "to": "C"}),
            _step("Draw diagonal B-D.", {"op": "draw_line", "from": "B", "to": "D"}),
            _step(
                "A square's diagonals cross at right angles.",
                {"op": "answer", "value": "perpendicular"},
            ),
        ],
        aliases=("at right angles",),
    )
    add(
        "gold8",
        sq,
        "ratio",
        "1/2",
        [
            _step(
                "Mark the midpoint M of side A-B.",
                {"op": "label_point", "name": "M", "coordinates": [2, 0]},
            ),
            _step(
                "AM is half of AB, a 1/2 proportion.",
                {"op": "answer", "value": "1/2"},
            ),
        ],
    )
    add(
        "gold9",
        sq,
        "descriptor",
        "isosceles right triangle",
        [
            _step("Draw diagonal A-C.", {"op": "draw_line", "from": "A", "to": "C"}),
            _step(
                "Triangle ABC has two equal legs and a right angle at B.",
                {"op": "answer", "value": "isosceles right triangle"},
            ),
        ],
    )
    tri = make_form(
        [PointDecl("A", 0, 0), PointDecl("B", 6, 0), PointDecl("C", 2.0, 3.2)],
        [LineDecl(("A", "B")), LineDecl(("B", "C"))],
        [
            RelationDecl("fixed_angle", ("C", "A", "B"), 70.0),
            RelationDecl("fixed_angle", ("A", "B", "C"), 80.0),
        ],
    )
    add(
        "gold10",
        tri,
        "numerical",
        "30",
        [
            _step("Complete the triangle with side C-A.", {"op": "draw_line", "from": "C", "to": "A"}),
            _step(
                "The angles of a triangle sum to 180; the third angle is 30 degrees.",
                {"op": "answer", "value": 30, "unit": "degrees"},
            ),
        ],
        unit="degrees",
    )
    return out


def problem_to_record(problem: Problem) -> dict:
    """Inverse of parse_problem for writing fixture files."""
    from geomloop.answers import Numerical, Ratio
    from geomloop.logic_form import serialize_logic_form
    from geomloop.reasoning import step_output_to_dict

    gold = problem.gold_answer
    record: dict = {
        "id": problem.id,
        "text": problem.text,
        "logic_form": json.loads(serialize_logic_form(problem.initial_form)),
        "answer_type": problem.answer_type,
    }
    if isinstance(gold, Numerical):
        record["gold_answer"] = repr(gold.value)
        if gold.unit:
            record["answer_unit"] = gold.unit
    elif isinstance(gold, Ratio):
        record["gold_answer"] = f"{gold.numerator}:{gold.denominator}"
    else:
        record["gold_answer"] = gold.text
    if problem.answer_aliases:
        record["answer_aliases"] = list(problem.answer_aliases)
    if problem.gold_proof is not None:
        record["gold_proof"] = [step_output_to_dict(s) for s in problem.gold_proof]
    return record


def write_problem_file(path, problems) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for problem in problems:
            handle.write(json.dumps(problem_to_record(problem)) + "\n")


@pytest.fixture(scope="session")
def desk_problem_set() -> list[Problem]:
    return desk_problems()


@pytest.fixture(scope="session")
def gold_problem_set() -> list[Problem]:
    return gold_problems()


@pytest.fixture(scope="session")
def benchmark_composition_file(tmp_path_factory):
    """Fixture file mirroring the benchmark's published type composition."""
    path = tmp_path_factory.mktemp("bench") / "composition.jsonl"
    base = gold_problems()
    numerical = next(p for p in base if p.answer_type == "numerical")
    ratio = next(p for p in base if p.answer_type == "ratio")
    descriptor = next(p for p in base if p.answer_type == "descriptor")
    rows = []
    for i in range(201):
        rows.append((f"num{i:03d}", numerical))
    for i in range(108):
        rows.append((f"rat{i:03d}", ratio))
    for i in range(81):
        rows.append((f"des{i:03d}", descriptor))
    with open(path, "w", encoding="utf-8") as handle:
        for new_id, problem in rows:
            record = problem_to_record(problem)
            record["id"] = new_id
            record.pop("gold_proof", None)
            handle.write(json.dumps(record) + "\n")
    return path
