"""Sketch actions and their executor.

The action space: draw_line, reflect, rotate, translate, label_point, plus the
terminal answer. Execution is a pure state transition on a LogicForm; the
original form is never mutated.

Action JSON commands (strict, exact key sets):

    {"op": "draw_line", "from": "A", "to": "B"}
    {"op": "reflect", "object": "triangle_ABC", "axis": ["B", "C"]}
    {"op": "rotate", "object": "triangle_ABC", "center": "B", "degrees": 90}
    {"op": "translate", "object": "line_AB", "vector": [2, -1]}
    {"op": "label_point", "name": "M", "coordinates": [2, 0]}
    {"op": "answer", "value": 30}            # optional "unit"

Object references name a kind and its point labels: "line_AB", "circle_O",
"polygon_ABCD", "triangle_ABC" (alias for a 3-gon). Multi-character labels are
joined with underscores ("polygon_P1_P2_P3"). A reference first resolves
against declared objects; a line or polygon reference whose labels all exist
as points resolves to a virtual object over those points, so a triangle can be
transformed even when only its sides are drawn.

Transformed copies keep the original intact: every object point gets a fresh
primed label (A -> A', then A'' on collision), except the rotation center and
reflection-axis endpoints, which the map fixes and which keep their own
labels. label_point snaps to any existing point or object intersection within
EPSILON_SNAP, tying approximate coordinates to exact kernel intersections.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

from .answers import AnswerValue, answer_from_wire, answer_to_wire
from .errors import (
    ActionSchemaError,
    NameCollisionError,
    UnknownLabelError,
    UnknownObjectError,
)
from .geom import (
    AffineMap,
    Vec2,
    distance,
    intersect_circles,
    intersect_line_circle,
    intersect_lines,
    reflection_map,
    rotation_map,
    segment_contains,
    translation_map,
)
from .logic_form import (
    CircleDecl,
    LineDecl,
    LogicForm,
    ObjectDecl,
    PointDecl,
    PolygonDecl,
    format_real,
    is_label,
    object_summary,
)

# Snap radius for label_point and for "this point already exists" checks.
EPSILON_SNAP = 1e-6


@dataclass(frozen=True)
class DrawLine:
    a: str
    b: str


@dataclass(frozen=True)
class Reflect:
    obj: str
    axis: tuple[str, str]


@dataclass(frozen=True)
class Rotate:
    obj: str
    center: str
    degrees: float


@dataclass(frozen=True)
class Translate:
    obj: str
    vector: Vec2


@dataclass(frozen=True)
class LabelPoint:
    name: str
    coordinates: Vec2


@dataclass(frozen=True)
class Answer:
    value: AnswerValue


Action = Union[DrawLine, Reflect, Rotate, Translate, LabelPoint, Answer]


# --- strict JSON schema -------------------------------------------------------


def _require_keys(data: dict, required: set[str], optional: set[str] = frozenset()):
    keys = set(data)
    missing = required - keys
    extra = keys - required - optional
    if missing:
        raise ActionSchemaError(f"missing keys {sorted(missing)}")
    if extra:
        raise ActionSchemaError(f"unexpected keys {sorted(extra)}")


def _want_label(data: dict, key: str) -> str:
    value = data[key]
    if not is_label(value):
        raise ActionSchemaError(f"{key!r} must be a point label, got {value!r}")
    return value


def _want_number(value: object, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ActionSchemaError(f"{key!r} must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ActionSchemaError(f"{key!r} must be finite")
    return value


def _want_pair(data: dict, key: str) -> tuple[float, float]:
    value = data[key]
    if not (isinstance(value, list) and len(value) == 2):
        raise ActionSchemaError(f"{key!r} must be a 2-element array")
    return _want_number(value[0], key), _want_number(value[1], key)


def _want_label_pair(data: dict, key: str) -> tuple[str, str]:
    value = data[key]
    if not (isinstance(value, list) and len(value) == 2 and all(is_label(v) for v in value)):
        raise ActionSchemaError(f"{key!r} must be a pair of point labels")
    return value[0], value[1]


def _want_object_ref(data: dict) -> str:
    value = data["object"]
    if not isinstance(value, str) or not value:
        raise ActionSchemaError("'object' must be an object reference string")
    return value


def parse_action(payload: str | dict) -> Action:
    """Parse one action command; any schema deviation raises ActionSchemaError."""
    if isinstance(payload, str):
        try:
            data = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise ActionSchemaError(f"action is not valid JSON: {exc}") from exc
    else:
        data = payload
    if not isinstance(data, dict):
        raise ActionSchemaError("action must be a JSON object")
    op = data.get("op")
    if op == "draw_line":
        _require_keys(data, {"op", "from", "to"})
        return DrawLine(_want_label(data, "from"), _want_label(data, "to"))
    if op == "reflect":
        _require_keys(data, {"op", "object", "axis"})
        return Reflect(_want_object_ref(data), _want_label_pair(data, "axis"))
    if op == "rotate":
        _require_keys(data, {"op", "object", "center", "degrees"})
        return Rotate(
            _want_object_ref(data),
            _want_label(data, "center"),
            _want_number(data["degrees"], "degrees"),
        )
    if op == "translate":
        _require_keys(data, {"op", "object", "vector"})
        vx, vy = _want_pair(data, "vector")
        return Translate(_want_object_ref(data), Vec2(vx, vy))
    if op == "label_point":
        _require_keys(data, {"op", "name", "coordinates"})
        x, y = _want_pair(data, "coordinates")
        return LabelPoint(_want_label(data, "name"), Vec2(x, y))
    if op == "answer":
        _require_keys(data, {"op", "value"}, {"unit"})
        unit = data.get("unit")
        if unit is not None and not isinstance(unit, str):
            raise ActionSchemaError("'unit' must be a string")
        try:
            return Answer(answer_from_wire(data["value"], unit))
        except ValueError as exc:
            raise ActionSchemaError(str(exc)) from exc
    raise ActionSchemaError(f"unknown op {op!r}")


def action_to_dict(action: Action) -> dict:
    if isinstance(action, DrawLine):
        return {"op": "draw_line", "from": action.a, "to": action.b}
    if isinstance(action, Reflect):
        return {"op": "reflect", "object": action.obj, "axis": list(action.axis)}
    if isinstance(action, Rotate):
        return {
            "op": "rotate",
            "object": action.obj,
            "center": action.center,
            "degrees": action.degrees,
        }
    if isinstance(action, Translate):
        return {
            "op": "translate",
            "object": action.obj,
            "vector": [action.vector.x, action.vector.y],
        }
    if isinstance(action, LabelPoint):
        return {
            "op": "label_point",
            "name": action.name,
            "coordinates": [action.coordinates.x, action.coordinates.y],
        }
    assert isinstance(action, Answer)
    return {"op": "answer", **answer_to_wire(action.value)}


def _canonical_number(x: float):
    # Reals round-trip through the canonical 9-digit form; integers stay ints.
    as_float = float(format_real(x))
    return int(as_float) if as_float.is_integer() else as_float

def serialize_action(action: Action) -> str:
    """Canonical one-line JSON for an action (sorted keys, 9-digit reals)."""
    data = action_to_dict(action)
    for key, value in data.items():
        if isinstance(value, float):
            data[key] = _canonical_number(value)
        elif isinstance(value, list):
            data[key] = [
                _canonical_number(v) if isinstance(v, float) else v for v in value
            ]
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


# --- object references -----------------------------------------------------------


_REF_KINDS = {"line": "line", "circle": "circle", "polygon": "polygon", "triangle": "polygon"}


def make_object_ref(kind: str, labels: tuple[str, ...]) -> str:
    """Canonical reference: compact for single-char labels, else underscored."""
    name = "triangle" if kind == "polygon" and len(labels) == 3 else kind
    if all(len(label) == 1 for label in labels):
        return f"{name}_{''.join(labels)}"
    return "_".join((name,) + labels)


def _split_ref(ref: str, lf: LogicForm) -> tuple[str, tuple[str, ...]]:
    head, _, rest = ref.partition("_")
    kind = _REF_KINDS.get(head)
    if kind is None or not rest:
        raise UnknownObjectError(f"unresolvable object reference {ref!r}")
    tokens = tuple(rest.split("_"))
    if not all(is_label(t) for t in tokens):
        raise UnknownObjectError(f"unresolvable object reference {ref!r}")
    if len(tokens) == 1 and len(tokens[0]) > 1 and not lf.has_point(tokens[0]):
        tokens = tuple(tokens[0])  # compact single-char form
    if head == "triangle" and len(tokens) != 3:
        raise UnknownObjectError(f"{ref!r}: a triangle reference needs 3 labels")
    return kind, tokens


def resolve_object(lf: LogicForm, ref: str) -> ObjectDecl:
    """Resolve a reference to a declared object, or a virtual line/polygon."""
    kind, labels = _split_ref(ref, lf)
    for label in labels:
        if not lf.has_point(label):
            raise UnknownLabelError(label)
    if kind == "line":
        if len(labels) != 2:
            raise UnknownObjectError(f"{ref!r}: a line reference needs 2 labels")
        pair = set(labels)
        for obj in lf.objects:
            if isinstance(obj, LineDecl) and set(obj.points) == pair:
                return obj
        return LineDecl(points=(labels[0], labels[1]))
    if kind == "circle":
        if len(labels) != 1:
            raise UnknownObjectError(f"{ref!r}: a circle reference needs 1 label")
        for obj in lf.objects:
            if isinstance(obj, CircleDecl) and obj.center == labels[0]:
                return obj
        raise UnknownObjectError(f"no circle centered at {labels[0]!r}")
    if len(labels) < 3 or len(set(labels)) != len(labels):
        raise UnknownObjectError(f"{ref!r}: polygon labels must be 3+ and distinct")
    want = set(labels)
    for obj in lf.objects:
        if isinstance(obj, PolygonDecl) and set(obj.points) == want:
            return obj
    return PolygonDecl(points=labels)


# --- execution ---------------------------------------------------------------------


@dataclass(frozen=True)
class ExecutionResult:
    next_form: LogicForm
    created: tuple[PointDecl | ObjectDecl, ...] = ()
    terminal: bool = False
    answer: AnswerValue | None = None


def _fresh_primed(base: str, taken: set[str]) -> str:
    name = base + "'"
    while name in taken:
        name += "'"
    return name


def _line_exists(lf: LogicForm, a: str, b: str) -> bool:
    pair = {a, b}
    return any(
        isinstance(obj, LineDecl) and set(obj.points) == pair for obj in lf.objects
    )


def _transform(lf: LogicForm, obj: ObjectDecl, mapping: AffineMap, kept: set[str]) -> ExecutionResult:
    """Add a transformed copy of obj; `kept` labels are fixed by the map."""
    taken = set(lf.point_map)
    new_points: list[PointDecl] = []
    relabel: dict[str, str] = {}
    for label in obj.labels:
        if label in kept:
            relabel[label] = label
            continue
        image = mapping.apply(lf.vec(label))
        fresh = _fresh_primed(label, taken)
        taken.add(fresh)
        relabel[label] = fresh
        new_points.append(PointDecl(fresh, image.x, image.y))
    if isinstance(obj, CircleDecl):
        copy: ObjectDecl = CircleDecl(center=relabel[obj.center], radius=obj.radius, aux=True)
    elif isinstance(obj, LineDecl):
        copy = LineDecl(points=(relabel[obj.points[0]], relabel[obj.points[1]]), aux=True)
    else:
        copy = PolygonDecl(points=tuple(relabel[p] for p in obj.points), aux=True)
    next_form = lf.with_points(new_points).with_objects([copy])
    return ExecutionResult(next_form, created=tuple(new_points) + (copy,))


def execute(lf: LogicForm, action: Action) -> ExecutionResult:
    """Apply one action, returning the successor form (input left untouched)."""
    if isinstance(action, Answer):
        return ExecutionResult(lf, terminal=True, answer=action.value)

    if isinstance(action, DrawLine):
        for label in (action.a, action.b):
            if not lf.has_point(label):
                raise UnknownLabelError(label)
        if _line_exists(lf, action.a, action.b):
            return ExecutionResult(lf)
        line = LineDecl(points=(action.a, action.b), aux=True)
        return ExecutionResult(lf.with_objects([line]), created=(line,))

    if isinstance(action, LabelPoint):
        if lf.has_point(action.name):
            if distance(lf.vec(action.name), action.coordinates) <= EPSILON_SNAP:
                return ExecutionResult(lf)
            raise NameCollisionError(
                f"point {action.name!r} already exists at a different location"
            )
        target = _snap_target(lf, action.coordinates)
        point = PointDecl(action.name, target.x, target.y)
        return ExecutionResult(lf.with_points([point]), created=(point,))

    if isinstance(action, Rotate):
        if not lf.has_point(action.center):
            raise UnknownLabelError(action.center)
        obj = resolve_object(lf, action.obj)
        mapping = rotation_map(lf.vec(action.center), action.degrees)
        return _transform(lf, obj, mapping, kept={action.center})

    if isinstance(action, Reflect):
        for label in action.axis:
            if not lf.has_point(label):
                raise UnknownLabelError(label)
        obj = resolve_object(lf, action.obj)
        mapping = reflection_map(lf.vec(action.axis[0]), lf.vec(action.axis[1]))
        return _transform(lf, obj, mapping, kept=set(action.axis))

    assert isinstance(action, Translate)
    obj = resolve_object(lf, action.obj)
    return _transform(lf, obj, translation_map(action.vector), kept=set())


# --- intersections -----------------------------------------------------------------


def _object_segments(lf: LogicForm, obj: ObjectDecl) -> list[tuple[Vec2, Vec2]]:
    if isinstance(obj, LineDecl):
        return [(lf.vec(obj.points[0]), lf.vec(obj.points[1]))]
    if isinstance(obj, PolygonDecl):
        pts = [lf.vec(p) for p in obj.points]
        return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
    return []


def _pair_intersections(lf: LogicForm, a: ObjectDecl, b: ObjectDecl) -> list[Vec2]:
    out: list[Vec2] = []
    a_circle = isinstance(a, CircleDecl)
    b_circle = isinstance(b, CircleDecl)
    if a_circle and b_circle:
        out.extend(
            intersect_circles(lf.vec(a.center), a.radius, lf.vec(b.center), b.radius)
        )
        return out
    if a_circle or b_circle:
        circle, other = (a, b) if a_circle else (b, a)
        center, radius = lf.vec(circle.center), circle.radius  # type: ignore[union-attr]
        for seg in _object_segments(lf, other):
            if distance(seg[0], seg[1]) <= 1e-12:
                continue
            for point in intersect_line_circle(seg, center, radius):
                if segment_contains(seg, point):
                    out.append(point)
        return out
    for seg_a in _object_segments(lf, a):
        if distance(seg_a[0], seg_a[1]) <= 1e-12:
            continue
        for seg_b in _object_segments(lf, b):
            if distance(seg_b[0], seg_b[1]) <= 1e-12:
                continue
            hit = intersect_lines(seg_a, seg_b)
            if hit is not None and hit.on_first and hit.on_second:
                out.append(hit.point)
    return out


def auto_intersections(
    lf: LogicForm, new_object: ObjectDecl
) -> list[tuple[Vec2, tuple[str, str]]]:
    """Unnamed intersection candidates of new_object with every other object.

    Points that coincide with an existing named point (within EPSILON_SNAP)
    are omitted; naming happens only through label_point. Output is sorted by
    coordinates so it is independent of object declaration order.
    """
    if new_object not in lf.objects:
        raise UnknownObjectError("new_object is not part of the form")
    named = [p.vec for p in lf.points]
    out: list[tuple[Vec2, tuple[str, str]]] = []
    new_summary = object_summary(new_object)
    for other in lf.objects:
        if other == new_object:
            continue
        for point in _pair_intersections(lf, new_object, other):
            if any(distance(point, p) <= EPSILON_SNAP for p in named):
                continue
            if any(
                distance(point, seen) <= EPSILON_SNAP and pair == (new_summary, object_summary(other))
                for seen, pair in out
            ):
                continue
            out.append((point, (new_summary, object_summary(other))))
    out.sort(key=lambda item: (item[0].x, item[0].y, item[1]))
    return out


def _snap_target(lf: LogicForm, coords: Vec2) -> Vec2:
    """Nearest existing point or pairwise object intersection within the snap radius."""
    best: tuple[float, Vec2] | None = None

    def consider(candidate: Vec2):
        nonlocal best
        d = distance(candidate, coords)
        if d <= EPSILON_SNAP and (best is None or d < best[0]):
            best = (d, candidate)

    for p in lf.points:
        consider(p.vec)
    objects = list(lf.objects)
    for i, a in enumerate(objects):
        for b in objects[i + 1 :]:
            for point in _pair_intersections(lf, a, b):
                consider(point)
    return best[1] if best else coords
