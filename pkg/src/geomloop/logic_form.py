"""Declarative diagram language: points, objects, relations, and annotations.

A LogicForm is the single source of truth for a diagram. This module defines
the value types, the strict JSON parser, the canonical serializer (byte-stable
output), the invariant validator, and the geometric diff between two forms.

Canonical JSON layout (documented contract):

    {
      "annotations": {"goal": "angle A B C"},          # optional, omitted when empty
      "objects": [
        {"points": ["A", "B"], "type": "line"},
        {"center": "O", "radius": 5, "type": "circle"},
        {"points": ["A", "B", "C"], "type": "polygon"}
      ],
      "points": [{"name": "A", "x": 0, "y": 0}, ...],  # sorted by name
      "relations": [
        {"args": ["P", ["A", "B"]], "kind": "point_on_line"},
        {"args": [["A", "B"]], "kind": "fixed_length", "value": 5}
      ]
    }

All object keys are emitted sorted; reals are printed with 9 significant
digits. Relation args are point labels (strings) or line references
(2-arrays of labels, meaning the carrier through those points); a
point_on_circle relation references its circle by center label. Objects
created by sketch actions carry "aux": true and are rendered dashed.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import DanglingLabelError, FormSyntaxError, SchemaError
from .geom import Vec2, distance

LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*'*$")

# Default tolerance for "geometrically identical" in diffs, model units.
EPSILON_DIFF = 1e-6

# A relation argument: a point label, or a line reference (pair of labels).
RelationArg = Union[str, tuple[str, str]]

# kind -> (argument shape, takes value).  "P" = point label, "L" = line ref,
# "C" = circle ref (center label).
RELATION_SHAPES: dict[str, tuple[str, bool]] = {
    "point_on_line": ("PL", False),
    "point_on_circle": ("PC", False),
    "perpendicular": ("LL", False),
    "parallel": ("LL", False),
    "equal_length": ("LL", False),
    "fixed_length": ("L", True),
    "fixed_angle": ("PPP", True),
    "collinear": ("PPP", False),
    "midpoint": ("PL", False),
}


def is_label(name: object) -> bool:
    return isinstance(name, str) and bool(LABEL_RE.match(name))


@dataclass(frozen=True)
class PointDecl:
    name: str
    x: float
    y: float

    @property
    def vec(self) -> Vec2:
        return Vec2(self.x, self.y)


@dataclass(frozen=True)
class LineDecl:
    points: tuple[str, str]
    aux: bool = False

    kind = "line"

    @property
    def labels(self) -> tuple[str, ...]:
        return self.points


@dataclass(frozen=True)
class CircleDecl:
    center: str
    radius: float
    aux: bool = False

    kind = "circle"

    @property
    def labels(self) -> tuple[str, ...]:
        return (self.center,)


@dataclass(frozen=True)
class PolygonDecl:
    points: tuple[str, ...]
    aux: bool = False

    kind = "polygon"

    @property
    def labels(self) -> tuple[str, ...]:
        return self.points


ObjectDecl = Union[LineDecl, CircleDecl, PolygonDecl]


@dataclass(frozen=True)
class RelationDecl:
    kind: str
    args: tuple[RelationArg, ...]
    value: float | None = None


@dataclass(frozen=True)
class LogicForm:
    """Immutable diagram state. Points are normalized to name order."""

    points: tuple[PointDecl, ...] = ()
    objects: tuple[ObjectDecl, ...] = ()
    relations: tuple[RelationDecl, ...] = ()
    annotations: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "points", tuple(sorted(self.points, key=lambda p: p.name))
        )
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(
            self, "annotations", tuple(sorted(dict(self.annotations).items()))
        )

    @cached_property
    def point_map(self) -> dict[str, PointDecl]:
        return {p.name: p for p in self.points}

    @cached_property
    def annotation_map(self) -> dict[str, str]:
        return dict(self.annotations)

    def has_point(self, name: str) -> bool:
        return name in self.point_map

    def vec(self, name: str) -> Vec2:
        return self.point_map[name].vec

    def with_points(self, new_points: Iterable[PointDecl]) -> "LogicForm":
        return replace(self, points=self.points + tuple(new_points))

    def with_objects(self, new_objects: Iterable[ObjectDecl]) -> "LogicForm":
        return replace(self, objects=self.objects + tuple(new_objects))


def make_form(
    points: Iterable[PointDecl] = (),
    objects: Iterable[ObjectDecl] = (),
    relations: Iterable[RelationDecl] = (),
    annotations: Mapping[str, str] | None = None,
) -> LogicForm:
    return LogicForm(
        points=tuple(points),
        objects=tuple(objects),
        relations=tuple(relations),
        annotations=tuple((annotations or {}).items()),
    )


# --- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One invariant failure; code is stable and subject names the declaration."""

    code: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.code}({self.subject})"
        return f"{text}: {self.detail}" if self.detail else text


def _relation_labels(rel: RelationDecl) -> list[str]:
    out: list[str] = []
    for arg in rel.args:
        if isinstance(arg, str):
            out.append(arg)
        else:
            out.extend(arg)
    return out


def validate(lf: LogicForm) -> list[Violation]:
    """Return all invariant violations; empty list means the form is valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for p in lf.points:
        if not is_label(p.name):
            out.append(Violation("BadLabel", p.name))
        if p.name in seen:
            out.append(Violation("DuplicateLabel", p.name))
        seen.add(p.name)
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            out.append(Violation("NonFiniteCoordinate", p.name))

    known = {p.name for p in lf.points}
    circle_centers: dict[str, int] = {}
    for obj in lf.objects:
        if isinstance(obj, CircleDecl):
            circle_centers[obj.center] = circle_centers.get(obj.center, 0) + 1

    for obj in lf.objects:
        subject = object_summary(obj)
        for label in obj.labels:
            if label not in known:
                out.append(Violation("DanglingLabel", label, f"in {subject}"))
        if isinstance(obj, CircleDecl):
            if not (math.isfinite(obj.radius) and obj.radius > 0):
                out.append(Violation("NonPositiveRadius", obj.center))
        elif isinstance(obj, PolygonDecl):
            if len(obj.points) < 3:
                out.append(Violation("PolygonTooSmall", subject))
            if len(set(obj.points)) != len(obj.points):
                out.append(Violation("RepeatedPolygonVertex", subject))

    for i, rel in enumerate(lf.relations):
        subject = f"relations[{i}]:{rel.kind}"
        shape_entry = RELATION_SHAPES.get(rel.kind)
        if shape_entry is None:
            out.append(Violation("UnknownRelationKind", rel.kind))
            continue
        shape, takes_value = shape_entry
        if len(rel.args) != len(shape):
            out.append(
                Violation("BadArity", subject, f"expected {len(shape)} args")
            )
            continue
        for arg, code in zip(rel.args, shape):
            if code in ("P", "C"):
                if not isinstance(arg, str):
                    out.append(Violation("BadArgShape", subject, "expected label"))
                elif arg not in known:
                    out.append(Violation("DanglingLabel", arg, f"in {subject}"))
                elif code == "C" and circle_centers.get(arg, 0) != 1:
                    out.append(
                        Violation(
                            "UnresolvedCircle",
                            arg,
                            "no unique circle with this center",
                        )
                    )
            else:  # line ref
                if not (isinstance(arg, tuple) and len(arg) == 2):
                    out.append(
                        Violation("BadArgShape", subject, "expected point pair")
                    )
                    continue
                for label in arg:
                    if label not in known:
                        out.append(Violation("DanglingLabel", label, f"in {subject}"))
        if takes_value:
            if rel.value is None or not math.isfinite(rel.value):
                out.append(Violation("MissingValue", subject))
        elif rel.value is not None:
            out.append(Violation("UnexpectedValue", subject))

    for key, value in lf.annotations:
        # Annotation keys are identifier-shaped but need not name a point;
        # reserved keys like "goal" carry problem metadata.
        if not is_label(key):
            out.append(Violation("BadAnnotationKey", key))
        if not isinstance(value, str):
            out.append(Violation("BadAnnotationValue", key))
    return out


# --- canonical serialization -----------------------------------------------------


def format_real(x: float) -> str:
    """Canonical 9-significant-digit form; negative zero normalized."""
    text = "%.9g" % float(x)
    return "0" if text == "-0" else text


def _emit_string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _emit_arg(arg: RelationArg) -> str:
    if isinstance(arg, str):
        return _emit_string(arg)
    return "[" + ",".join(_emit_string(a) for a in arg) + "]"


def _emit_object(obj: ObjectDecl) -> str:
    parts: list[str] = []
    if obj.aux:
        parts.append('"aux":true')
    if isinstance(obj, CircleDecl):
        parts.append(f'"center":{_emit_string(obj.center)}')
        parts.append(f'"radius":{format_real(obj.radius)}')
    else:
        labels = "[" + ",".join(_emit_string(p) for p in obj.points) + "]"
        parts.append(f'"points":{labels}')
    parts.append(f'"type":{_emit_string(obj.kind)}')
    return "{" + ",".join(parts) + "}"


def _emit_relation(rel: RelationDecl) -> str:
    args = "[" + ",".join(_emit_arg(a) for a in rel.args) + "]"
    body = f'"args":{args},"kind":{_emit_string(rel.kind)}'
    if rel.value is not None:
        body += f',"value":{format_real(rel.value)}'
    return "{" + body + "}"


def serialize_logic_form(lf: LogicForm) -> str:
    """Canonical UTF-8 document: sorted keys, points sorted by name, 9-digit reals."""
    sections: list[str] = []
    if lf.annotations:
        body = ",".join(
            f"{_emit_string(k)}:{_emit_string(v)}" for k, v in lf.annotations
        )
        sections.append('"annotations":{' + body + "}")
    sections.append(
        '"objects":[' + ",".join(_emit_object(o) for o in lf.objects) + "]"
    )
    sections.append(
        '"points":['
        + ",".join(
            "{"
            + f'"name":{_emit_string(p.name)},"x":{format_real(p.x)},"y":{format_real(p.y)}'
            + "}"
            for p in lf.points
        )
        + "]"
    )
    sections.append(
        '"relations":[' + ",".join(_emit_relation(r) for r in lf.relations) + "]"
    )
    return "{" + ",".join(sections) + "}"


# --- parsing ----------------------------------------------------------------------


def _reject_constant(name: str):
    raise SchemaError(f"non-finite numeric literal {name!r}")


def _require_keys(obj: dict, required: set[str], optional: set[str], where: str):
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise SchemaError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")


def _as_real(value: object, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaError(f"{where}: non-finite number")
    return value


def _as_label(value: object, where: str) -> str:
    if not is_label(value):
        raise SchemaError(f"{where}: expected a point label, got {value!r}")
    return value  # type: ignore[return-value]


def _parse_point(raw: object, index: int) -> PointDecl:
    where = f"points[{index}]"
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected an object")
    _require_keys(raw, {"name", "x", "y"}, set(), where)
    return PointDecl(
        name=_as_label(raw["name"], where),
        x=_as_real(raw["x"], f"{where}.x"),
        y=_as_real(raw["y"], f"{where}.y"),
    )


def _parse_label_list(raw: object, where: str, *, exact: int | None = None) -> tuple[str, ...]:
    if not isinstance(raw, list) or (exact is not None and len(raw) != exact):
        raise SchemaError(f"{where}: expected a list of {exact or 'several'} labels")
    return tuple(_as_label(item, where) for item in raw)


def _parse_object(raw: object, index: int) -> ObjectDecl:
    where = f"objects[{index}]"
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected an object")
    kind = raw.get("type")
    aux = raw.get("aux", False)
    if not isinstance(aux, bool):
        raise SchemaError(f"{where}.aux: expected a boolean")
    if kind == "line":
        _require_keys(raw, {"type", "points"}, {"aux"}, where)
        pts = _parse_label_list(raw["points"], f"{where}.points", exact=2)
        return LineDecl(points=(pts[0], pts[1]), aux=aux)
    if kind == "circle":
        _require_keys(raw, {"type", "center", "radius"}, {"aux"}, where)
        return CircleDecl(
            center=_as_label(raw["center"], where),
            radius=_as_real(raw["radius"], f"{where}.radius"),
            aux=aux,
        )
    if kind == "polygon":
        _require_keys(raw, {"type", "points"}, {"aux"}, where)
        pts = _parse_label_list(raw["points"], f"{where}.points")
        if len(pts) < 3:
            raise SchemaError(f"{where}: polygon needs at least 3 points")
        return PolygonDecl(points=pts, aux=aux)
    raise SchemaError(f"{where}: unknown object type {kind!r}")


def _parse_relation(raw: object, index: int) -> RelationDecl:
    where = f"relations[{index}]"
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected an object")
    _require_keys(raw, {"kind", "args"}, {"value"}, where)
    kind = raw["kind"]
    if kind not in RELATION_SHAPES:
        raise SchemaError(f"{where}: unknown relation kind {kind!r}")
    shape, takes_value = RELATION_SHAPES[kind]
    raw_args = raw["args"]
    if not isinstance(raw_args, list) or len(raw_args) != len(shape):
        raise SchemaError(f"{where}: {kind} takes {len(shape)} args")
    args: list[RelationArg] = []
    for arg, code in zip(raw_args, shape):
        if code in ("P", "C"):
            args.append(_as_label(arg, f"{where}.args"))
        else:
            pair = _parse_label_list(arg, f"{where}.args", exact=2)
            args.append((pair[0], pair[1]))
    value = None
    if takes_value:
        if "value" not in raw:
            raise SchemaError(f"{where}: {kind} requires a value")
        value = _as_real(raw["value"], f"{where}.value")
    elif "value" in raw:
        raise SchemaError(f"{where}: {kind} takes no value")
    return RelationDecl(kind=kind, args=tuple(args), value=value)


def parse_logic_form(text: str) -> LogicForm:
    """Parse a JSON document into a validated LogicForm.

    Raises FormSyntaxError (with byte offset) for malformed JSON, SchemaError
    for structural violations, DanglingLabelError for unresolved references.
    """
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormSyntaxError(str(exc), offset=exc.pos) from exc
    if not isinstance(raw, dict):
        raise SchemaError("top level: expected an object")
    _require_keys(raw, {"points", "objects", "relations"}, {"annotations"}, "top level")
    for key in ("points", "objects", "relations"):
        if not isinstance(raw[key], list):
            raise SchemaError(f"top level: {key!r} must be a list")
    points = tuple(_parse_point(p, i) for i, p in enumerate(raw["points"]))
    objects = tuple(_parse_object(o, i) for i, o in enumerate(raw["objects"]))
    relations = tuple(_parse_relation(r, i) for i, r in enumerate(raw["relations"]))
    annotations: dict[str, str] = {}
    if "annotations" in raw:
        if not isinstance(raw["annotations"], dict):
            raise SchemaError("annotations: expected an object")
        for key, value in raw["annotations"].items():
            if not is_label(key) or not isinstance(value, str):
                raise SchemaError(f"annotations[{key!r}]: expected label -> text")
            annotations[key] = value
    lf = make_form(points, objects, relations, annotations)
    violations = validate(lf)
    if violations:
        first = violations[0]
        if first.code == "DanglingLabel":
            raise DanglingLabelError(first.subject, first.detail)
        raise SchemaError("; ".join(str(v) for v in violations))
    return lf


# --- diffing -----------------------------------------------------------------------


def object_summary(obj: ObjectDecl) -> str:
    if isinstance(obj, CircleDecl):
        return f"circle {obj.center} r={format_real(obj.radius)}"
    return f"{obj.kind} {'-'.join(obj.points)}"


def _canonical_cycle(labels: tuple[str, ...]) -> tuple[str, ...]:
    """Minimal rotation over both orientations; polygon identity up to traversal."""
    best: tuple[str, ...] | None = None
    for seq in (labels, tuple(reversed(labels))):
        for shift in range(len(seq)):
            cand = seq[shift:] + seq[:shift]
            if best is None or cand < best:
                best = cand
    return best or labels


def _object_key(obj: ObjectDecl) -> tuple:
    if isinstance(obj, LineDecl):
        return ("line", tuple(sorted(obj.points)))
    if isinstance(obj, CircleDecl):
        return ("circle", obj.center)
    return ("polygon", _canonical_cycle(obj.points))


@dataclass(frozen=True)
class DiagramDiff:
    """Differences of form b relative to form a (missing = present only in a)."""

    missing_points: tuple[str, ...] = ()
    extra_points: tuple[str, ...] = ()
    moved_points: tuple[tuple[str, float], ...] = ()
    missing_objects: tuple[str, ...] = ()
    extra_objects: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not (
            self.missing_points
            or self.extra_points
            or self.moved_points
            or self.missing_objects
            or self.extra_objects
        )


def diff_forms(a: LogicForm, b: LogicForm, epsilon: float = EPSILON_DIFF) -> DiagramDiff:
    """Geometric difference between two forms at tolerance epsilon (> 0)."""
    if not epsilon > 0:
        raise ValueError("diff tolerance must be positive")
    a_points = a.point_map
    b_points = b.point_map
    missing_points = tuple(sorted(set(a_points) - set(b_points)))
    extra_points = tuple(sorted(set(b_points) - set(a_points)))
    moved: list[tuple[str, float]] = []
    for name in sorted(set(a_points) & set(b_points)):
        d = distance(a_points[name].vec, b_points[name].vec)
        if d > epsilon:
            moved.append((name, d))

    a_objs = {_object_key(o): o for o in a.objects}
    b_objs = {_object_key(o): o for o in b.objects}
    missing_objects: list[str] = []
    extra_objects: list[str] = []
    for key in sorted(set(a_objs) | set(b_objs)):
        in_a, in_b = key in a_objs, key in b_objs
        if in_a and in_b:
            oa, ob = a_objs[key], b_objs[key]
            if isinstance(oa, CircleDecl) and abs(oa.radius - ob.radius) > epsilon:
                missing_objects.append(object_summary(oa))
                extra_objects.append(object_summary(ob))
        elif in_a:
            missing_objects.append(object_summary(a_objs[key]))
        else:
            extra_objects.append(object_summary(b_objs[key]))
    return DiagramDiff(
        missing_points=missing_points,
        extra_points=extra_points,
        moved_points=tuple(moved),
        missing_objects=tuple(missing_objects),
        extra_objects=tuple(extra_objects),
    )
