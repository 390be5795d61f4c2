"""Compiles a LogicForm's relations into flat arrays for the residual kernels.

Each relation becomes one constraint record: an opcode, up to four point
indices, and one scalar (target length/angle, or circle radius). Midpoint
constraints emit two residual rows (x and y); everything else emits one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError
from ..logic_form import CircleDecl, LogicForm

OP_POINT_ON_LINE = 0
OP_POINT_ON_CIRCLE = 1
OP_PERPENDICULAR = 2
OP_PARALLEL = 3
OP_EQUAL_LENGTH = 4
OP_FIXED_LENGTH = 5
OP_FIXED_ANGLE = 6
OP_COLLINEAR = 7
OP_MIDPOINT = 8

_OPCODES = {
    "point_on_line": OP_POINT_ON_LINE,
    "point_on_circle": OP_POINT_ON_CIRCLE,
    "perpendicular": OP_PERPENDICULAR,
    "parallel": OP_PARALLEL,
    "equal_length": OP_EQUAL_LENGTH,
    "fixed_length": OP_FIXED_LENGTH,
    "fixed_angle": OP_FIXED_ANGLE,
    "collinear": OP_COLLINEAR,
    "midpoint": OP_MIDPOINT,
}


@dataclass(frozen=True)
class ConstraintSystem:
    labels: tuple[str, ...]  # point names in coordinate order
    xy: np.ndarray  # (2n,) current coordinates [x0, y0, x1, y1, ...]
    codes: np.ndarray  # (m,) int32 opcodes
    pidx: np.ndarray  # (m, 4) int32 point indices, -1 padding
    vals: np.ndarray  # (m,) float64 targets/radii (0 when unused)
    rows: np.ndarray  # (m,) int32 first residual row of each constraint
    n_residuals: int

    @property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.labels)}


def compile_system(lf: LogicForm) -> ConstraintSystem:
    labels = tuple(p.name for p in lf.points)  # already name-sorted
    index = {name: i for i, name in enumerate(labels)}
    xy = np.empty(2 * len(labels), dtype=np.float64)
    for i, p in enumerate(lf.points):
        xy[2 * i] = p.x
        xy[2 * i + 1] = p.y

    circles: dict[str, list[CircleDecl]] = {}
    for obj in lf.objects:
        if isinstance(obj, CircleDecl):
            circles.setdefault(obj.center, []).append(obj)

    codes: list[int] = []
    pidx: list[tuple[int, int, int, int]] = []
    vals: list[float] = []
    rows: list[int] = []
    row = 0
    for rel in lf.relations:
        code = _OPCODES[rel.kind]
        value = 0.0
        if rel.kind == "point_on_line" or rel.kind == "midpoint":
            p, line = rel.args
            idx = (index[p], index[line[0]], index[line[1]], -1)
        elif rel.kind == "point_on_circle":
            p, center = rel.args
            matches = circles.get(center, [])
            if len(matches) != 1:
                raise SchemaError(f"no unique circle with center {center!r}")
            idx = (index[p], index[center], -1, -1)
            value = matches[0].radius
        elif rel.kind in ("perpendicular", "parallel", "equal_length"):
            l1, l2 = rel.args
            idx = (index[l1[0]], index[l1[1]], index[l2[0]], index[l2[1]])
        elif rel.kind == "fixed_length":
            (line,) = rel.args
            idx = (index[line[0]], index[line[1]], -1, -1)
            value = float(rel.value)  # type: ignore[arg-type]
        elif rel.kind == "fixed_angle":
            a, v, b = rel.args
            idx = (index[a], index[v], index[b], -1)
            value = float(rel.value)  # type: ignore[arg-type]
        else:  # collinear
            a, b, c = rel.args
            idx = (index[a], index[b], index[c], -1)
        codes.append(code)
        pidx.append(idx)
        vals.append(value)
        rows.append(row)
        row += 2 if rel.kind == "midpoint" else 1

    return ConstraintSystem(
        labels=labels,
        xy=xy,
        codes=np.asarray(codes, dtype=np.int32),
        pidx=np.asarray(pidx, dtype=np.int32).reshape(-1, 4),
        vals=np.asarray(vals, dtype=np.float64),
        rows=np.asarray(rows, dtype=np.int32),
        n_residuals=row,
    )
