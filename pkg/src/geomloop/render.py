"""Deterministic SVG rendering of logic forms.

The logic form is the source of truth; rendering is a pure function of the
form and style, emitting byte-identical documents for equal inputs. Elements
appear in canonical order: objects sorted by kind then labels, then point
markers, then text labels. Objects flagged aux (created by sketch actions)
are stroked dashed. Model +y points up; the y axis is flipped into SVG space.

Element ids follow a documented convention for test assertions:
pt-<label>, obj-<kind>-<labels>, label-<label>.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyFormError
from .logic_form import CircleDecl, LineDecl, LogicForm, ObjectDecl, format_real


@dataclass(frozen=True)
class RenderStyle:
    stroke_width: float = 1.5  # px
    point_radius: float = 2.5  # px
    font_size: float = 12.0  # px
    margin: float = 0.1  # fraction of the bounding box
    dash_pattern: str = "6 4"  # stroke-dasharray for aux objects
    scale: float = 50.0  # px per model unit

    def __post_init__(self):
        for name in ("stroke_width", "point_radius", "font_size", "margin", "scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"style field {name} must be positive")


DEFAULT_STYLE = RenderStyle()

BBox = tuple[float, float, float, float]  # min_x, min_y, max_x, max_y


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def form_bbox(lf: LogicForm) -> BBox:
    """Bounding box over all points (circles contribute their full disc)."""
    if not lf.points:
        raise EmptyFormError("cannot render a form without points")
    xs = [p.x for p in lf.points]
    ys = [p.y for p in lf.points]
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    for obj in lf.objects:
        if isinstance(obj, CircleDecl):
            c = lf.point_map[obj.center]
            min_x = min(min_x, c.x - obj.radius)
            max_x = max(max_x, c.x + obj.radius)
            min_y = min(min_y, c.y - obj.radius)
            max_y = max(max_y, c.y + obj.radius)
    return min_x, min_y, max_x, max_y


def _merge_bbox(a: BBox, b: BBox) -> BBox:
    return min(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3])


def _object_sort_key(obj: ObjectDecl) -> tuple:
    return (obj.kind, obj.labels)


def _render_with_bbox(lf: LogicForm, style: RenderStyle, bbox: BBox) -> str:
    min_x, min_y, max_x, max_y = bbox
    span = max(max_x - min_x, max_y - min_y, 1.0)
    pad = style.margin * span

    def vx(x: float) -> str:
        return format_real((x - min_x + pad) * style.scale)

    def vy(y: float) -> str:
        return format_real((max_y - y + pad) * style.scale)

    width = format_real((max_x - min_x + 2 * pad) * style.scale)
    height = format_real((max_y - min_y + 2 * pad) * style.scale)
    sw = format_real(style.stroke_width)

    lines: list[str] = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    ]
    for obj in sorted(lf.objects, key=_object_sort_key):
        dash = f' stroke-dasharray="{_escape(style.dash_pattern)}"' if obj.aux else ""
        obj_id = _escape(f"obj-{obj.kind}-{'-'.join(obj.labels)}")
        if isinstance(obj, LineDecl):
            a = lf.point_map[obj.points[0]]
            b = lf.point_map[obj.points[1]]
            lines.append(
                f'<line id="{obj_id}" x1="{vx(a.x)}" y1="{vy(a.y)}" '
                f'x2="{vx(b.x)}" y2="{vy(b.y)}" '
                f'stroke="black" stroke-width="{sw}"{dash}/>'
            )
        elif isinstance(obj, CircleDecl):
            c = lf.point_map[obj.center]
            lines.append(
                f'<circle id="{obj_id}" cx="{vx(c.x)}" cy="{vy(c.y)}" '
                f'r="{format_real(obj.radius * style.scale)}" '
                f'fill="none" stroke="black" stroke-width="{sw}"{dash}/>'
            )
        else:
            pts = " ".join(
                f"{vx(lf.point_map[name].x)},{vy(lf.point_map[name].y)}"
                for name in obj.points
            )
            lines.append(
                f'<polygon id="{obj_id}" points="{pts}" '
                f'fill="none" stroke="black" stroke-width="{sw}"{dash}/>'
            )
    for p in lf.points:
        lines.append(
            f'<circle id="{_escape("pt-" + p.name)}" cx="{vx(p.x)}" cy="{vy(p.y)}" '
            f'r="{format_real(style.point_radius)}" fill="black"/>'
        )
    offset = style.point_radius + 2.0
    for p in lf.points:
        tx = format_real((p.x - min_x + pad) * style.scale + offset)
        ty = format_real((max_y - p.y + pad) * style.scale - offset)
        lines.append(
            f'<text id="{_escape("label-" + p.name)}" x="{tx}" y="{ty}" '
            f'font-size="{format_real(style.font_size)}">{_escape(p.name)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines)


def render_svg(lf: LogicForm, style: RenderStyle = DEFAULT_STYLE) -> str:
    """Render one form; byte-deterministic for equal inputs."""
    return _render_with_bbox(lf, style, form_bbox(lf))


def render_trajectory(
    frames: list[LogicForm], style: RenderStyle = DEFAULT_STYLE
) -> list[str]:
    """Render every frame with a shared viewBox (union of all bounding boxes)."""
    if not frames:
        raise EmptyFormError("trajectory has no frames")
    bbox = form_bbox(frames[0])
    for frame in frames[1:]:
        bbox = _merge_bbox(bbox, form_bbox(frame))
    return [_render_with_bbox(frame, style, bbox) for frame in frames]
