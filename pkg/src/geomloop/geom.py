"""2-D geometry kernel: rigid maps, intersections, distances, angles.

Everything is double precision with explicit tolerances; no exact predicates.
Rotation angles are in degrees, counter-clockwise positive. Angles measured by
angle_measure are unsigned degrees in [0, 180].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    DegenerateAngleError,
    DegenerateAxisError,
    DegenerateLineError,
)

# Two line directions count as parallel below this angular separation (radians).
PARALLEL_TOL = 1e-10
# Endpoints closer than this are treated as coincident.
COINCIDENT_TOL = 1e-12
# Intersection points closer than this are merged (tangency detection).
MERGE_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Vec2:
    """Point or displacement in model units."""

    x: float
    y: float

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


def distance(p: Vec2, q: Vec2) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True, slots=True)
class AffineMap:
    """Affine map p -> [[a, b], [c, d]] @ p + (tx, ty).

    The three public constructors only build rigid maps (det +1 for rotations
    and translations, -1 for reflections).
    """

    a: float
    b: float
    c: float
    d: float
    tx: float
    ty: float

    def apply(self, p: Vec2) -> Vec2:
        return Vec2(
            self.a * p.x + self.b * p.y + self.tx,
            self.c * p.x + self.d * p.y + self.ty,
        )

    def compose(self, inner: AffineMap) -> AffineMap:
        """Map equal to applying `inner` first, then self."""
        return AffineMap(
            a=self.a * inner.a + self.b * inner.c,
            b=self.a * inner.b + self.b * inner.d,
            c=self.c * inner.a + self.d * inner.c,
            d=self.c * inner.b + self.d * inner.d,
            tx=self.a * inner.tx + self.b * inner.ty + self.tx,
            ty=self.c * inner.tx + self.d * inner.ty + self.ty,
        )

    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c


IDENTITY_MAP = AffineMap(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def rotation_map(center: Vec2, degrees: float) -> AffineMap:
    """Rotation about `center`, counter-clockwise positive."""
    if not math.isfinite(degrees):
        raise ValueError("rotation angle must be finite")
    rad = math.radians(degrees)
    cos, sin = math.cos(rad), math.sin(rad)
    # p -> R (p - center) + center
    return AffineMap(
        a=cos,
        b=-sin,
        c=sin,
        d=cos,
        tx=center.x - cos * center.x + sin * center.y,
        ty=center.y - sin * center.x - cos * center.y,
    )


def reflection_map(axis_a: Vec2, axis_b: Vec2) -> AffineMap:
    """Reflection across the line through two distinct points; fixes the axis."""
    d = axis_b - axis_a
    n2 = d.dot(d)
    if n2 <= COINCIDENT_TOL * COINCIDENT_TOL:
        raise DegenerateAxisError("reflection axis endpoints coincide")
    # Householder-style: with unit direction u, linear part is 2 u u^T - I.
    ux2 = d.x * d.x / n2
    uy2 = d.y * d.y / n2
    uxy = d.x * d.y / n2
    a = 2.0 * ux2 - 1.0
    b = 2.0 * uxy
    c = 2.0 * uxy
    dd = 2.0 * uy2 - 1.0
    return AffineMap(
        a=a,
        b=b,
        c=c,
        d=dd,
        tx=axis_a.x - a * axis_a.x - b * axis_a.y,
        ty=axis_a.y - c * axis_a.x - dd * axis_a.y,
    )


def translation_map(v: Vec2) -> AffineMap:
    if not v.is_finite():
        raise ValueError("translation vector must be finite")
    return AffineMap(1.0, 0.0, 0.0, 1.0, v.x, v.y)


def apply_map(m: AffineMap, p: Vec2) -> Vec2:
    return m.apply(p)


class LineIntersection(NamedTuple):
    point: Vec2
    on_first: bool  # inside the first segment (endpoints included)
    on_second: bool


def _direction(line: tuple[Vec2, Vec2], what: str) -> Vec2:
    d = line[1] - line[0]
    if d.norm() <= COINCIDENT_TOL:
        raise DegenerateLineError(f"{what} endpoints coincide")
    return d


def intersect_lines(
    l1: tuple[Vec2, Vec2], l2: tuple[Vec2, Vec2]
) -> LineIntersection | None:
    """Intersection of the infinite carriers of two segments.

    Returns None when the directions are parallel within PARALLEL_TOL radians.
    The flags report whether the intersection lies within each segment.
    """
    d1 = _direction(l1, "first line")
    d2 = _direction(l2, "second line")
    denom = d1.cross(d2)
    if abs(denom) <= PARALLEL_TOL * d1.norm() * d2.norm():
        return None
    w = l2[0] - l1[0]
    t1 = w.cross(d2) / denom
    t2 = w.cross(d1) / denom
    point = l1[0] + d1 * t1
    eps = 1e-9
    return LineIntersection(
        point=point,
        on_first=-eps <= t1 <= 1.0 + eps,
        on_second=-eps <= t2 <= 1.0 + eps,
    )


def intersect_line_circle(
    line: tuple[Vec2, Vec2], center: Vec2, radius: float
) -> tuple[Vec2, ...]:
    """Intersections of a segment's infinite carrier with a circle (0, 1 or 2).

    Tangency collapses the two quadratic roots: solutions closer than
    MERGE_TOL are deduplicated.
    """
    d = _direction(line, "line")
    f = line[0] - center
    a = d.dot(d)
    b = 2.0 * f.dot(d)
    c = f.dot(f) - radius * radius
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ()
    sq = math.sqrt(max(disc, 0.0))
    t_lo = (-b - sq) / (2.0 * a)
    t_hi = (-b + sq) / (2.0 * a)
    p_lo = line[0] + d * t_lo
    p_hi = line[0] + d * t_hi
    if distance(p_lo, p_hi) <= MERGE_TOL:
        return (p_lo,)
    return (p_lo, p_hi)


def intersect_circles(
    c1: Vec2, r1: float, c2: Vec2, r2: float
) -> tuple[Vec2, ...]:
    """Intersections of two circles (0, 1 or 2 points)."""
    d = distance(c1, c2)
    if d <= COINCIDENT_TOL:
        return ()  # concentric: none or infinitely many; report none
    if d > r1 + r2 + MERGE_TOL or d < abs(r1 - r2) - MERGE_TOL:
        return ()
    # Distance from c1 to the chord along the center line.
    along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - along * along
    u = (c2 - c1) * (1.0 / d)
    base = c1 + u * along
    if h2 <= MERGE_TOL * MERGE_TOL:
        return (base,)
    h = math.sqrt(h2)
    perp = Vec2(-u.y, u.x) * h
    return (base - perp, base + perp)


def angle_measure(a: Vec2, vertex: Vec2, b: Vec2) -> float:
    """Unsigned angle a-vertex-b in degrees, in [0, 180]."""
    u = a - vertex
    v = b - vertex
    nu, nv = u.norm(), v.norm()
    if nu <= COINCIDENT_TOL or nv <= COINCIDENT_TOL:
        raise DegenerateAngleError("angle ray endpoint coincides with vertex")
    cos = u.dot(v) / (nu * nv)
    cos = max(-1.0, min(1.0, cos))
    return math.degrees(math.acos(cos))


def segment_contains(line: tuple[Vec2, Vec2], p: Vec2, tol: float = 1e-9) -> bool:
    """True when p lies on the segment (endpoints included) within tol."""
    d = line[1] - line[0]
    n = d.norm()
    if n <= COINCIDENT_TOL:
        return distance(line[0], p) <= tol
    w = p - line[0]
    if abs(d.cross(w)) / n > tol:
        return False
    t = d.dot(w) / (n * n)
    return -tol / n <= t <= 1.0 + tol / n
