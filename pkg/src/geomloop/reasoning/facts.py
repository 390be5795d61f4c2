"""Forward-chaining derivation of geometric facts over a logic form.

The rule set is small and fixed:

    R1  triangle angle sum (180 degrees), including the symmetric cases where
        unknown angles are tied together by known equalities
    R2  vertical angles at a crossing point are equal
    R3  base angles of an isosceles triangle are equal
    R4  SAS / SSS / ASA triangle congruence, with corresponding parts
    R5  a rigid transformed copy is congruent to its pre-image (and to any
        triangle its vertices land on exactly), with corresponding parts
    R6  parallel lines cut by a transversal: alternate interior angles equal
    R7  a midpoint splits its segment into equal collinear halves

plus the bookkeeping closure rules (equality transitivity, value propagation
across equal angles). Every fact carries provenance (rule name + premise
facts), so each derivation is an auditable DAG bottoming out in seed facts,
form relations, or direct geometric verification of the form. The fact space
is finite over the form's labels, so the closure always terminates.

Angle and length equalities are checked numerically at EPSILON_FACT to
tolerate float coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

from ..geom import distance, segment_contains
from ..logic_form import LineDecl, LogicForm, PolygonDecl

EPSILON_FACT = 1e-6

FACT_KINDS = (
    "equal_segments",
    "equal_angles",
    "angle_value",
    "parallel",
    "perpendicular",
    "congruent_triangles",
    "collinear",
    "midpoint",
)


@dataclass(frozen=True)
class Fact:
    kind: str
    args: tuple[str, ...]
    value: float | None = None
    rule: str = "seed"
    premises: tuple["Fact", ...] = ()

    def key(self) -> tuple:
        return (self.kind, self.args)

    def describe(self) -> str:
        if self.kind == "angle_value":
            a, v, b = self.args
            return f"angle {a}-{v}-{b} = {self.value:g} degrees"
        if self.kind == "equal_segments":
            p, q, r, s = self.args
            return f"|{p}{q}| = |{r}{s}|"
        if self.kind == "equal_angles":
            a, v, b, c, w, d = self.args
            return f"angle {a}-{v}-{b} = angle {c}-{w}-{d}"
        if self.kind == "congruent_triangles":
            t1, t2 = self.args[:3], self.args[3:]
            return f"triangle {''.join(t1)} congruent to triangle {''.join(t2)}"
        if self.kind == "parallel":
            p, q, r, s = self.args
            return f"{p}{q} parallel to {r}{s}"
        if self.kind == "perpendicular":
            p, q, r, s = self.args
            return f"{p}{q} perpendicular to {r}{s}"
        if self.kind == "midpoint":
            m, p, q = self.args
            return f"{m} is the midpoint of {p}{q}"
        return f"{self.kind}({', '.join(self.args)})"


# --- canonical argument forms ---------------------------------------------------


def seg_key(p: str, q: str) -> tuple[str, str]:
    return (p, q) if p <= q else (q, p)


def angle_key(a: str, v: str, b: str) -> tuple[str, str, str]:
    lo, hi = (a, b) if a <= b else (b, a)
    return (lo, v, hi)


def equal_segments_fact(s1, s2, rule="seed", premises=()) -> Fact | None:
    k1, k2 = seg_key(*s1), seg_key(*s2)
    if k1 == k2:
        return None
    if k2 < k1:
        k1, k2 = k2, k1
    return Fact("equal_segments", k1 + k2, rule=rule, premises=tuple(premises))


def equal_angles_fact(t1, t2, rule="seed", premises=()) -> Fact | None:
    k1, k2 = angle_key(*t1), angle_key(*t2)
    if k1 == k2:
        return None
    if k2 < k1:
        k1, k2 = k2, k1
    return Fact("equal_angles", k1 + k2, rule=rule, premises=tuple(premises))


def angle_value_fact(a, v, b, value, rule="seed", premises=()) -> Fact:
    return Fact(
        "angle_value", angle_key(a, v, b), value=float(value), rule=rule,
        premises=tuple(premises),
    )


def congruence_fact(t1, t2, rule, premises=()) -> Fact | None:
    """Canonical triangle correspondence: minimal over rotations/reflections."""
    if tuple(t1) == tuple(t2):
        return None
    variants = []
    for order in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)):
        u = tuple(t1[i] for i in order)
        w = tuple(t2[i] for i in order)
        variants.append(u + w if u <= w else w + u)
    return Fact(
        "congruent_triangles", min(variants), rule=rule, premises=tuple(premises)
    )


class FactSet:
    """Deduplicating fact store keyed on (kind, canonical args)."""

    def __init__(self, facts: Iterable[Fact] = ()):
        self._facts: dict[tuple, Fact] = {}
        for fact in facts:
            self.add(fact)

    def add(self, fact: Fact | None) -> bool:
        if fact is None:
            return False
        key = fact.key()
        if key in self._facts:
            return False
        self._facts[key] = fact
        return True

    def get(self, kind: str, args: tuple[str, ...]) -> Fact | None:
        return self._facts.get((kind, args))

    def angle_value(self, a: str, v: str, b: str) -> Fact | None:
        return self._facts.get(("angle_value", angle_key(a, v, b)))

    def by_kind(self, kind: str) -> list[Fact]:
        return [f for (k, _), f in self._facts.items() if k == kind]

    def keys(self) -> set[tuple]:
        return set(self._facts)

    def __contains__(self, fact: Fact) -> bool:
        return fact.key() in self._facts

    def __iter__(self) -> Iterator[Fact]:
        return iter(self._facts.values())

    def __len__(self) -> int:
        return len(self._facts)

    def copy(self) -> "FactSet":
        out = FactSet()
        out._facts = dict(self._facts)
        return out


# --- seeds from declared relations ----------------------------------------------


def seed_facts(lf: LogicForm, measured_midpoints: bool = False) -> FactSet:
    """Facts stated directly by the form's relations.

    With measured_midpoints=True, also seeds midpoint facts for named points
    sitting exactly (1e-9) at the midpoint of a connected pair; constructions
    place such points by exact arithmetic, so the measurement is sound.
    """
    out = FactSet()
    for rel in lf.relations:
        rule = f"given:{rel.kind}"
        if rel.kind == "equal_length":
            out.add(equal_segments_fact(rel.args[0], rel.args[1], rule=rule))
        elif rel.kind == "parallel":
            (p, q), (r, s) = rel.args
            out.add(Fact("parallel", seg_key(p, q) + seg_key(r, s), rule=rule))
        elif rel.kind == "perpendicular":
            (p, q), (r, s) = rel.args
            out.add(Fact("perpendicular", seg_key(p, q) + seg_key(r, s), rule=rule))
        elif rel.kind == "fixed_angle":
            a, v, b = rel.args
            out.add(angle_value_fact(a, v, b, rel.value, rule=rule))
        elif rel.kind == "collinear":
            out.add(Fact("collinear", tuple(sorted(rel.args)), rule=rule))
        elif rel.kind == "midpoint":
            m, (p, q) = rel.args
            out.add(Fact("midpoint", (m,) + seg_key(p, q), rule=rule))
        elif rel.kind == "point_on_line":
            p, (a, b) = rel.args
            out.add(Fact("collinear", tuple(sorted((p, a, b))), rule=rule))
    if measured_midpoints:
        geo = _FormGeometry(lf)
        names = [p.name for p in lf.points]
        for p, q in combinations(names, 2):
            if not geo.connected(p, q):
                continue
            mid = (lf.vec(p) + lf.vec(q)) * 0.5
            for m in names:
                if m in (p, q):
                    continue
                if distance(lf.vec(m), mid) <= 1e-9:
                    out.add(
                        Fact("midpoint", (m,) + seg_key(p, q), rule="measured:midpoint")
                    )
    return out


# --- geometric context -------------------------------------------------------------


class _FormGeometry:
    """Carrier segments, connectivity, and triangle enumeration for one form.

    Everything is derived once per form and cached: the rules re-query these
    heavily during the fixpoint loop and during construction simulations.
    """

    def __init__(self, lf: LogicForm):
        self.lf = lf
        self.segments: list[tuple[str, str]] = []  # named endpoints, declared carriers
        seen: set[tuple[str, str]] = set()
        for obj in lf.objects:
            edges: list[tuple[str, str]] = []
            if isinstance(obj, LineDecl):
                edges = [obj.points]
            elif isinstance(obj, PolygonDecl):
                pts = obj.points
                edges = [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
            for p, q in edges:
                key = seg_key(p, q)
                if key not in seen and p != q:
                    seen.add(key)
                    self.segments.append(key)
        self._carriers = [(lf.vec(p), lf.vec(q)) for p, q in self.segments]
        # on_carrier[i] = names of all points lying on carrier i, within tolerance
        self._on_carrier: list[set[str]] = []
        for seg in self._carriers:
            names = {
                p.name
                for p in lf.points
                if segment_contains(seg, p.vec, EPSILON_FACT)
            }
            self._on_carrier.append(names)
        self._connected: dict[tuple[str, str], bool] = {}
        self._triangles: list[tuple[str, str, str]] | None = None
        self._crossings: dict[str, list[tuple[str, str]]] | None = None

    def connected(self, p: str, q: str) -> bool:
        """True when some drawn carrier contains both points within tolerance."""
        if p == q:
            return False
        key = (p, q) if p <= q else (q, p)
        cached = self._connected.get(key)
        if cached is None:
            cached = any(p in names and q in names for names in self._on_carrier)
            self._connected[key] = cached
        return cached

    def triangles(self) -> list[tuple[str, str, str]]:
        """Pairwise-connected, non-collinear point triples (sorted labels)."""
        if self._triangles is not None:
            return self._triangles
        names = [p.name for p in self.lf.points]
        out = []
        for a, b, c in combinations(names, 3):
            if not (
                self.connected(a, b) and self.connected(b, c) and self.connected(a, c)
            ):
                continue
            va, vb, vc = self.lf.vec(a), self.lf.vec(b), self.lf.vec(c)
            area2 = abs((vb - va).cross(vc - va))
            if area2 <= EPSILON_FACT:
                continue
            out.append((a, b, c))
        self._triangles = out
        return out

    def crossing_segments(self, x: str) -> list[tuple[str, str]]:
        """Segments whose interior strictly contains the named point x."""
        if self._crossings is None:
            self._crossings = {}
        cached = self._crossings.get(x)
        if cached is not None:
            return cached
        v = self.lf.vec(x)
        out = []
        for i, (p, q) in enumerate(self.segments):
            if x in (p, q) or x not in self._on_carrier[i]:
                continue
            seg = self._carriers[i]
            if (
                distance(seg[0], v) > EPSILON_FACT
                and distance(seg[1], v) > EPSILON_FACT
            ):
                out.append((p, q))
        self._crossings[x] = out
        return out


# --- equivalence classes with provenance -------------------------------------------


class _Classes:
    """Union-find over canonical keys; remembers the facts that joined them."""

    def __init__(self):
        self.parent: dict[tuple, tuple] = {}
        self.reason: dict[tuple, Fact] = {}  # edge fact that merged child -> parent

    def find(self, key: tuple) -> tuple:
        root = key
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        return root

    def union(self, a: tuple, b: tuple, fact: Fact):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        self.parent[rb] = ra
        self.reason[rb] = fact

    def same(self, a: tuple, b: tuple) -> bool:
        return self.find(a) == self.find(b)

    def path_facts(self, a: tuple, b: tuple) -> tuple[Fact, ...]:
        """Facts along both root paths; a superset justification of a == b."""
        out: list[Fact] = []
        for start in (a, b):
            node = start
            while self.parent.get(node, node) != node:
                out.append(self.reason[node])
                node = self.parent[node]
        # dedupe, preserve order
        seen: set[tuple] = set()
        unique = []
        for fact in out:
            if fact.key() not in seen:
                seen.add(fact.key())
                unique.append(fact)
        return tuple(unique)


def _segment_classes(facts: FactSet) -> _Classes:
    classes = _Classes()
    for fact in facts.by_kind("equal_segments"):
        classes.union(fact.args[:2], fact.args[2:], fact)
    return classes


def _angle_classes(facts: FactSet) -> _Classes:
    classes = _Classes()
    for fact in facts.by_kind("equal_angles"):
        classes.union(fact.args[:3], fact.args[3:], fact)
    return classes


# --- individual rules ----------------------------------------------------------------


def _rule_angle_sum(lf, geo, facts: FactSet) -> list[Fact]:
    out: list[Fact] = []
    angle_eq = _angle_classes(facts)
    for a, b, c in geo.triangles():
        corners = [
            angle_key(b, a, c),
            angle_key(a, b, c),
            angle_key(a, c, b),
        ]
        values = [facts.get("angle_value", k) for k in corners]
        known = [(k, f) for k, f in zip(corners, values) if f is not None]
        unknown = [k for k, f in zip(corners, values) if f is None]
        if len(known) == 2 and len(unknown) == 1:
            total = known[0][1].value + known[1][1].value  # type: ignore[operator]
            rest = 180.0 - total
            if 0.0 < rest < 180.0:
                out.append(
                    Fact(
                        "angle_value",
                        unknown[0],
                        value=rest,
                        rule="R1:angle_sum",
                        premises=(known[0][1], known[1][1]),
                    )
                )
        elif len(known) == 1 and angle_eq.same(unknown[0], unknown[1]):
            each = (180.0 - known[0][1].value) / 2.0  # type: ignore[operator]
            if 0.0 < each < 180.0:
                premises = (known[0][1],) + angle_eq.path_facts(unknown[0], unknown[1])
                for key in unknown:
                    out.append(
                        Fact(
                            "angle_value",
                            key,
                            value=each,
                            rule="R1:angle_sum",
                            premises=premises,
                        )
                    )
        elif (
            len(known) == 0
            and angle_eq.same(corners[0], corners[1])
            and angle_eq.same(corners[1], corners[2])
        ):
            premises = angle_eq.path_facts(corners[0], corners[1]) + angle_eq.path_facts(
                corners[1], corners[2]
            )
            for key in corners:
                out.append(
                    Fact(
                        "angle_value",
                        key,
                        value=60.0,
                        rule="R1:angle_sum",
                        premises=premises,
                    )
                )
    return out


def _rule_vertical_angles(lf, geo, facts: FactSet) -> list[Fact]:
    out: list[Fact] = []
    for x in (p.name for p in lf.points):
        crossing = geo.crossing_segments(x)
        for (a, b), (c, d) in combinations(crossing, 2):
            if len({a, b, c, d, x}) != 5:
                continue
            u = lf.vec(b) - lf.vec(a)
            w = lf.vec(d) - lf.vec(c)
            denom = u.norm() * w.norm()
            # Two genuinely distinct lines: collinear carriers make no angles.
            if denom <= 0 or abs(u.cross(w)) / denom <= 1e-9:
                continue
            out.append(
                equal_angles_fact((a, x, c), (b, x, d), rule="R2:vertical_angles")
            )
            out.append(
                equal_angles_fact((a, x, d), (b, x, c), rule="R2:vertical_angles")
            )
    return [f for f in out if f is not None]


def _rule_isosceles(lf, geo, facts: FactSet) -> list[Fact]:
    out: list[Fact] = []
    seg_eq = _segment_classes(facts)
    for a, b, c in geo.triangles():
        for apex, p, q in ((a, b, c), (b, a, c), (c, a, b)):
            s1, s2 = seg_key(apex, p), seg_key(apex, q)
            if seg_eq.same(s1, s2):
                fact = equal_angles_fact(
                    (apex, p, q),
                    (apex, q, p),
                    rule="R3:isosceles_base_angles",
                    premises=seg_eq.path_facts(s1, s2),
                )
                if fact is not None:
                    out.append(fact)
    return out


def _corresponding_parts(t1, t2, base: Fact) -> list[Fact]:
    parts: list[Fact] = []
    pairs = ((0, 1), (1, 2), (0, 2))
    for i, j in pairs:
        fact = equal_segments_fact(
            (t1[i], t1[j]), (t2[i], t2[j]), rule="corresponding_parts", premises=(base,)
        )
        if fact is not None:
            parts.append(fact)
    for v, i, j in ((0, 1, 2), (1, 0, 2), (2, 0, 1)):
        fact = equal_angles_fact(
            (t1[i], t1[v], t1[j]),
            (t2[i], t2[v], t2[j]),
            rule="corresponding_parts",
            premises=(base,),
        )
        if fact is not None:
            parts.append(fact)
    return parts


def _rule_congruence(lf, geo, facts: FactSet) -> list[Fact]:
    out: list[Fact] = []
    seg_eq = _segment_classes(facts)
    angle_eq = _angle_classes(facts)
    triangles = geo.triangles()

    def side_equal(s1, s2):
        k1, k2 = seg_key(*s1), seg_key(*s2)
        if k1 == k2:
            return ()
        if seg_eq.same(k1, k2):
            return seg_eq.path_facts(k1, k2)
        return None

    def angle_equal(a1, a2):
        k1, k2 = angle_key(*a1), angle_key(*a2)
        if k1 == k2:
            return ()
        if angle_eq.same(k1, k2):
            return angle_eq.path_facts(k1, k2)
        f1, f2 = facts.get("angle_value", k1), facts.get("angle_value", k2)
        if f1 is not None and f2 is not None and abs(f1.value - f2.value) <= EPSILON_FACT:
            return (f1, f2)
        return None

    orders = ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2))
    for t1 in triangles:
        for t2 in triangles:
            for order in orders:
                u = t1
                w = tuple(t2[i] for i in order)
                if u == w:
                    continue
                sides_u = ((u[0], u[1]), (u[1], u[2]), (u[0], u[2]))
                sides_w = ((w[0], w[1]), (w[1], w[2]), (w[0], w[2]))
                side_proofs = [side_equal(su, sw) for su, sw in zip(sides_u, sides_w)]
                angles_u = ((u[1], u[0], u[2]), (u[0], u[1], u[2]), (u[0], u[2], u[1]))
                angles_w = ((w[1], w[0], w[2]), (w[0], w[1], w[2]), (w[0], w[2], w[1]))
                angle_proofs = [
                    angle_equal(au, aw) for au, aw in zip(angles_u, angles_w)
                ]
                premises: tuple[Fact, ...] | None = None
                rule = ""
                if all(p is not None for p in side_proofs):
                    premises = tuple(
                        f for proof in side_proofs for f in proof  # type: ignore[union-attr]
                    )
                    rule = "R4:SSS"
                else:
                    # SAS: two sides with the included angle.
                    for (i, j), v in (((0, 1), 1), ((1, 2), 2), ((0, 2), 0)):
                        if (
                            side_proofs[i] is not None
                            and side_proofs[j] is not None
                            and angle_proofs[v] is not None
                        ):
                            premises = tuple(side_proofs[i]) + tuple(
                                side_proofs[j]
                            ) + tuple(angle_proofs[v])
                            rule = "R4:SAS"
                            break
                    if premises is None:
                        # ASA: two angles with the included side.
                        for (i, j), s in (((0, 1), 0), ((1, 2), 1), ((0, 2), 2)):
                            if (
                                angle_proofs[i] is not None
                                and angle_proofs[j] is not None
                                and side_proofs[s] is not None
                            ):
                                premises = tuple(angle_proofs[i]) + tuple(
                                    angle_proofs[j]
                                ) + tuple(side_proofs[s])
                                rule = "R4:ASA"
                                break
                if premises is None:
                    continue
                base = congruence_fact(u, w, rule=rule, premises=premises)
                if base is None or base in facts:
                    continue
                out.append(base)
                out.extend(_corresponding_parts(u, w, base))
    return out


def _strip_primes(label: str) -> str:
    return label.rstrip("'")


def _rigid_copy_parts(lf, src, dst, rule) -> list[Fact]:
    """Congruence + corresponding parts when dst is a verified rigid image of src."""
    out = []
    if len(src) == 3:
        base = congruence_fact(src, dst, rule=rule)
        if base is not None:
            out.append(base)
            out.extend(_corresponding_parts(src, dst, base))
            return out
    # Non-triangle polygons still contribute their corresponding edges.
    n = len(src)
    for i in range(n):
        j = (i + 1) % n
        fact = equal_segments_fact((src[i], src[j]), (dst[i], dst[j]), rule=rule)
        if fact is not None:
            out.append(fact)
    return out


def _distances_match(lf, a: tuple[str, ...], b: tuple[str, ...]) -> bool:
    for i, j in combinations(range(len(a)), 2):
        da = distance(lf.vec(a[i]), lf.vec(a[j]))
        db = distance(lf.vec(b[i]), lf.vec(b[j]))
        if abs(da - db) > EPSILON_FACT:
            return False
    return True


def _rule_rigid_transform(lf, geo, facts: FactSet) -> list[Fact]:
    """Copies produced by reflect/rotate/translate: primed labels, exact geometry."""
    out: list[Fact] = []
    polygons = [o for o in lf.objects if isinstance(o, PolygonDecl)]
    names = {p.name for p in lf.points}
    for poly in polygons:
        if not poly.aux:
            continue
        dst = poly.points
        src = tuple(_strip_primes(p) for p in dst)
        if src == dst or any(s not in names for s in src):
            continue
        if len(set(src)) != len(src):
            continue
        if not _distances_match(lf, src, dst):
            continue
        out.extend(_rigid_copy_parts(lf, src, dst, "R5:rigid_transform"))
        # The copy may land pointwise on other named points; the rigid motion
        # then carries the pre-image exactly onto that triangle.
        landed: list[str] = []
        for q in dst:
            if _strip_primes(q) == q:
                landed.append(q)
                continue
            vq = lf.vec(q)
            hits = sorted(
                name
                for name in names
                if name != q
                and _strip_primes(name) == name
                and distance(lf.vec(name), vq) <= EPSILON_FACT
            )
            if not hits:
                landed = []
                break
            landed.append(hits[0])
        if landed and len(set(landed)) == len(landed) and tuple(landed) != src:
            out.extend(
                _rigid_copy_parts(lf, src, tuple(landed), "R5:rigid_transform")
            )
    return out


def _rule_alternate_angles(lf, geo, facts: FactSet) -> list[Fact]:
    out: list[Fact] = []
    for par in facts.by_kind("parallel"):
        a, b, c, d = par.args
        line1 = (lf.vec(a), lf.vec(b))
        line2 = (lf.vec(c), lf.vec(d))
        for x, y in geo.segments:
            vx, vy = lf.vec(x), lf.vec(y)
            on1 = [p for p in (x, y) if segment_contains(line1, lf.vec(p), EPSILON_FACT)]
            on2 = [p for p in (x, y) if segment_contains(line2, lf.vec(p), EPSILON_FACT)]
            if len(on1) != 1 or len(on2) != 1 or on1[0] == on2[0]:
                continue
            px, py = on1[0], on2[0]
            t = lf.vec(py) - lf.vec(px)
            if t.norm() <= EPSILON_FACT:
                continue
            for e1 in (a, b):
                for e2 in (c, d):
                    v1 = lf.vec(e1) - lf.vec(px)
                    v2 = lf.vec(e2) - lf.vec(py)
                    s1, s2 = t.cross(v1), t.cross(v2)
                    if abs(s1) <= EPSILON_FACT or abs(s2) <= EPSILON_FACT:
                        continue
                    if (s1 > 0) != (s2 > 0):  # opposite sides: alternate interior
                        fact = equal_angles_fact(
                            (e1, px, py),
                            (e2, py, px),
                            rule="R6:alternate_interior",
                            premises=(par,),
                        )
                        if fact is not None:
                            out.append(fact)
    return out


def _rule_midpoint(lf, geo, facts: FactSet) -> list[Fact]:
    out: list[Fact] = []
    for fact in facts.by_kind("midpoint"):
        m, p, q = fact.args
        half = equal_segments_fact(
            (p, m), (m, q), rule="R7:midpoint_halves", premises=(fact,)
        )
        if half is not None:
            out.append(half)
        out.append(
            Fact(
                "collinear",
                tuple(sorted((p, m, q))),
                rule="R7:midpoint_halves",
                premises=(fact,),
            )
        )
    return out


def _rule_equality_closure(lf, geo, facts: FactSet) -> list[Fact]:
    """Transitivity of equalities and value propagation across equal angles."""
    out: list[Fact] = []
    for kind, builder in (
        ("equal_segments", equal_segments_fact),
        ("equal_angles", equal_angles_fact),
    ):
        width = 2 if kind == "equal_segments" else 3
        classes = _Classes()
        members: dict[tuple, list[tuple]] = {}
        for fact in facts.by_kind(kind):
            lhs, rhs = fact.args[:width], fact.args[width:]
            classes.union(lhs, rhs, fact)
        for fact in facts.by_kind(kind):
            for part in (fact.args[:width], fact.args[width:]):
                members.setdefault(classes.find(part), [])
                if part not in members[classes.find(part)]:
                    members[classes.find(part)].append(part)
        for group in members.values():
            for u, w in combinations(sorted(group), 2):
                new = builder(u, w, rule="equality_closure", premises=classes.path_facts(u, w))
                if new is not None and new not in facts:
                    out.append(new)
    # propagate angle values across equal angles
    for eq in facts.by_kind("equal_angles"):
        lhs, rhs = eq.args[:3], eq.args[3:]
        for src, dst in ((lhs, rhs), (rhs, lhs)):
            val = facts.get("angle_value", src)
            if val is not None and facts.get("angle_value", dst) is None:
                out.append(
                    Fact(
                        "angle_value",
                        dst,
                        value=val.value,
                        rule="equal_angle_value",
                        premises=(eq, val),
                    )
                )
    return out


_RULES = (
    _rule_midpoint,
    _rule_vertical_angles,
    _rule_isosceles,
    _rule_alternate_angles,
    _rule_rigid_transform,
    _rule_equality_closure,
    _rule_angle_sum,
    _rule_congruence,
)


def derive_facts(lf: LogicForm, seed: FactSet | Iterable[Fact]) -> FactSet:
    """Forward chaining to fixpoint; monotone and idempotent."""
    facts = seed.copy() if isinstance(seed, FactSet) else FactSet(seed)
    geo = _FormGeometry(lf)
    for _ in range(100):  # bounded fact universe; cap is defensive
        added = False
        for rule in _RULES:
            for fact in rule(lf, geo, facts):
                if facts.add(fact):
                    added = True
        if not added:
            break
    return facts


def validate_provenance(facts: FactSet, lf: LogicForm) -> list[str]:
    """Check every fact's proof DAG: acyclic, grounded, labels resolve."""
    problems: list[str] = []
    names = set(lf.point_map)
    state: dict[tuple, int] = {}  # 1 = visiting, 2 = done

    def visit(fact: Fact, depth: int):
        key = fact.key()
        if state.get(key) == 2:
            return
        if state.get(key) == 1 or depth > 10_000:
            problems.append(f"cycle through {fact.kind}{fact.args}")
            return
        state[key] = 1
        for label in fact.args:
            if label not in names:
                problems.append(f"{fact.kind}{fact.args}: unknown label {label}")
        for premise in fact.premises:
            visit(premise, depth + 1)
        state[key] = 2

    for fact in facts:
        visit(fact, 0)
    return problems


# --- derived length ratios -------------------------------------------------------


def segment_ratio(
    facts: FactSet, s1: tuple[str, str], s2: tuple[str, str]
) -> Fraction | None:
    """|s1| : |s2| when derivable from equalities and midpoint halving."""
    # Weighted union-find: weight(node) = |node| / |root| as an exact fraction.
    parent: dict[tuple, tuple] = {}
    weight: dict[tuple, Fraction] = {}

    def find(key) -> tuple[tuple, Fraction]:
        if key not in parent:
            parent[key] = key
            weight[key] = Fraction(1)
            return key, Fraction(1)
        path = []
        node = key
        while parent[node] != node:
            path.append(node)
            node = parent[node]
        w = Fraction(1)
        for step in reversed(path):
            w *= weight[step]
            parent[step] = node
            weight[step] = w
        return node, weight[key]

    def union(a, b, ratio: Fraction):
        # |a| = ratio * |b|
        ra, wa = find(a)
        rb, wb = find(b)
        if ra == rb:
            return
        # |a| = wa * |ra|; |b| = wb * |rb|  =>  |ra| = ratio * wb / wa * |rb|
        parent[ra] = rb
        weight[ra] = ratio * wb / wa

    for fact in facts.by_kind("equal_segments"):
        union(fact.args[:2], fact.args[2:], Fraction(1))
    for fact in facts.by_kind("midpoint"):
        m, p, q = fact.args
        union(seg_key(p, m), seg_key(p, q), Fraction(1, 2))
        union(seg_key(m, q), seg_key(p, q), Fraction(1, 2))

    k1, k2 = seg_key(*s1), seg_key(*s2)
    if k1 == k2:
        return Fraction(1)
    r1, w1 = find(k1)
    r2, w2 = find(k2)
    if r1 != r2:
        return None
    return w1 / w2
