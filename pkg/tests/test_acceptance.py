"""Acceptance suite: one test per exit criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are pinned here, not configurable.
"""

import math
import time

import numpy as np

from geomloop.actions import Rotate, execute
from geomloop.answers import Descriptor, Numerical, Ratio
from geomloop.constraints import (
    compile_system,
    error_gradient,
    pack_params,
    solve,
)
from geomloop.constraints import backend
from geomloop.geom import (
    Vec2,
    angle_measure,
    distance,
    reflection_map,
    rotation_map,
    translation_map,
)
from geomloop.harness import r_format, r_result, run_episode, stats
from geomloop.logic_form import (
    CircleDecl,
    LineDecl,
    PointDecl,
    RelationDecl,
    make_form,
    parse_logic_form,
    serialize_logic_form,
    validate,
)
from geomloop.reasoning import RuleProver, ScriptedReasoner, validate_provenance
from geomloop.reasoning.facts import derive_facts, seed_facts
from geomloop.render import render_svg

from conftest import desk_problems, gold_problems, square_form
from test_actions import random_action
from test_constraints import random_relation_form


def report(index: int, description: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {index}: {status} - {description}{suffix}")
    assert ok, f"criterion {index} failed: {description} {suffix}"


def test_criterion_1_transform_laws():
    rng = np.random.default_rng(11)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        center = Vec2(float(rng.uniform(-10, 10)), float(rng.uniform(-10, 10)))
        degrees = float(rng.uniform(-720, 720))
        axis_a = Vec2(float(rng.uniform(-10, 10)), float(rng.uniform(-10, 10)))
        axis_b = axis_a + Vec2(float(rng.uniform(0.2, 5)), float(rng.uniform(0.2, 5)))
        shift = Vec2(float(rng.uniform(-10, 10)), float(rng.uniform(-10, 10)))
        p = Vec2(float(rng.uniform(-20, 20)), float(rng.uniform(-20, 20)))
        q = Vec2(float(rng.uniform(-20, 20)), float(rng.uniform(-20, 20)))

        full_turn = rotation_map(center, 360.0)
        worst = max(worst, distance(full_turn.apply(p), p))

        mirror = reflection_map(axis_a, axis_b)
        worst = max(worst, distance(mirror.apply(mirror.apply(p)), p))

        back_and_forth = translation_map(shift).compose(translation_map(-shift))
        worst = max(worst, distance(back_and_forth.apply(p), p))

        for rigid in (rotation_map(center, degrees), mirror, translation_map(shift)):
            worst = max(
                worst,
                abs(distance(rigid.apply(p), rigid.apply(q)) - distance(p, q)),
            )
    elapsed = time.perf_counter() - start
    report(
        1,
        "rigid-map laws over 10,000 randomized cases",
        worst < 1e-9 and elapsed < 5.0,
        f"max deviation {worst:.2e}, {elapsed:.2f}s",
    )


def test_criterion_2_gradient_oracle():
    kinds = [
        "point_on_line",
        "point_on_circle",
        "perpendicular",
        "parallel",
        "equal_length",
        "fixed_length",
        "fixed_angle",
        "collinear",
        "midpoint",
    ]
    rng = np.random.default_rng(22)
    start = time.perf_counter()
    samples = 0
    worst = 0.0
    h = 1e-6
    while samples < 1000:
        lf = random_relation_form(kinds[samples % len(kinds)], rng)
        params = pack_params(lf)
        analytic = error_gradient(lf, params)
        system = compile_system(lf)
        from geomloop.constraints import _free_slots

        slots = _free_slots(system, params.free)
        fd = np.zeros_like(analytic)
        for i in range(len(fd)):
            for sign in (1.0, -1.0):
                xy = system.xy.copy()
                values = params.values.copy()
                values[i] += sign * h
                xy[slots] = values
                energy, _ = backend.energy_gradient(
                    xy, system.codes, system.pidx, system.vals, system.rows
                )
                fd[i] += sign * energy
        fd /= 2 * h
        scale = max(1.0, float(np.max(np.abs(fd))))
        worst = max(worst, float(np.max(np.abs(analytic - fd))) / scale)
        samples += 1
    elapsed = time.perf_counter() - start
    report(
        2,
        "analytic gradient vs central finite differences on 1000 samples",
        worst < 1e-5 and elapsed < 10.0,
        f"max relative error {worst:.2e}, {elapsed:.2f}s",
    )


# --- criterion 3: independent residual recomputation (brute-force oracle) -----


def oracle_total_error(lf) -> float:
    """Recompute E from the relation list with plain math, solver-free."""
    pts = {p.name: (p.x, p.y) for p in lf.points}
    radii = {o.center: o.radius for o in lf.objects if isinstance(o, CircleDecl)}

    def vec(a, b):
        return (pts[b][0] - pts[a][0], pts[b][1] - pts[a][1])

    def norm(v):
        return math.hypot(v[0], v[1])

    total = 0.0
    for rel in lf.relations:
        if rel.kind == "fixed_length":
            (a, b), = rel.args
            r = norm(vec(a, b)) - rel.value
            total += r * r
        elif rel.kind == "perpendicular":
            (a, b), (c, d) = rel.args
            u, w = vec(a, b), vec(c, d)
            r = (u[0] * w[0] + u[1] * w[1]) / (norm(u) * norm(w))
            total += r * r
        elif rel.kind == "parallel":
            (a, b), (c, d) = rel.args
            u, w = vec(a, b), vec(c, d)
            r = (u[0] * w[1] - u[1] * w[0]) / (norm(u) * norm(w))
            total += r * r
        elif rel.kind == "equal_length":
            (a, b), (c, d) = rel.args
            u, w = vec(a, b), vec(c, d)
            r = (u[0] ** 2 + u[1] ** 2) - (w[0] ** 2 + w[1] ** 2)
            total += r * r
        elif rel.kind == "point_on_circle":
            p, center = rel.args
            r = norm(vec(center, p)) - radii[center]
            total += r * r
        elif rel.kind == "point_on_line":
            p, (a, b) = rel.args
            d = vec(a, b)
            w = vec(a, p)
            r = (d[0] * w[1] - d[1] * w[0]) / norm(d)
            total += r * r
        elif rel.kind == "fixed_angle":
            a, v, b = rel.args
            u, w = vec(v, a), vec(v, b)
            cos = (u[0] * w[0] + u[1] * w[1]) / (norm(u) * norm(w))
            r = math.degrees(math.acos(max(-1.0, min(1.0, cos)))) - rel.value
            total += r * r
        elif rel.kind == "collinear":
            a, b, c = rel.args
            u, w = vec(a, b), vec(a, c)
            r = u[0] * w[1] - u[1] * w[0]
            total += r * r
        else:  # midpoint
            m, (p, q) = rel.args
            total += (2 * pts[m][0] - pts[p][0] - pts[q][0]) ** 2
            total += (2 * pts[m][1] - pts[p][1] - pts[q][1]) ** 2
    return total


def repair_configurations():
    """Five consistent hand-authored figures for perturb-and-repair runs."""
    configs = {"square": square_form()}
    side = 4.0
    h = side * math.sqrt(3) / 2
    configs["equilateral"] = make_form(
        [PointDecl("A", 0, 0), PointDecl("B", side, 0), PointDecl("C", side / 2, h)],
        relations=[
            RelationDecl("fixed_length", (("A", "B"),), side),
            RelationDecl("fixed_length", (("B", "C"),), side),
            RelationDecl("fixed_length", (("C", "A"),), side),
        ],
    )
    configs["right_triangle"] = make_form(
        [PointDecl("A", 0, 0), PointDecl("B", 3, 0), PointDecl("C", 0, 4)],
        relations=[
            RelationDecl("fixed_length", (("A", "B"),), 3.0),
            RelationDecl("fixed_length", (("A", "C"),), 4.0),
            RelationDecl("perpendicular", (("A", "B"), ("A", "C"))),
        ],
    )
    on_circle = []
    pts = [PointDecl("O", 0, 0)]
    for i, theta in enumerate((0.0, 90.0, 180.0, 30.0)):
        rad = math.radians(theta)
        pts.append(PointDecl(f"P{i}", 5 * math.cos(rad), 5 * math.sin(rad)))
        on_circle.append(RelationDecl("point_on_circle", (f"P{i}", "O")))
    configs["inscribed"] = make_form(pts, [CircleDecl("O", 5.0)], on_circle)
    configs["midpoint_chain"] = make_form(
        [
            PointDecl("A", 0, 0),
            PointDecl("B", 8, 0),
            PointDecl("M", 4, 0),
            PointDecl("N", 6, 0),
        ],
        relations=[
            RelationDecl("fixed_length", (("A", "B"),), 8.0),
            RelationDecl("midpoint", ("M", ("A", "B"))),
            RelationDecl("midpoint", ("N", ("M", "B"))),
        ],
    )
    return configs


def test_criterion_3_solver_repair():
    rng = np.random.default_rng(33)
    start = time.perf_counter()
    attempts = 0
    successes = 0
    for name, base in repair_configurations().items():
        assert oracle_total_error(base) < 1e-18, f"{name} seed must be consistent"
        for _ in range(100):
            points = []
            for p in base.points:
                angle = rng.uniform(0, 2 * math.pi)
                radius = rng.uniform(0, 0.05)
                points.append(
                    PointDecl(
                        p.name,
                        p.x + radius * math.cos(angle),
                        p.y + radius * math.sin(angle),
                    )
                )
            broken = make_form(points, base.objects, base.relations)
            repaired, rep = solve(broken)
            attempts += 1
            # Brute-force oracle: recompute the error of the output directly.
            if rep.converged and rep.iterations <= 500 and oracle_total_error(repaired) < 1e-10:
                successes += 1
    elapsed = time.perf_counter() - start
    rate = successes / attempts
    report(
        3,
        "L-BFGS repair of 500 perturbed figures, oracle-verified",
        rate >= 0.95 and elapsed < 30.0,
        f"success {successes}/{attempts} ({100 * rate:.1f}%), {elapsed:.2f}s",
    )


def test_criterion_4_round_trip_and_render_determinism():
    rng = np.random.default_rng(44)
    ok = True
    names = ["A", "B", "C", "D", "E", "F"]
    for _ in range(50):
        count = int(rng.integers(2, 7))
        chosen = names[:count]
        points = [
            PointDecl(
                n,
                round(float(rng.uniform(-50, 50)), 6),
                round(float(rng.uniform(-50, 50)), 6),
            )
            for n in chosen
        ]
        objects = [LineDecl((chosen[0], chosen[1]))]
        if count >= 3:
            objects.append(LineDecl((chosen[1], chosen[2])))
        relations = [
            RelationDecl("fixed_length", ((chosen[0], chosen[1]),), float(rng.integers(1, 9)))
        ]
        lf = make_form(points, objects, relations, {"goal": "angle A B C"})
        doc = serialize_logic_form(lf)
        back = parse_logic_form(doc)
        ok = ok and back == lf and serialize_logic_form(back) == doc
        ok = ok and render_svg(lf) == render_svg(back) == render_svg(lf)
    report(4, "parse/serialize round-trip on 50 forms + byte-stable rendering", ok)


def test_criterion_5_executor_soundness():
    rng = np.random.default_rng(55)
    ok = True
    for _ in range(40):
        lf = square_form()
        for _ in range(20):
            action = random_action(lf, rng)
            try:
                result = execute(lf, action)
            except Exception:
                continue
            if validate(result.next_form) != []:
                ok = False
            lf = result.next_form
    # The quarter-turn example, checked with the distance/angle oracle.
    nf = execute(square_form(), Rotate("triangle_ABC", "B", 90)).next_form
    ok = ok and abs(
        distance(nf.vec("B"), nf.vec("A'")) - distance(nf.vec("B"), nf.vec("A"))
    ) < 1e-9
    ok = ok and abs(
        angle_measure(nf.vec("A"), nf.vec("B"), nf.vec("A'")) - 90.0
    ) < 1e-9
    report(5, "randomized action sequences keep forms valid; quarter-turn oracle", ok)


def test_criterion_6_loop_replay():
    problems = gold_problems()
    assert len(problems) == 10
    ok = True
    details = []
    for problem in problems:
        trajectory = run_episode(problem, ScriptedReasoner(problem.gold_proof))
        fmt = r_format(trajectory)
        res = r_result(trajectory.terminal_answer, problem)
        # Frame-chain invariant, bit-exact under canonical serialization.
        current = trajectory.frames[0]
        chain_ok = True
        for step, frame in zip(trajectory.steps, trajectory.frames[1:]):
            current = execute(current, step.action).next_form
            chain_ok = chain_ok and (
                serialize_logic_form(current) == serialize_logic_form(frame)
            )
        if not (fmt == 1 and res == 1 and chain_ok):
            ok = False
            details.append(problem.id)
    report(
        6,
        "scripted replay of 10 gold trajectories: rewards 1/1, frame chain bit-exact",
        ok,
        f"failing: {details}" if details else "10/10",
    )


def test_criterion_7_rule_prover_desk_set():
    problems = desk_problems()
    assert len(problems) == 8
    start = time.perf_counter()
    solved = 0
    provenance_ok = True
    for problem in problems:
        trajectory = run_episode(problem, RuleProver(), max_steps=8)
        solved += r_result(trajectory.terminal_answer, problem)
        final = trajectory.frames[-1]
        closure = derive_facts(final, seed_facts(final, measured_midpoints=True))
        if validate_provenance(closure, final):
            provenance_ok = False
    elapsed = time.perf_counter() - start
    report(
        7,
        "rule prover solves the 8-problem desk set autonomously",
        solved >= 5 and provenance_ok and elapsed < 60.0,
        f"solved {solved}/8, provenance {'ok' if provenance_ok else 'BROKEN'}, {elapsed:.2f}s",
    )


def test_criterion_8_reward_semantics():
    problems = gold_problems()
    ratio_problem = next(
        p for p in problems if p.gold_answer == Ratio(2, 1)
    )
    third = next(p for p in problems if p.gold_answer == Ratio(1, 2))
    numerical = next(p for p in problems if p.gold_answer == Numerical(45.0, "degrees"))
    descriptor = next(p for p in problems if isinstance(p.gold_answer, Descriptor))
    checks = [
        r_result(Ratio(2, 1), ratio_problem) == 1,
        r_result(Descriptor("2:1"), ratio_problem) == 1,
        r_result(Ratio(4, 2), ratio_problem) == 1,
        r_result(Ratio(1, 2), ratio_problem) == 0,
        r_result(Descriptor("1/2"), third) == 1,
        r_result(Numerical(45.0), numerical) == 1,
        r_result(Numerical(45.0 + 1e-8), numerical) == 1,
        r_result(Numerical(44.9), numerical) == 0,
        r_result(None, numerical) == 0,
        r_result(Descriptor("scalene"), descriptor) == 0,
    ]
    # Binary-only values, and format zeroes out on any malformed step.
    trajectory = run_episode(
        gold_problems()[0], ScriptedReasoner(gold_problems()[0].gold_proof)
    )
    checks.append(r_format(trajectory) == 1)
    from geomloop.harness import Trajectory

    broken = Trajectory(
        problem_id="x",
        frames=(gold_problems()[0].initial_form,),
        steps=(),
        terminal_answer=None,
        truncated=False,
        format_violations=("step 0: schema violation",),
    )
    checks.append(r_format(broken) == 0)
    report(8, "binary format/result rewards incl. ratio surface forms", all(checks))


def test_criterion_9_statistics_fidelity(benchmark_composition_file):
    counts = stats(benchmark_composition_file)
    ok = counts == {"Numerical": 201, "Ratio": 108, "Descriptor": 81}
    report(9, "benchmark composition counts by answer type", ok, str(counts))
