#!/usr/bin/env python3
"""Benchmark: compiled Cython residual/gradient kernel vs the pure-Python one.

Builds a ladder of constrained squares (the solver's typical workload shape),
then times residual-only and energy+gradient evaluation for both backends,
plus a full perturb-and-repair solve each way.

    python benchmarks/bench_kernels.py [--squares 4 16 64] [--repeats 400]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from geomloop.constraints import backend, compile_system, kernel_py, solve
from geomloop.logic_form import LineDecl, PointDecl, RelationDecl, make_form

try:
    from geomloop.constraints import _speedups
except ImportError:
    _speedups = None


def ladder_form(n_squares: int, perturb: float = 0.0, seed: int = 0):
    """A horizontal chain of unit squares sharing vertical edges."""
    rng = np.random.default_rng(seed)
    points = []
    objects = []
    relations = []
    for i in range(n_squares + 1):
        for j, name in ((0, f"B{i}"), (1, f"T{i}")):
            dx, dy = (rng.uniform(-perturb, perturb, 2) if perturb else (0.0, 0.0))
            points.append(PointDecl(name, float(i + dx), float(j + dy)))
    for i in range(n_squares + 1):
        objects.append(LineDecl((f"B{i}", f"T{i}")))
        relations.append(RelationDecl("fixed_length", ((f"B{i}", f"T{i}"),), 1.0))
    for i in range(n_squares):
        objects.append(LineDecl((f"B{i}", f"B{i+1}")))
        objects.append(LineDecl((f"T{i}", f"T{i+1}")))
        relations.append(RelationDecl("fixed_length", ((f"B{i}", f"B{i+1}"),), 1.0))
        relations.append(RelationDecl("fixed_length", ((f"T{i}", f"T{i+1}"),), 1.0))
        relations.append(
            RelationDecl("perpendicular", ((f"B{i}", f"B{i+1}"), (f"B{i}", f"T{i}")))
        )
        relations.append(
            RelationDecl("parallel", ((f"B{i}", f"B{i+1}"), (f"T{i}", f"T{i+1}")))
        )
    return make_form(points, objects, relations)


def time_kernel(impl, system, repeats: int, gradient: bool) -> float:
    args = (system.xy, system.codes, system.pidx, system.vals, system.rows)
    if gradient:
        call = lambda: impl.energy_gradient(*args)  # noqa: E731
    else:
        call = lambda: impl.residuals(*args, system.n_residuals)  # noqa: E731
    call()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        call()
    return (time.perf_counter() - start) / repeats


def time_solve(impl, form) -> tuple[float, float]:
    original = backend.residuals, backend.energy_gradient
    backend.residuals = impl.residuals
    backend.energy_gradient = impl.energy_gradient
    try:
        start = time.perf_counter()
        _, report = solve(form)
        return time.perf_counter() - start, report.final_error
    finally:
        backend.residuals, backend.energy_gradient = original


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--squares", type=int, nargs="+", default=[4, 16, 64])
    parser.add_argument("--repeats", type=int, default=400)
    args = parser.parse_args()

    if _speedups is None:
        print("compiled kernel not built; showing pure-Python numbers only")
    print(f"active backend: {backend.BACKEND_NAME}")
    header = (
        f"{'squares':>8}{'residuals':>12}{'kernel':>10}{'eval us':>10}"
        f"{'grad us':>10}{'solve ms':>10}"
    )
    print(header)
    print("-" * len(header))
    for n in args.squares:
        clean = ladder_form(n)
        system = compile_system(clean)
        broken = ladder_form(n, perturb=0.03, seed=7)
        rows = [("python", kernel_py)]
        if _speedups is not None:
            rows.append(("compiled", _speedups))
        timings = {}
        for name, impl in rows:
            res_us = time_kernel(impl, system, args.repeats, gradient=False) * 1e6
            grad_us = time_kernel(impl, system, args.repeats, gradient=True) * 1e6
            solve_s, final_error = time_solve(impl, broken)
            assert final_error < 1e-8, "both kernels must repair the ladder"
            timings[name] = (res_us, grad_us, solve_s)
            print(
                f"{n:>8}{system.n_residuals:>12}{name:>10}"
                f"{res_us:>10.1f}{grad_us:>10.1f}{solve_s * 1e3:>10.2f}"
            )
        if len(timings) == 2:
            speedup = timings["python"][1] / timings["compiled"][1]
            solve_speedup = timings["python"][2] / timings["compiled"][2]
            print(
                f"{'':>8}{'':>12}{'speedup':>10}"
                f"{timings['python'][0] / timings['compiled'][0]:>9.1f}x"
                f"{speedup:>9.1f}x{solve_speedup:>9.1f}x"
            )
    print("\nresiduals/gradient are per-evaluation averages; solve is one repair run")


if __name__ == "__main__":
    main()
