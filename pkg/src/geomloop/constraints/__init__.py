"""Geometric constraint solver: residual measurement and coordinate repair.

Relations are compiled to residual functions whose squared sum E is zero
exactly when the diagram satisfies every declared relationship. solve() runs
L-BFGS from the current coordinates, which preserves the drawing's rough
placement; with an empty pin set the objective is invariant under global
rigid motion, so tests should assert residuals rather than absolute
coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import NoFreeParametersError, NonFiniteError
from ..logic_form import LogicForm
from . import backend, lbfgs
from .backend import BACKEND_NAME
from .system import ConstraintSystem, compile_system

__all__ = [
    "BACKEND_NAME",
    "ParamVector",
    "SolveReport",
    "compile_system",
    "error_gradient",
    "pack_params",
    "residuals",
    "solve",
    "total_error",
]

# Convergence target for E and the gradient-stall threshold.
EPSILON_SOLVE = 1e-10
GRAD_TOL = 1e-9
MAX_ITER = 500


def residuals(lf: LogicForm) -> np.ndarray:
    """One residual per relation (two for midpoint), zero iff satisfied."""
    system = compile_system(lf)
    return backend.residuals(
        system.xy, system.codes, system.pidx, system.vals, system.rows,
        system.n_residuals,
    )


def total_error(lf: LogicForm) -> float:
    """E = sum of squared residuals; zero iff all relations hold."""
    r = residuals(lf)
    return float(np.dot(r, r))


@dataclass(frozen=True)
class ParamVector:
    """Flat coordinates of the unpinned points, in label order."""

    free: tuple[str, ...]
    values: np.ndarray  # (2 * len(free),) as [x, y, x, y, ...]
    pinned: frozenset[str]


def pack_params(lf: LogicForm, pins: frozenset[str] | set[str] = frozenset()) -> ParamVector:
    pins = frozenset(pins)
    unknown = pins - {p.name for p in lf.points}
    if unknown:
        raise ValueError(f"pinned labels not in form: {sorted(unknown)}")
    free = tuple(p.name for p in lf.points if p.name not in pins)
    values = np.empty(2 * len(free), dtype=np.float64)
    for i, name in enumerate(free):
        pt = lf.point_map[name]
        values[2 * i] = pt.x
        values[2 * i + 1] = pt.y
    return ParamVector(free=free, values=values, pinned=pins)


def _free_slots(system: ConstraintSystem, free: tuple[str, ...]) -> np.ndarray:
    index = system.index
    slots = np.empty(2 * len(free), dtype=np.intp)
    for i, name in enumerate(free):
        slots[2 * i] = 2 * index[name]
        slots[2 * i + 1] = 2 * index[name] + 1
    return slots


def error_gradient(lf: LogicForm, params: ParamVector) -> np.ndarray:
    """Analytic dE/dparams at the given free coordinates (pinned ones absent)."""
    system = compile_system(lf)
    slots = _free_slots(system, params.free)
    xy = system.xy.copy()
    xy[slots] = params.values
    _, grad = backend.energy_gradient(
        xy, system.codes, system.pidx, system.vals, system.rows
    )
    return grad[slots]


@dataclass(frozen=True)
class SolveReport:
    initial_error: float
    final_error: float
    iterations: int
    converged: bool
    max_point_displacement: float

    def __str__(self) -> str:
        status = "converged" if self.converged else "not converged"
        return (
            f"E0={self.initial_error:.6g} E={self.final_error:.6g} "
            f"iterations={self.iterations} {status} "
            f"max_displacement={self.max_point_displacement:.6g}"
        )


def solve(
    lf: LogicForm, pins: frozenset[str] | set[str] = frozenset()
) -> tuple[LogicForm, SolveReport]:
    """Repair coordinates by minimizing E with L-BFGS from the current layout.

    Pinned points are returned bit-identical; E never increases. Raises
    NoFreeParametersError when every point is pinned and NonFiniteError when
    the objective overflows.
    """
    if not lf.relations:
        raise ValueError("form declares no relations; nothing to solve")
    system = compile_system(lf)
    params = pack_params(lf, pins)
    if not params.free:
        raise NoFreeParametersError("all points are pinned")
    slots = _free_slots(system, params.free)
    base = system.xy.copy()

    def fg(v: np.ndarray) -> tuple[float, np.ndarray]:
        xy = base.copy()
        xy[slots] = v
        energy, grad = backend.energy_gradient(
            xy, system.codes, system.pidx, system.vals, system.rows
        )
        if not math.isfinite(energy):
            raise NonFiniteError("objective is not finite")
        return energy, grad[slots]

    result = lbfgs.minimize(
        fg,
        params.values,
        value_target=EPSILON_SOLVE,
        grad_tol=GRAD_TOL,
        max_iter=MAX_ITER,
    )

    max_disp = 0.0
    new_points = []
    solved = {name: i for i, name in enumerate(params.free)}
    for p in lf.points:
        i = solved.get(p.name)
        if i is None:
            new_points.append(p)  # pinned: untouched declaration
        else:
            x, y = float(result.x[2 * i]), float(result.x[2 * i + 1])
            max_disp = max(max_disp, math.hypot(x - p.x, y - p.y))
            new_points.append(replace(p, x=x, y=y))
    repaired = replace(lf, points=tuple(new_points))

    initial_error = total_error(lf)
    report = SolveReport(
        initial_error=initial_error,
        final_error=min(result.value, initial_error),
        iterations=result.iterations,
        converged=result.converged,
        max_point_displacement=max_disp,
    )
    return repaired, report
