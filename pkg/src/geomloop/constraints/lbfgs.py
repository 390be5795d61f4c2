"""Limited-memory BFGS with a strong-Wolfe line search.

Fixed configuration: memory 10, Wolfe constants c1=1e-4 and c2=0.9, at most
500 iterations; stops early when the objective drops below the target or the
gradient 2-norm falls below its threshold. Deterministic: no randomized
restarts, fixed evaluation order, and the best visited point is always
returned (the objective never gets worse than at the start).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

MEMORY = 10
C1 = 1e-4
C2 = 0.9
MAX_ITER = 500
VALUE_TARGET = 1e-10
GRAD_TOL = 1e-9


@dataclass(frozen=True)
class MinimizeResult:
    x: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool  # value dropped below the target
    stop_reason: str  # value_target | gradient | max_iter | line_search


class _BestTracker:
    """Wraps the objective, remembering the lowest value ever evaluated."""

    def __init__(self, fg: Objective):
        self._fg = fg
        self.best_value = np.inf
        self.best_x: np.ndarray | None = None
        self.best_grad: np.ndarray | None = None

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        value, grad = self._fg(x)
        if value < self.best_value:
            self.best_value = value
            self.best_x = x.copy()
            self.best_grad = grad.copy()
        return value, grad


def _zoom(fg, x, p, alpha_lo, alpha_hi, f_lo, f0, dphi0, c1, c2):
    """Strong-Wolfe zoom between a bracketing pair of step lengths."""
    for _ in range(40):
        alpha = 0.5 * (alpha_lo + alpha_hi)
        f_a, g_a = fg(x + alpha * p)
        dphi_a = float(np.dot(g_a, p))
        if f_a > f0 + c1 * alpha * dphi0 or f_a >= f_lo:
            alpha_hi = alpha
        else:
            if abs(dphi_a) <= -c2 * dphi0:
                return alpha, f_a, g_a
            if dphi_a * (alpha_hi - alpha_lo) >= 0:
                alpha_hi = alpha_lo
            alpha_lo, f_lo = alpha, f_a
        if abs(alpha_hi - alpha_lo) < 1e-16:
            break
    # Bracket collapsed; accept the low end if it still decreases f.
    f_a, g_a = fg(x + alpha_lo * p)
    if alpha_lo > 0 and f_a < f0:
        return alpha_lo, f_a, g_a
    return None


def _wolfe_search(fg, x, p, f0, g0, c1, c2):
    """Line search satisfying the strong Wolfe conditions (bracket + zoom)."""
    dphi0 = float(np.dot(g0, p))
    if dphi0 >= 0:
        return None
    alpha_prev, f_prev = 0.0, f0
    alpha = 1.0
    for i in range(30):
        f_a, g_a = fg(x + alpha * p)
        dphi_a = float(np.dot(g_a, p))
        if f_a > f0 + c1 * alpha * dphi0 or (i > 0 and f_a >= f_prev):
            return _zoom(fg, x, p, alpha_prev, alpha, f_prev, f0, dphi0, c1, c2)
        if abs(dphi_a) <= -c2 * dphi0:
            return alpha, f_a, g_a
        if dphi_a >= 0:
            return _zoom(fg, x, p, alpha, alpha_prev, f_a, f0, dphi0, c1, c2)
        alpha_prev, f_prev = alpha, f_a
        alpha = min(2.0 * alpha, 1e10)
    return None


def minimize(
    fg: Objective,
    x0: np.ndarray,
    *,
    memory: int = MEMORY,
    c1: float = C1,
    c2: float = C2,
    max_iter: int = MAX_ITER,
    value_target: float = VALUE_TARGET,
    grad_tol: float = GRAD_TOL,
) -> MinimizeResult:
    tracker = _BestTracker(fg)
    x = np.asarray(x0, dtype=np.float64).copy()
    f, g = tracker(x)
    pairs: list[tuple[np.ndarray, np.ndarray, float]] = []  # (s, y, rho)
    iterations = 0
    stop_reason = "max_iter"

    if f < value_target:
        stop_reason = "value_target"
    elif float(np.linalg.norm(g)) < grad_tol:
        stop_reason = "gradient"
    else:
        for it in range(1, max_iter + 1):
            # Two-loop recursion for the quasi-Newton direction.
            q = g.copy()
            alphas: list[float] = []
            for s, y, rho in reversed(pairs):
                a = rho * float(np.dot(s, q))
                alphas.append(a)
                q -= a * y
            if pairs:
                s, y, _ = pairs[-1]
                q *= float(np.dot(s, y) / np.dot(y, y))
            for (s, y, rho), a in zip(pairs, reversed(alphas)):
                b = rho * float(np.dot(y, q))
                q += (a - b) * s
            p = -q
            if float(np.dot(p, g)) >= 0:
                # Stale curvature; restart from steepest descent.
                pairs.clear()
                p = -g

            step = _wolfe_search(tracker, x, p, f, g, c1, c2)
            iterations = it
            if step is None:
                stop_reason = "line_search"
                break
            alpha, f_new, g_new = step
            x_new = x + alpha * p
            s = x_new - x
            y = g_new - g
            sy = float(np.dot(s, y))
            if sy > 1e-10 * float(np.linalg.norm(s) * np.linalg.norm(y)):
                pairs.append((s, y, 1.0 / sy))
                if len(pairs) > memory:
                    pairs.pop(0)
            x, f, g = x_new, f_new, g_new
            if f < value_target:
                stop_reason = "value_target"
                break
            if float(np.linalg.norm(g)) < grad_tol:
                stop_reason = "gradient"
                break

    if tracker.best_value < f:
        x = tracker.best_x  # type: ignore[assignment]
        f = tracker.best_value
        g = tracker.best_grad  # type: ignore[assignment]
    return MinimizeResult(
        x=x,
        value=f,
        grad_norm=float(np.linalg.norm(g)),
        iterations=iterations,
        converged=f < value_target,
        stop_reason=stop_reason,
    )
