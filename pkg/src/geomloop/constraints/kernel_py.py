"""Pure-Python residual and gradient kernel (fallback for the compiled one).

Residual definitions, one row per constraint (two for midpoint):

    point_on_line(P; A, B)    cross(B-A, P-A) / |B-A|       (signed distance)
    point_on_circle(P; C, R)  |P-C| - R
    perpendicular(AB, CD)     dot(u1, u2)                    (unit directions)
    parallel(AB, CD)          cross(u1, u2)
    equal_length(AB, CD)      |AB|^2 - |CD|^2
    fixed_length(AB; v)       |AB| - v
    fixed_angle(A, V, B; v)   unsigned angle at V in degrees, minus v
    collinear(A, B, C)        cross(B-A, C-A)
    midpoint(M; P, Q)         (2Mx - Px - Qx, 2My - Py - Qy)

Each residual is zero exactly when its relation is satisfied. Gradients are
analytic; relations hitting the 1e-12 separation guard raise
DegenerateRelationError.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateRelationError

# Squared separation guard: endpoints closer than 1e-12 units are degenerate.
_SEP2 = 1e-24

_RAD2DEG = 180.0 / math.pi


def _degenerate(what: str):
    raise DegenerateRelationError(f"{what}: coincident points below 1e-12 separation")


def residuals(xy, codes, pidx, vals, rows, n_residuals: int) -> np.ndarray:
    """Residual vector for the compiled constraint arrays."""
    res = np.zeros(n_residuals, dtype=np.float64)
    for k in range(len(codes)):
        code = codes[k]
        i0, i1, i2, i3 = pidx[k]
        row = rows[k]
        if code == 0:  # point_on_line
            px, py = xy[2 * i0], xy[2 * i0 + 1]
            ax, ay = xy[2 * i1], xy[2 * i1 + 1]
            bx, by = xy[2 * i2], xy[2 * i2 + 1]
            dx, dy = bx - ax, by - ay
            l2 = dx * dx + dy * dy
            if l2 <= _SEP2:
                _degenerate("point_on_line")
            res[row] = (dx * (py - ay) - dy * (px - ax)) / math.sqrt(l2)
        elif code == 1:  # point_on_circle
            vx = xy[2 * i0] - xy[2 * i1]
            vy = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            n2 = vx * vx + vy * vy
            if n2 <= _SEP2:
                _degenerate("point_on_circle")
            res[row] = math.sqrt(n2) - vals[k]
        elif code == 2 or code == 3:  # perpendicular / parallel
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            l1s = d1x * d1x + d1y * d1y
            l2s = d2x * d2x + d2y * d2y
            if l1s <= _SEP2 or l2s <= _SEP2:
                _degenerate("perpendicular" if code == 2 else "parallel")
            denom = math.sqrt(l1s * l2s)
            if code == 2:
                res[row] = (d1x * d2x + d1y * d2y) / denom
            else:
                res[row] = (d1x * d2y - d1y * d2x) / denom
        elif code == 4:  # equal_length
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            res[row] = (d1x * d1x + d1y * d1y) - (d2x * d2x + d2y * d2y)
        elif code == 5:  # fixed_length
            dx = xy[2 * i1] - xy[2 * i0]
            dy = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            l2 = dx * dx + dy * dy
            if l2 <= _SEP2:
                _degenerate("fixed_length")
            res[row] = math.sqrt(l2) - vals[k]
        elif code == 6:  # fixed_angle
            axv = xy[2 * i0] - xy[2 * i1]
            ayv = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            bxv = xy[2 * i2] - xy[2 * i1]
            byv = xy[2 * i2 + 1] - xy[2 * i1 + 1]
            na2 = axv * axv + ayv * ayv
            nb2 = bxv * bxv + byv * byv
            if na2 <= _SEP2 or nb2 <= _SEP2:
                _degenerate("fixed_angle")
            phi = math.atan2(axv * byv - ayv * bxv, axv * bxv + ayv * byv)
            res[row] = abs(phi) * _RAD2DEG - vals[k]
        elif code == 7:  # collinear
            ax, ay = xy[2 * i0], xy[2 * i0 + 1]
            bx, by = xy[2 * i1], xy[2 * i1 + 1]
            cx, cy = xy[2 * i2], xy[2 * i2 + 1]
            res[row] = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        else:  # midpoint
            mx, my = xy[2 * i0], xy[2 * i0 + 1]
            px, py = xy[2 * i1], xy[2 * i1 + 1]
            qx, qy = xy[2 * i2], xy[2 * i2 + 1]
            res[row] = 2.0 * mx - px - qx
            res[row + 1] = 2.0 * my - py - qy
    return res


def energy_gradient(xy, codes, pidx, vals, rows) -> tuple[float, np.ndarray]:
    """Total squared error E and its analytic gradient over all coordinates."""
    grad = np.zeros(len(xy), dtype=np.float64)
    energy = 0.0
    for k in range(len(codes)):
        code = codes[k]
        i0, i1, i2, i3 = pidx[k]
        if code == 0:  # point_on_line
            px, py = xy[2 * i0], xy[2 * i0 + 1]
            ax, ay = xy[2 * i1], xy[2 * i1 + 1]
            bx, by = xy[2 * i2], xy[2 * i2 + 1]
            dx, dy = bx - ax, by - ay
            l2 = dx * dx + dy * dy
            if l2 <= _SEP2:
                _degenerate("point_on_line")
            l = math.sqrt(l2)
            c = dx * (py - ay) - dy * (px - ax)
            r = c / l
            energy += r * r
            g = 2.0 * r
            c_l3 = c / (l * l2)
            grad[2 * i0] += g * (-dy / l)
            grad[2 * i0 + 1] += g * (dx / l)
            grad[2 * i1] += g * ((by - py) / l + c_l3 * dx)
            grad[2 * i1 + 1] += g * ((px - bx) / l + c_l3 * dy)
            grad[2 * i2] += g * ((py - ay) / l - c_l3 * dx)
            grad[2 * i2 + 1] += g * ((ax - px) / l - c_l3 * dy)
        elif code == 1:  # point_on_circle
            vx = xy[2 * i0] - xy[2 * i1]
            vy = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            n2 = vx * vx + vy * vy
            if n2 <= _SEP2:
                _degenerate("point_on_circle")
            n = math.sqrt(n2)
            r = n - vals[k]
            energy += r * r
            g = 2.0 * r / n
            grad[2 * i0] += g * vx
            grad[2 * i0 + 1] += g * vy
            grad[2 * i1] -= g * vx
            grad[2 * i1 + 1] -= g * vy
        elif code == 2 or code == 3:  # perpendicular / parallel
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            l1s = d1x * d1x + d1y * d1y
            l2s = d2x * d2x + d2y * d2y
            if l1s <= _SEP2 or l2s <= _SEP2:
                _degenerate("perpendicular" if code == 2 else "parallel")
            denom = math.sqrt(l1s * l2s)
            if code == 2:
                num = d1x * d2x + d1y * d2y
                n_d1x, n_d1y = d2x, d2y
                n_d2x, n_d2y = d1x, d1y
            else:
                num = d1x * d2y - d1y * d2x
                n_d1x, n_d1y = d2y, -d2x
                n_d2x, n_d2y = -d1y, d1x
            r = num / denom
            energy += r * r
            g = 2.0 * r / denom
            # d r / d d1 = (d num / d d1 - num * d1 / l1s) / denom
            r_d1x = g * (n_d1x - num * d1x / l1s)
            r_d1y = g * (n_d1y - num * d1y / l1s)
            r_d2x = g * (n_d2x - num * d2x / l2s)
            r_d2y = g * (n_d2y - num * d2y / l2s)
            grad[2 * i0] -= r_d1x
            grad[2 * i0 + 1] -= r_d1y
            grad[2 * i1] += r_d1x
            grad[2 * i1 + 1] += r_d1y
            grad[2 * i2] -= r_d2x
            grad[2 * i2 + 1] -= r_d2y
            grad[2 * i3] += r_d2x
            grad[2 * i3 + 1] += r_d2y
        elif code == 4:  # equal_length
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            r = (d1x * d1x + d1y * d1y) - (d2x * d2x + d2y * d2y)
            energy += r * r
            g = 2.0 * r
            grad[2 * i0] -= g * 2.0 * d1x
            grad[2 * i0 + 1] -= g * 2.0 * d1y
            grad[2 * i1] += g * 2.0 * d1x
            grad[2 * i1 + 1] += g * 2.0 * d1y
            grad[2 * i2] += g * 2.0 * d2x
            grad[2 * i2 + 1] += g * 2.0 * d2y
            grad[2 * i3] -= g * 2.0 * d2x
            grad[2 * i3 + 1] -= g * 2.0 * d2y
        elif code == 5:  # fixed_length
            dx = xy[2 * i1] - xy[2 * i0]
            dy = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            l2 = dx * dx + dy * dy
            if l2 <= _SEP2:
                _degenerate("fixed_length")
            l = math.sqrt(l2)
            r = l - vals[k]
            energy += r * r
            g = 2.0 * r / l
            grad[2 * i0] -= g * dx
            grad[2 * i0 + 1] -= g * dy
            grad[2 * i1] += g * dx
            grad[2 * i1 + 1] += g * dy
        elif code == 6:  # fixed_angle
            axv = xy[2 * i0] - xy[2 * i1]
            ayv = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            bxv = xy[2 * i2] - xy[2 * i1]
            byv = xy[2 * i2 + 1] - xy[2 * i1 + 1]
            na2 = axv * axv + ayv * ayv
            nb2 = bxv * bxv + byv * byv
            if na2 <= _SEP2 or nb2 <= _SEP2:
                _degenerate("fixed_angle")
            phi = math.atan2(axv * byv - ayv * bxv, axv * bxv + ayv * byv)
            r = abs(phi) * _RAD2DEG - vals[k]
            energy += r * r
            sgn = 1.0 if phi >= 0.0 else -1.0
            g = 2.0 * r * sgn * _RAD2DEG
            r_ax = g * (ayv / na2)
            r_ay = g * (-axv / na2)
            r_bx = g * (-byv / nb2)
            r_by = g * (bxv / nb2)
            grad[2 * i0] += r_ax
            grad[2 * i0 + 1] += r_ay
            grad[2 * i2] += r_bx
            grad[2 * i2 + 1] += r_by
            grad[2 * i1] -= r_ax + r_bx
            grad[2 * i1 + 1] -= r_ay + r_by
        elif code == 7:  # collinear
            ax, ay = xy[2 * i0], xy[2 * i0 + 1]
            bx, by = xy[2 * i1], xy[2 * i1 + 1]
            cx, cy = xy[2 * i2], xy[2 * i2 + 1]
            r = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            energy += r * r
            g = 2.0 * r
            grad[2 * i0] += g * (by - cy)
            grad[2 * i0 + 1] += g * (cx - bx)
            grad[2 * i1] += g * (cy - ay)
            grad[2 * i1 + 1] += g * (ax - cx)
            grad[2 * i2] += g * (ay - by)
            grad[2 * i2 + 1] += g * (bx - ax)
        else:  # midpoint
            mx, my = xy[2 * i0], xy[2 * i0 + 1]
            px, py = xy[2 * i1], xy[2 * i1 + 1]
            qx, qy = xy[2 * i2], xy[2 * i2 + 1]
            r1 = 2.0 * mx - px - qx
            r2 = 2.0 * my - py - qy
            energy += r1 * r1 + r2 * r2
            grad[2 * i0] += 4.0 * r1
            grad[2 * i0 + 1] += 4.0 * r2
            grad[2 * i1] -= 2.0 * r1
            grad[2 * i1 + 1] -= 2.0 * r2
            grad[2 * i2] -= 2.0 * r1
            grad[2 * i2 + 1] -= 2.0 * r2
    return energy, grad
