# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled residual/gradient kernel; semantics identical to kernel_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, fabs, sqrt

from ..errors import DegenerateRelationError

cnp.import_array()

cdef double SEP2 = 1e-24
cdef double RAD2DEG = 57.29577951308232


cdef inline int _degenerate(str what) except -1:
    raise DegenerateRelationError(
        f"{what}: coincident points below 1e-12 separation"
    )


def residuals(double[::1] xy, int[::1] codes, int[:, ::1] pidx,
              double[::1] vals, int[::1] rows, int n_residuals):
    res_arr = np.zeros(n_residuals, dtype=np.float64)
    cdef double[::1] res = res_arr
    cdef Py_ssize_t k
    cdef int code, i0, i1, i2, i3, row
    cdef double px, py, ax, ay, bx, by, cx, cy
    cdef double dx, dy, l2, d1x, d1y, d2x, d2y, l1s, l2s
    cdef double vx, vy, n2, phi

    for k in range(codes.shape[0]):
        code = codes[k]
        i0 = pidx[k, 0]
        i1 = pidx[k, 1]
        i2 = pidx[k, 2]
        i3 = pidx[k, 3]
        row = rows[k]
        if code == 0:
            px = xy[2 * i0]; py = xy[2 * i0 + 1]
            ax = xy[2 * i1]; ay = xy[2 * i1 + 1]
            bx = xy[2 * i2]; by = xy[2 * i2 + 1]
            dx = bx - ax; dy = by - ay
            l2 = dx * dx + dy * dy
            if l2 <= SEP2:
                _degenerate("point_on_line")
            res[row] = (dx * (py - ay) - dy * (px - ax)) / sqrt(l2)
        elif code == 1:
            vx = xy[2 * i0] - xy[2 * i1]
            vy = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            n2 = vx * vx + vy * vy
            if n2 <= SEP2:
                _degenerate("point_on_circle")
            res[row] = sqrt(n2) - vals[k]
        elif code == 2 or code == 3:
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            l1s = d1x * d1x + d1y * d1y
            l2s = d2x * d2x + d2y * d2y
            if l1s <= SEP2 or l2s <= SEP2:
                _degenerate("perpendicular" if code == 2 else "parallel")
            if code == 2:
                res[row] = (d1x * d2x + d1y * d2y) / sqrt(l1s * l2s)
            else:
                res[row] = (d1x * d2y - d1y * d2x) / sqrt(l1s * l2s)
        elif code == 4:
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            res[row] = (d1x * d1x + d1y * d1y) - (d2x * d2x + d2y * d2y)
        elif code == 5:
            dx = xy[2 * i1] - xy[2 * i0]
            dy = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            l2 = dx * dx + dy * dy
            if l2 <= SEP2:
                _degenerate("fixed_length")
            res[row] = sqrt(l2) - vals[k]
        elif code == 6:
            ax = xy[2 * i0] - xy[2 * i1]
            ay = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            bx = xy[2 * i2] - xy[2 * i1]
            by = xy[2 * i2 + 1] - xy[2 * i1 + 1]
            l1s = ax * ax + ay * ay
            l2s = bx * bx + by * by
            if l1s <= SEP2 or l2s <= SEP2:
                _degenerate("fixed_angle")
            phi = atan2(ax * by - ay * bx, ax * bx + ay * by)
            res[row] = fabs(phi) * RAD2DEG - vals[k]
        elif code == 7:
            ax = xy[2 * i0]; ay = xy[2 * i0 + 1]
            bx = xy[2 * i1]; by = xy[2 * i1 + 1]
            cx = xy[2 * i2]; cy = xy[2 * i2 + 1]
            res[row] = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        else:
            res[row] = 2.0 * xy[2 * i0] - xy[2 * i1] - xy[2 * i2]
            res[row + 1] = 2.0 * xy[2 * i0 + 1] - xy[2 * i1 + 1] - xy[2 * i2 + 1]
    return res_arr


def energy_gradient(double[::1] xy, int[::1] codes, int[:, ::1] pidx,
                    double[::1] vals, int[::1] rows):
    grad_arr = np.zeros(xy.shape[0], dtype=np.float64)
    cdef double[::1] grad = grad_arr
    cdef double energy = 0.0
    cdef Py_ssize_t k
    cdef int code, i0, i1, i2, i3
    cdef double px, py, ax, ay, bx, by, cx, cy
    cdef double dx, dy, l2, l, c, r, g, c_l3
    cdef double d1x, d1y, d2x, d2y, l1s, l2s, denom, num
    cdef double n_d1x, n_d1y, n_d2x, n_d2y, r_d1x, r_d1y, r_d2x, r_d2y
    cdef double vx, vy, n2, n, mx, my, qx, qy, r1, r2
    cdef double axv, ayv, bxv, byv, na2, nb2, phi, sgn
    cdef double r_ax, r_ay, r_bx, r_by

    for k in range(codes.shape[0]):
        code = codes[k]
        i0 = pidx[k, 0]
        i1 = pidx[k, 1]
        i2 = pidx[k, 2]
        i3 = pidx[k, 3]
        if code == 0:
            px = xy[2 * i0]; py = xy[2 * i0 + 1]
            ax = xy[2 * i1]; ay = xy[2 * i1 + 1]
            bx = xy[2 * i2]; by = xy[2 * i2 + 1]
            dx = bx - ax; dy = by - ay
            l2 = dx * dx + dy * dy
            if l2 <= SEP2:
                _degenerate("point_on_line")
            l = sqrt(l2)
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
        elif code == 1:
            vx = xy[2 * i0] - xy[2 * i1]
            vy = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            n2 = vx * vx + vy * vy
            if n2 <= SEP2:
                _degenerate("point_on_circle")
            n = sqrt(n2)
            r = n - vals[k]
            energy += r * r
            g = 2.0 * r / n
            grad[2 * i0] += g * vx
            grad[2 * i0 + 1] += g * vy
            grad[2 * i1] -= g * vx
            grad[2 * i1 + 1] -= g * vy
        elif code == 2 or code == 3:
            d1x = xy[2 * i1] - xy[2 * i0]
            d1y = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            d2x = xy[2 * i3] - xy[2 * i2]
            d2y = xy[2 * i3 + 1] - xy[2 * i2 + 1]
            l1s = d1x * d1x + d1y * d1y
            l2s = d2x * d2x + d2y * d2y
            if l1s <= SEP2 or l2s <= SEP2:
                _degenerate("perpendicular" if code == 2 else "parallel")
            denom = sqrt(l1s * l2s)
            if code == 2:
                num = d1x * d2x + d1y * d2y
                n_d1x = d2x; n_d1y = d2y
                n_d2x = d1x; n_d2y = d1y
            else:
                num = d1x * d2y - d1y * d2x
                n_d1x = d2y; n_d1y = -d2x
                n_d2x = -d1y; n_d2y = d1x
            r = num / denom
            energy += r * r
            g = 2.0 * r / denom
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
        elif code == 4:
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
        elif code == 5:
            dx = xy[2 * i1] - xy[2 * i0]
            dy = xy[2 * i1 + 1] - xy[2 * i0 + 1]
            l2 = dx * dx + dy * dy
            if l2 <= SEP2:
                _degenerate("fixed_length")
            l = sqrt(l2)
            r = l - vals[k]
            energy += r * r
            g = 2.0 * r / l
            grad[2 * i0] -= g * dx
            grad[2 * i0 + 1] -= g * dy
            grad[2 * i1] += g * dx
            grad[2 * i1 + 1] += g * dy
        elif code == 6:
            axv = xy[2 * i0] - xy[2 * i1]
            ayv = xy[2 * i0 + 1] - xy[2 * i1 + 1]
            bxv = xy[2 * i2] - xy[2 * i1]
            byv = xy[2 * i2 + 1] - xy[2 * i1 + 1]
            na2 = axv * axv + ayv * ayv
            nb2 = bxv * bxv + byv * byv
            if na2 <= SEP2 or nb2 <= SEP2:
                _degenerate("fixed_angle")
            phi = atan2(axv * byv - ayv * bxv, axv * bxv + ayv * byv)
            r = fabs(phi) * RAD2DEG - vals[k]
            energy += r * r
            sgn = 1.0 if phi >= 0.0 else -1.0
            g = 2.0 * r * sgn * RAD2DEG
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
        elif code == 7:
            ax = xy[2 * i0]; ay = xy[2 * i0 + 1]
            bx = xy[2 * i1]; by = xy[2 * i1 + 1]
            cx = xy[2 * i2]; cy = xy[2 * i2 + 1]
            r = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            energy += r * r
            g = 2.0 * r
            grad[2 * i0] += g * (by - cy)
            grad[2 * i0 + 1] += g * (cx - bx)
            grad[2 * i1] += g * (cy - ay)
            grad[2 * i1 + 1] += g * (ax - cx)
            grad[2 * i2] += g * (ay - by)
            grad[2 * i2 + 1] += g * (bx - ax)
        else:
            mx = xy[2 * i0]; my = xy[2 * i0 + 1]
            px = xy[2 * i1]; py = xy[2 * i1 + 1]
            qx = xy[2 * i2]; qy = xy[2 * i2 + 1]
            r1 = 2.0 * mx - px - qx
            r2 = 2.0 * my - py - qy
            energy += r1 * r1 + r2 * r2
            grad[2 * i0] += 4.0 * r1
            grad[2 * i0 + 1] += 4.0 * r2
            grad[2 * i1] -= 2.0 * r1
            grad[2 * i1 + 1] -= 2.0 * r2
            grad[2 * i2] -= 2.0 * r1
            grad[2 * i2 + 1] -= 2.0 * r2
    return energy, grad_arr
