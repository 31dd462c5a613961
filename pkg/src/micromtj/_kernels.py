"""Compiled inner loops for the LLG right-hand side and DP45 stages.

These mirror ``field._total`` and ``LLGSystem.__call__`` cell by cell; the
numpy versions remain the reference and the tests compare the two.

Coefficient vector layout (``c``):
  0 cx_ex, 1 cy_ex, 2 cx_dmi, 3 cy_dmi, 4 2/Ms, 5-7 easy axis,
  8 demag coefficient (mu0 Ms or 0), 9-11 external field,
  12 gamma/(1+alpha^2), 13 alpha, 14 precession flag,
  15-17 sigma, 18 damping-like beta, 19 field-like beta
"""

import numpy as np
from numba import njit

NCOEF = 20


@njit(cache=True)
def rhs(m, k, c, out):
    ny, nx = k.shape
    cxe, cye, cxd, cyd = c[0], c[1], c[2], c[3]
    two_ms = c[4]
    ux, uy, uz = c[5], c[6], c[7]
    cdm = c[8]
    g, alpha, prec = c[12], c[13], c[14]
    sx, sy, sz = c[15], c[16], c[17]
    bdl, bfl = c[18], c[19]
    a1 = bdl + alpha * bfl
    a2 = bfl - alpha * bdl
    for j in range(ny):
        for i in range(nx):
            mx, my, mz = m[j, i, 0], m[j, i, 1], m[j, i, 2]
            bx = c[9]
            by = c[10]
            bz = c[11]
            if i + 1 < nx:
                nx_, ny_, nz_ = m[j, i + 1, 0], m[j, i + 1, 1], m[j, i + 1, 2]
                bx += cxe * (nx_ - mx)
                by += cxe * (ny_ - my)
                bz += cxe * (nz_ - mz)
                # -cx_dmi * (m_{i+1} x y)
                bx += cxd * nz_
                bz -= cxd * nx_
            if i > 0:
                nx_, ny_, nz_ = m[j, i - 1, 0], m[j, i - 1, 1], m[j, i - 1, 2]
                bx += cxe * (nx_ - mx)
                by += cxe * (ny_ - my)
                bz += cxe * (nz_ - mz)
                bx -= cxd * nz_
                bz += cxd * nx_
            if j + 1 < ny:
                nx_, ny_, nz_ = m[j + 1, i, 0], m[j + 1, i, 1], m[j + 1, i, 2]
                bx += cye * (nx_ - mx)
                by += cye * (ny_ - my)
                bz += cye * (nz_ - mz)
                # +cy_dmi * (m_{j+1} x x)
                by += cyd * nz_
                bz -= cyd * ny_
            if j > 0:
                nx_, ny_, nz_ = m[j - 1, i, 0], m[j - 1, i, 1], m[j - 1, i, 2]
                bx += cye * (nx_ - mx)
                by += cye * (ny_ - my)
                bz += cye * (nz_ - mz)
                by -= cyd * nz_
                bz += cyd * ny_
            mu = mx * ux + my * uy + mz * uz
            ka = two_ms * k[j, i] * mu
            bx += ka * ux
            by += ka * uy
            bz += ka * uz
            bz -= cdm * mz
            # m x B
            px = my * bz - mz * by
            py = mz * bx - mx * bz
            pz = mx * by - my * bx
            # m x (m x B)
            qx = my * pz - mz * py
            qy = mz * px - mx * pz
            qz = mx * py - my * px
            ox = -g * alpha * qx - g * prec * px
            oy = -g * alpha * qy - g * prec * py
            oz = -g * alpha * qz - g * prec * pz
            if a1 != 0.0 or a2 != 0.0:
                rx = my * sz - mz * sy
                ry = mz * sx - mx * sz
                rz = mx * sy - my * sx
                tx = my * rz - mz * ry
                ty = mz * rx - mx * rz
                tz = mx * ry - my * rx
                ox -= g * (a1 * tx + a2 * rx)
                oy -= g * (a1 * ty + a2 * ry)
                oz -= g * (a1 * tz + a2 * rz)
            out[j, i, 0] = ox
            out[j, i, 1] = oy
            out[j, i, 2] = oz


_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])


@njit(cache=True)
def _stage(y, m, dt, ks, a, s):
    # y = m + dt * sum_r a[s, r] ks[r] for r < s
    ny, nx = y.shape[0], y.shape[1]
    for j in range(ny):
        for i in range(nx):
            for q in range(3):
                acc = 0.0
                for r in range(s):
                    acc += a[s, r] * ks[r, j, i, q]
                y[j, i, q] = m[j, i, q] + dt * acc


@njit(cache=True)
def dp45_trial(m, k, c, k1, dt, y5, k7):
    """Fills ``y5`` (renormalized) and ``k7``; returns (max error, max |dm|)."""
    ny, nx = k.shape
    ks = np.empty((6, ny, nx, 3))
    ks[0] = k1
    y = np.empty_like(m)
    for s in range(1, 7):
        _stage(y, m, dt, ks, _A, s)
        if s < 6:
            rhs(y, k, c, ks[s])
    k2, k3, k4, k5, k6 = ks[1], ks[2], ks[3], ks[4], ks[5]
    dm_max = 0.0
    for j in range(ny):
        for i in range(nx):
            n = np.sqrt(y[j, i, 0] ** 2 + y[j, i, 1] ** 2 + y[j, i, 2] ** 2)
            d2 = 0.0
            for a in range(3):
                y5[j, i, a] = y[j, i, a] / n
                d2 += (y5[j, i, a] - m[j, i, a]) ** 2
            if d2 > dm_max:
                dm_max = d2
    rhs(y5, k, c, k7)
    e1 = 35 / 384 - 5179 / 57600
    e3 = 500 / 1113 - 7571 / 16695
    e4 = 125 / 192 - 393 / 640
    e5 = -2187 / 6784 + 92097 / 339200
    e6 = 11 / 84 - 187 / 2100
    e7 = -1 / 40
    err_max = 0.0
    for j in range(ny):
        for i in range(nx):
            s = 0.0
            for a in range(3):
                e = dt * (
                    e1 * k1[j, i, a] + e3 * k3[j, i, a] + e4 * k4[j, i, a]
                    + e5 * k5[j, i, a] + e6 * k6[j, i, a] + e7 * k7[j, i, a]
                )
                s += e * e
            if s > err_max:
                err_max = s
    return np.sqrt(err_max), np.sqrt(dm_max)
