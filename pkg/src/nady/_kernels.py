"""Compiled right-hand sides for affine external fields.

Same equations as the numpy implementations in :mod:`nady.dynamics`,
written as explicit loops so numba can compile them. Each kernel fills
``out`` and returns the smallest pair separation it saw; the caller turns
a too-small value into :class:`SingularityApproach`.
"""

import numpy as np
from numba import njit

from .core import C, E_CHARGE, M_ELECTRON

_LARMOR = E_CHARGE / (2.0 * M_ELECTRON * C)

MODE_REDUCED = 0
MODE_LARMOR = 1
MODE_NAIVE = 2


@njit(cache=True)
def _coulomb(x, q, forces):
    n = q.shape[0]
    dmin = np.inf
    for i in range(n):
        forces[i, 0] = 0.0
        forces[i, 1] = 0.0
        forces[i, 2] = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i, 0] - x[j, 0]
            dy = x[i, 1] - x[j, 1]
            dz = x[i, 2] - x[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            d = np.sqrt(d2)
            if d < dmin:
                dmin = d
            s = q[i] * q[j] / (d2 * d)
            forces[i, 0] += s * dx
            forces[i, 1] += s * dy
            forces[i, 2] += s * dz
            forces[j, 0] -= s * dx
            forces[j, 1] -= s * dy
            forces[j, 2] -= s * dz
    return dmin


@njit(cache=True)
def _cross(a, b, out):
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


@njit(cache=True)
def exact_rhs_kernel(y, m, q, h0, JH, e0, JE, out):
    n = q.shape[0]
    x = y[: 3 * n].reshape((n, 3))
    v = y[3 * n :].reshape((n, 3))
    forces = np.empty((n, 3))
    dmin = _coulomb(x, q, forces)
    H = np.empty(3)
    E = np.empty(3)
    vxH = np.empty(3)
    for i in range(n):
        for j in range(3):
            H[j] = h0[j] + x[i, 0] * JH[0, j] + x[i, 1] * JH[1, j] + x[i, 2] * JH[2, j]
            E[j] = e0[j] + x[i, 0] * JE[0, j] + x[i, 1] * JE[1, j] + x[i, 2] * JE[2, j]
        _cross(v[i], H, vxH)
        for j in range(3):
            out[3 * i + j] = v[i, j]
            out[3 * n + 3 * i + j] = (forces[i, j] + q[i] * (E[j] + vxH[j] / C)) / m[i]
    return dmin


@njit(cache=True)
def reduced_rhs_kernel(y, m, q, M, h0, JH, e0, JE, mode, out):
    n = q.shape[0]
    R = y[0:3]
    V = y[3:6]
    rho = y[6 : 6 + 3 * n].reshape((n, 3))
    rho_dot = y[6 + 3 * n :].reshape((n, 3))
    forces = np.empty((n, 3))
    dmin = _coulomb(rho, q, forces)

    H = np.empty(3)
    E = np.empty(3)
    for j in range(3):
        H[j] = h0[j] + R[0] * JH[0, j] + R[1] * JH[1, j] + R[2] * JH[2, j]
        E[j] = e0[j] + R[0] * JE[0, j] + R[1] * JE[1, j] + R[2] * JE[2, j]

    P = np.zeros(3)
    P_dot = np.zeros(3)
    qmom = np.zeros(3)
    L = np.zeros(3)
    tmp = np.empty(3)
    for i in range(n):
        _cross(rho[i], rho_dot[i], tmp)
        for j in range(3):
            P[j] += q[i] * rho[i, j]
            P_dot[j] += q[i] * rho_dot[i, j]
            qmom[j] += q[i] * tmp[j]
            L[j] += m[i] * tmp[j]

    A = np.zeros(3)
    if mode == MODE_NAIVE:
        # -grad (e / 2 m_e c) L . H0 = -(e / 2 m_e c) JH @ L
        for i in range(3):
            A[i] = -_LARMOR * (JH[i, 0] * L[0] + JH[i, 1] * L[1] + JH[i, 2] * L[2]) / M
        for j in range(3):
            out[j] = V[j]
            out[3 + j] = A[j]
        for i in range(n):
            for j in range(3):
                out[6 + 3 * i + j] = rho_dot[i, j]
                out[6 + 3 * n + 3 * i + j] = forces[i, j] / m[i]
        return dmin

    g = np.empty(3)
    for i in range(3):
        g[i] = JH[i, 0] * V[0] + JH[i, 1] * V[1] + JH[i, 2] * V[2]

    PxV = np.empty(3)
    _cross(P, V, PxV)
    mvec = np.empty(3)
    for j in range(3):
        if mode == MODE_LARMOR:
            mvec[j] = PxV[j] / C - _LARMOR * L[j]
        else:
            mvec[j] = PxV[j] / C + qmom[j] / (2.0 * C)

    PdxH = np.empty(3)
    Pxg = np.empty(3)
    _cross(P_dot, H, PdxH)
    _cross(P, g, Pxg)
    for j in range(3):
        grad_E = JE[0, j] * P[0] + JE[1, j] * P[1] + JE[2, j] * P[2]
        moment = JH[0, j] * mvec[0] + JH[1, j] * mvec[1] + JH[2, j] * mvec[2]
        A[j] = (grad_E + PdxH[j] / C + Pxg[j] / C + moment) / M

    VxH = np.empty(3)
    _cross(V, H, VxH)
    a_vec = np.empty(3)
    b_vec = np.empty(3)
    t1 = np.empty(3)
    t2 = np.empty(3)
    for j in range(3):
        out[j] = V[j]
        out[3 + j] = A[j]
    for i in range(n):
        mu = m[i] / M
        for j in range(3):
            a_vec[j] = q[i] * rho[i, j] - mu * P[j]
            b_vec[j] = q[i] * rho_dot[i, j] - mu * P_dot[j]
        _cross(a_vec, g, t1)
        _cross(b_vec, H, t2)
        for j in range(3):
            acc = forces[i, j] + q[i] * (E[j] + VxH[j] / C) + t1[j] / (2.0 * C) + t2[j] / C
            out[6 + 3 * i + j] = rho_dot[i, j]
            out[6 + 3 * n + 3 * i + j] = acc / m[i]
    return dmin
