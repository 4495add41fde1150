# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernels for the Lorenz 96 model and its discrete linearisations.

Semantics mirror ``wc4dvar._l96_numpy`` (the reference implementation);
see that module for the shape conventions.
"""

import numpy as np

BACKEND = "cython"


cdef inline Py_ssize_t _wrap(Py_ssize_t j, Py_ssize_t n) noexcept nogil:
    # valid for offsets within [-n, 2n)
    if j >= n:
        return j - n
    if j < 0:
        return j + n
    return j


cdef void _tendency(const double[::1] x, double forcing, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j
    for j in range(n):
        out[j] = (x[_wrap(j + 1, n)] - x[_wrap(j - 2, n)]) * x[_wrap(j - 1, n)] - x[j] + forcing


cdef void _rk4(const double[::1] x, double forcing, double dt,
               double[::1] k, double[::1] acc, double[::1] stage,
               double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j
    _tendency(x, forcing, k)                      # k1
    for j in range(n):
        acc[j] = k[j]
        stage[j] = x[j] + 0.5 * dt * k[j]
    _tendency(stage, forcing, k)                  # k2
    for j in range(n):
        acc[j] += 2.0 * k[j]
        stage[j] = x[j] + 0.5 * dt * k[j]
    _tendency(stage, forcing, k)                  # k3
    for j in range(n):
        acc[j] += 2.0 * k[j]
        stage[j] = x[j] + dt * k[j]
    _tendency(stage, forcing, k)                  # k4
    for j in range(n):
        out[j] = x[j] + (dt / 6.0) * (acc[j] + k[j])


cdef void _stage_states(const double[::1] x, double forcing, double dt,
                        double[::1] k, double[::1] x2, double[::1] x3,
                        double[::1] x4) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j
    _tendency(x, forcing, k)
    for j in range(n):
        x2[j] = x[j] + 0.5 * dt * k[j]
    _tendency(x2, forcing, k)
    for j in range(n):
        x3[j] = x[j] + 0.5 * dt * k[j]
    _tendency(x3, forcing, k)
    for j in range(n):
        x4[j] = x[j] + dt * k[j]


cdef void _tendency_tlm(const double[::1] x, const double[:, ::1] dx,
                        double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = dx.shape[0]
    cdef Py_ssize_t m = dx.shape[1]
    cdef Py_ssize_t j, c, jm1, jm2, jp1
    cdef double a, diff
    for j in range(n):
        jm1 = _wrap(j - 1, n)
        jm2 = _wrap(j - 2, n)
        jp1 = _wrap(j + 1, n)
        a = x[jm1]
        diff = x[jp1] - x[jm2]
        for c in range(m):
            out[j, c] = a * (dx[jp1, c] - dx[jm2, c]) + diff * dx[jm1, c] - dx[j, c]


cdef void _tendency_adj(const double[::1] x, const double[:, ::1] w,
                        double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t m = w.shape[1]
    cdef Py_ssize_t j, c, jm1, jm2, jp1, jp2
    cdef double c1, c2, c3
    for j in range(n):
        jm1 = _wrap(j - 1, n)
        jm2 = _wrap(j - 2, n)
        jp1 = _wrap(j + 1, n)
        jp2 = _wrap(j + 2, n)
        c1 = x[jm2]
        c2 = x[jp2] - x[jm1]
        c3 = x[jp1]
        for c in range(m):
            out[j, c] = c1 * w[jm1, c] + c2 * w[jp1, c] - c3 * w[jp2, c] - w[j, c]


cdef void _rk4_tlm(const double[::1] x, const double[::1] x2,
                   const double[::1] x3, const double[::1] x4, double dt,
                   const double[:, ::1] dx, double[:, ::1] dk,
                   double[:, ::1] u, double[:, ::1] acc,
                   double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = dx.shape[0]
    cdef Py_ssize_t m = dx.shape[1]
    cdef Py_ssize_t j, c
    _tendency_tlm(x, dx, dk)                      # dk1
    for j in range(n):
        for c in range(m):
            acc[j, c] = dk[j, c]
            u[j, c] = dx[j, c] + 0.5 * dt * dk[j, c]
    _tendency_tlm(x2, u, dk)                      # dk2
    for j in range(n):
        for c in range(m):
            acc[j, c] += 2.0 * dk[j, c]
            u[j, c] = dx[j, c] + 0.5 * dt * dk[j, c]
    _tendency_tlm(x3, u, dk)                      # dk3
    for j in range(n):
        for c in range(m):
            acc[j, c] += 2.0 * dk[j, c]
            u[j, c] = dx[j, c] + dt * dk[j, c]
    _tendency_tlm(x4, u, dk)                      # dk4
    for j in range(n):
        for c in range(m):
            out[j, c] = dx[j, c] + (dt / 6.0) * (acc[j, c] + dk[j, c])


cdef void _rk4_adj(const double[::1] x, const double[::1] x2,
                   const double[::1] x3, const double[::1] x4, double dt,
                   const double[:, ::1] dy, double[:, ::1] seed,
                   double[:, ::1] u, double[:, ::1] out) noexcept nogil:
    # reverse sweep through the four differentiated stages
    cdef Py_ssize_t n = dy.shape[0]
    cdef Py_ssize_t m = dy.shape[1]
    cdef Py_ssize_t j, c
    for j in range(n):
        for c in range(m):
            seed[j, c] = (dt / 6.0) * dy[j, c]
    _tendency_adj(x4, seed, u)                    # stage-4 input adjoint
    for j in range(n):
        for c in range(m):
            out[j, c] = dy[j, c] + u[j, c]
            seed[j, c] = (dt / 3.0) * dy[j, c] + dt * u[j, c]
    _tendency_adj(x3, seed, u)
    for j in range(n):
        for c in range(m):
            out[j, c] += u[j, c]
            seed[j, c] = (dt / 3.0) * dy[j, c] + 0.5 * dt * u[j, c]
    _tendency_adj(x2, seed, u)
    for j in range(n):
        for c in range(m):
            out[j, c] += u[j, c]
            seed[j, c] = (dt / 6.0) * dy[j, c] + 0.5 * dt * u[j, c]
    _tendency_adj(x, seed, u)
    for j in range(n):
        for c in range(m):
            out[j, c] += u[j, c]


def tendency(x, double forcing):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.float64)
    _tendency(xv, forcing, out)
    return out


def rk4_step(x, double forcing, double dt):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    k = np.empty(n, dtype=np.float64)
    acc = np.empty(n, dtype=np.float64)
    stage = np.empty(n, dtype=np.float64)
    out = np.empty(n, dtype=np.float64)
    _rk4(xv, forcing, dt, k, acc, stage, out)
    return out


def rk4_tlm(x, double forcing, double dt, dx):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    single = np.ndim(dx) == 1
    dx2 = np.ascontiguousarray(dx, dtype=np.float64).reshape(n, -1)
    cdef Py_ssize_t m = dx2.shape[1]
    k = np.empty(n, dtype=np.float64)
    x2 = np.empty(n, dtype=np.float64)
    x3 = np.empty(n, dtype=np.float64)
    x4 = np.empty(n, dtype=np.float64)
    _stage_states(xv, forcing, dt, k, x2, x3, x4)
    dk = np.empty((n, m), dtype=np.float64)
    u = np.empty((n, m), dtype=np.float64)
    acc = np.empty((n, m), dtype=np.float64)
    out = np.empty((n, m), dtype=np.float64)
    _rk4_tlm(xv, x2, x3, x4, dt, dx2, dk, u, acc, out)
    return out[:, 0] if single else out


def rk4_adj(x, double forcing, double dt, dy):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    single = np.ndim(dy) == 1
    dy2 = np.ascontiguousarray(dy, dtype=np.float64).reshape(n, -1)
    cdef Py_ssize_t m = dy2.shape[1]
    k = np.empty(n, dtype=np.float64)
    x2 = np.empty(n, dtype=np.float64)
    x3 = np.empty(n, dtype=np.float64)
    x4 = np.empty(n, dtype=np.float64)
    _stage_states(xv, forcing, dt, k, x2, x3, x4)
    seed = np.empty((n, m), dtype=np.float64)
    u = np.empty((n, m), dtype=np.float64)
    out = np.empty((n, m), dtype=np.float64)
    _rk4_adj(xv, x2, x3, x4, dt, dy2, seed, u, out)
    return out[:, 0] if single else out
