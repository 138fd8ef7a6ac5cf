# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the float and integer hot loops."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs, exp, acosh, INFINITY, isfinite

cnp.import_array()


def crossing_rates(double[::1] phis, double theta, double kappa, double t):
    cdef Py_ssize_t i, m = phis.shape[0]
    cdef double s = sqrt(1.0 + theta * theta), dx, dy
    out = np.empty(m)
    cdef double[::1] o = out
    for i in range(m):
        dx = t * cos(phis[i])
        dy = t * sin(phis[i])
        o[i] = kappa * fabs(dy - theta * dx) / s / t
    return out


def rational_blocks(long long p, long long q, long long l1, Py_ssize_t count):
    cdef long long n = p // q
    cdef long long s = (n + 1) * q - p, t = p - n * q, l = l1
    cdef Py_ssize_t j
    out = np.empty(count, dtype=np.int64)
    cdef long long[::1] o = out
    for j in range(count):
        if l <= t:
            o[j] = n + 1
            l = l + s
        else:
            o[j] = n
            l = l - t
    return out


def roof_chain(double r1, double[::1] ds, double[::1] eps, double[::1] betas):
    cdef Py_ssize_t i, j, m = ds.shape[0]
    r_out = np.empty(m)
    rho_out = np.empty(m)
    off_out = np.empty(m)
    cdef double[::1] ro = r_out, po = rho_out, oo = off_out
    cdef double r = r1, rg = r1, off = 0.0, x, rho, b, den, e
    for i in range(m):
        e = ds[i] + off
        if e > 700.0:
            e = 700.0
        x = eps[i] * exp(e)
        rho = rg / (1.0 + x)
        b = betas[i]
        if b != 0.0:
            den = sqrt(max(0.0, r * r - rho * rho)) * sin(b) + rho * cos(b)
            r = r * rho / den if den > 0 else INFINITY
        rg = rho if rho < r else r
        off = acosh(max(1.0, r / rho)) if isfinite(r) else INFINITY
        ro[i] = r
        po[i] = rho
        oo[i] = off
        if not isfinite(r):
            for j in range(i + 1, m):
                ro[j] = INFINITY
                po[j] = rho
                oo[j] = INFINITY
            break
    return r_out, rho_out, off_out
