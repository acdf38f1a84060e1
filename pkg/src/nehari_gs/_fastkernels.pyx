# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: fibering-map scan and fused quadrature sums.

Mirrors _kernels_py; see that module for the contract.  The scan is the
inner loop of every Nehari projection, and a projection happens for every
trial step of the solver, so this is where nearly all solve time goes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"

DEF RHO_AFFINE = 0
DEF RHO_SQRT_SHIFT = 1
DEF RHO_AFFINE_PLUS_SQRT = 2
DEF RHO_POWER_SHIFT = 3


def weighted_dot(double[::1] w, double[::1] x):
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += w[i] * x[i]
    return acc


def quad_form_parts(double[::1] w, double[::1] lap_u, double[::1] du,
                    double[::1] v, double[::1] u):
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double qb = 0.0, qg = 0.0, qp = 0.0
    for i in range(n):
        qb += w[i] * lap_u[i] * lap_u[i]
        qg += w[i] * du[i] * du[i]
        qp += w[i] * v[i] * u[i] * u[i]
    return qb, qg, qp


cdef inline void _rho_products(int code, double p0, double p1, double s,
                               double* rp2, double* rprpp) noexcept nogil:
    cdef double q, rt, rp
    if code == RHO_SQRT_SHIFT:
        q = 1.0 + s
        rp2[0] = 0.25 / q
        rprpp[0] = -0.125 / (q * q)
    elif code == RHO_AFFINE_PLUS_SQRT:
        q = 1.0 + s
        rt = sqrt(q)
        rp = p1 + 0.5 / rt
        rp2[0] = rp * rp
        rprpp[0] = rp * (-0.25 / (q * rt))
    else:  # RHO_POWER_SHIFT
        q = 1.0 + s
        rp2[0] = p0 * p0 * pow(q, 2.0 * p0 - 2.0)
        rprpp[0] = p0 * p0 * (p0 - 1.0) * pow(q, 2.0 * p0 - 3.0)


def fiber_scan(double[::1] ts, double quad, double lam,
               double[::1] u2, double[::1] wu2du2, double[::1] wu4du2,
               int rho_code, double rho_p0, double rho_p1,
               double fm, double fp, double wfp):
    cdef Py_ssize_t k, i, nk = ts.shape[0], n = u2.shape[0]
    g_arr = np.empty(nk, dtype=np.float64)
    j_arr = np.empty(nk, dtype=np.float64)
    cdef double[::1] g = g_arr
    cdef double[::1] j = j_arr
    cdef double t, t2, t4, t6, sb, sc, tp, rp2, rprpp, s, s2sum, b

    if rho_code == RHO_AFFINE:
        b = rho_p1
        s2sum = 0.0
        with nogil:
            for i in range(n):
                s2sum += wu2du2[i]
            sb = b * b * s2sum
            for k in range(nk):
                t = ts[k]
                t2 = t * t
                t4 = t2 * t2
                tp = fm * pow(t, fp) * wfp
                g[k] = 0.5 * t2 * quad + lam * t4 * sb - tp / fp
                j[k] = t2 * quad + 4.0 * lam * t4 * sb - tp
        return g_arr, j_arr

    with nogil:
        for k in range(nk):
            t = ts[k]
            t2 = t * t
            t4 = t2 * t2
            t6 = t4 * t2
            sb = 0.0
            sc = 0.0
            for i in range(n):
                s = t2 * u2[i]
                _rho_products(rho_code, rho_p0, rho_p1, s, &rp2, &rprpp)
                sb += wu2du2[i] * rp2
                sc += wu4du2[i] * rprpp
            tp = fm * pow(t, fp) * wfp
            g[k] = 0.5 * t2 * quad + lam * t4 * sb - tp / fp
            j[k] = t2 * quad + lam * (4.0 * t6 * sc + 4.0 * t4 * sb) - tp
    return g_arr, j_arr
