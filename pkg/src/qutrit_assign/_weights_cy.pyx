# Compiled Monte Carlo weight kernels.  Semantics mirror _weights_py:
# w(x) = g(x) * chi(x) with chi the positive-semidefiniteness indicator
# (|x|^2 <= 4/3 and det rho(x) >= 0), gaussian weights carry a log-shift
# and slater weights use (27*det)^k; constant factors cancel in ratios.
#
# The loops run without the GIL so chunk-level threads scale.

from libc.math cimport exp, pow, sqrt

import numpy as np

NAME = "cython"

cdef double SQRT3 = sqrt(3.0)
cdef double THIRD = 1.0 / 3.0
cdef double PURITY_CAP = 4.0 / 3.0


cdef inline double _det(const double* p) nogil:
    cdef double c = p[7] / (2.0 * SQRT3)
    cdef double d1 = THIRD + 0.5 * p[2] + c
    cdef double d2 = THIRD - p[7] / SQRT3
    cdef double d3 = THIRD - 0.5 * p[2] + c
    return (d1 * d2 * d3
            + 0.25 * (p[3] * (p[0] * p[5] + p[1] * p[6])
                      - p[4] * (p[0] * p[6] - p[1] * p[5]))
            - 0.25 * (d1 * (p[5] * p[5] + p[6] * p[6])
                      + d2 * (p[3] * p[3] + p[4] * p[4])
                      + d3 * (p[0] * p[0] + p[1] * p[1])))


cdef inline double _norm_sq(const double* p) nogil:
    cdef double s = 0.0
    cdef int j
    for j in range(8):
        s += p[j] * p[j]
    return s


def weights_constant(const double[:, ::1] pts):
    cdef Py_ssize_t n = pts.shape[0]
    w_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, nphys = 0
    cdef const double* p
    with nogil:
        for i in range(n):
            p = &pts[i, 0]
            if _norm_sq(p) <= PURITY_CAP and _det(p) >= 0.0:
                w[i] = 1.0
                nphys += 1
            else:
                w[i] = 0.0
    return w_arr, nphys


def weights_gaussian(const double[:, ::1] pts, const double[::1] center,
                     double inv_two_s2, double log_shift):
    cdef Py_ssize_t n = pts.shape[0]
    w_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, nphys = 0
    cdef int j
    cdef double dist_sq, d
    cdef const double* p
    with nogil:
        for i in range(n):
            p = &pts[i, 0]
            if _norm_sq(p) <= PURITY_CAP and _det(p) >= 0.0:
                dist_sq = 0.0
                for j in range(8):
                    d = p[j] - center[j]
                    dist_sq += d * d
                w[i] = exp(log_shift - dist_sq * inv_two_s2)
                nphys += 1
            else:
                w[i] = 0.0
    return w_arr, nphys


def weights_slater(const double[:, ::1] pts, long k):
    cdef Py_ssize_t n = pts.shape[0]
    w_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] w = w_arr
    cdef Py_ssize_t i, nphys = 0
    cdef double det
    cdef const double* p
    with nogil:
        for i in range(n):
            p = &pts[i, 0]
            det = _det(p)
            if _norm_sq(p) <= PURITY_CAP and det >= 0.0:
                # boundary states can round to det = -0.0, which passes the
                # sign test; adding +0.0 normalises it before the power
                w[i] = pow(27.0 * det + 0.0, <double> k)
                nphys += 1
            else:
                w[i] = 0.0
    return w_arr, nphys
