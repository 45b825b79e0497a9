# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched shot-noise sums and the KL-UCB bisection.

Same signatures and semantics as ``relaylab._fallback``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, pow, sqrt, sin, cos, INFINITY, M_PI

cnp.import_array()


cdef inline double _gain(double d2, double e) nogil:
    if e == -2.0:
        return 1.0 / (d2 * d2)
    if e == -1.5:
        return 1.0 / (d2 * sqrt(d2))
    return pow(d2, e)


def segment_shot_noise(const double[::1] x, const double[::1] y,
                       const double[::1] marks, counts,
                       double rx, double ry, double power, double alpha):
    cdef const long long[::1] cnt = np.ascontiguousarray(counts, dtype=np.int64)
    cdef Py_ssize_t n = cnt.shape[0]
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, i, j = 0
    cdef double acc, dx, dy, d2
    cdef double e = -0.5 * alpha
    cdef bint singular = False
    with nogil:
        for k in range(n):
            acc = 0.0
            for i in range(cnt[k]):
                dx = x[j] - rx
                dy = y[j] - ry
                d2 = dx * dx + dy * dy
                if d2 == 0.0:
                    singular = True
                    break
                acc += marks[j] * _gain(d2, e)
                j += 1
            if singular:
                break
            out[k] = power * acc
    if singular:
        raise ZeroDivisionError("singular distance")
    return out_arr


def polar_shot_noise(const double[::1] u_rad, const double[::1] u_ang, counts,
                     double cx, double cy, double radius,
                     const double[:, ::1] receivers, const double[:, ::1] marks,
                     double power, double alpha):
    cdef const long long[::1] cnt = np.ascontiguousarray(counts, dtype=np.int64)
    cdef Py_ssize_t n = cnt.shape[0]
    cdef Py_ssize_t nrx = receivers.shape[0]
    if marks.shape[0] != nrx:
        raise ValueError("one mark row per receiver required")
    out_arr = np.zeros((nrx, n))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t k, i, m, j = 0
    cdef double rad, ang, x, y, dx, dy, d2
    cdef double e = -0.5 * alpha
    cdef double acc[8]
    cdef bint singular = False
    if nrx > 8:
        raise ValueError("at most 8 receivers")
    with nogil:
        for k in range(n):
            for m in range(nrx):
                acc[m] = 0.0
            for i in range(cnt[k]):
                rad = radius * sqrt(u_rad[j])
                ang = 2.0 * M_PI * u_ang[j]
                x = cx + rad * cos(ang)
                y = cy + rad * sin(ang)
                for m in range(nrx):
                    dx = x - receivers[m, 0]
                    dy = y - receivers[m, 1]
                    d2 = dx * dx + dy * dy
                    if d2 == 0.0:
                        singular = True
                        break
                    acc[m] += marks[m, j] * _gain(d2, e)
                if singular:
                    break
                j += 1
            if singular:
                break
            for m in range(nrx):
                out[m, k] = power * acc[m]
    if singular:
        raise ZeroDivisionError("singular distance")
    return out_arr


cdef inline double _kl(double p, double q) nogil:
    cdef double out = 0.0
    if p == q:
        return 0.0
    if p > 0.0:
        if q <= 0.0:
            return INFINITY
        out += p * log(p / q)
    if p < 1.0:
        if q >= 1.0:
            return INFINITY
        out += (1.0 - p) * log((1.0 - p) / (1.0 - q))
    return out


cdef double _bound(double mean, double budget, double tol, double dtol) nogil:
    cdef double lo, hi, mid
    cdef int it
    if mean >= 1.0:
        return 1.0
    if budget <= 0.0:
        return mean
    if _kl(mean, 1.0) <= budget:
        return 1.0
    lo = mean
    hi = 1.0
    for it in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _kl(mean, mid) <= budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and budget - _kl(mean, lo) <= dtol:
            break
    return lo


def kl_bernoulli(double p, double q):
    return _kl(p, q)


def kl_ucb_bound(double mean, double budget, double tol=1e-9, double dtol=1e-10):
    return _bound(mean, budget, tol, dtol)
