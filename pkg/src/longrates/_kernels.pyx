# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled path-simulation kernels.

Twin of longrates._kernels_py: same counter-based Philox4x32-10 streams
keyed by (seed) with counter (path, step, slot, tag), same step recursions.
Uniform streams are bit-identical to the numpy backend; normals and path
values can differ by a few ulp through libm transcendentals.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, log1p, sin, sqrt

from .errors import ModelError

cnp.import_array()

cdef extern from *:
    """
    #include <stdint.h>
    """
    ctypedef unsigned int uint32_t
    ctypedef unsigned long long uint64_t

DEF TWO_PI = 6.283185307179586476925287
DEF INV53 = 1.1102230246251565404236316680908203125e-16  # 2^-53

cdef inline void _philox_block(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                               uint32_t k0, uint32_t k1, uint32_t* out) noexcept nogil:
    cdef uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3
    cdef uint32_t kr0, kr1, hi0, lo0, hi1, lo1
    cdef uint64_t p0, p1
    cdef int r
    for r in range(10):
        kr0 = k0 + <uint32_t>(<uint32_t>r * 0x9E3779B9u)
        kr1 = k1 + <uint32_t>(<uint32_t>r * 0xBB67AE85u)
        p0 = <uint64_t>0xD2511F53u * <uint64_t>x0
        p1 = <uint64_t>0xCD9E8D57u * <uint64_t>x2
        hi0 = <uint32_t>(p0 >> 32); lo0 = <uint32_t>(p0 & 0xFFFFFFFFu)
        hi1 = <uint32_t>(p1 >> 32); lo1 = <uint32_t>(p1 & 0xFFFFFFFFu)
        x0 = hi1 ^ x1 ^ kr0
        x1 = lo1
        x2 = hi0 ^ x3 ^ kr1
        x3 = lo0
    out[0] = x0; out[1] = x1; out[2] = x2; out[3] = x3


cdef inline void _uniform2(uint64_t seed, uint64_t path, uint32_t step, uint32_t slot,
                           uint32_t tag, double* u0, double* u1) noexcept nogil:
    cdef uint32_t words[4]
    cdef uint64_t a, b
    _philox_block(<uint32_t>(path & 0xFFFFFFFFu), step, slot, tag,
                  <uint32_t>(seed & 0xFFFFFFFFu), <uint32_t>(seed >> 32), words)
    a = (<uint64_t>words[0] << 32) | <uint64_t>words[1]
    b = (<uint64_t>words[2] << 32) | <uint64_t>words[3]
    u0[0] = <double>(a >> 11) * INV53
    u1[0] = <double>(b >> 11) * INV53


cdef inline void _normal2(uint64_t seed, uint64_t path, uint32_t step, uint32_t slot,
                          uint32_t tag, double* z0, double* z1) noexcept nogil:
    cdef double u0, u1, r, angle
    _uniform2(seed, path, step, slot, tag, &u0, &u1)
    r = sqrt(-2.0 * log1p(-u0))
    angle = TWO_PI * u1
    z0[0] = r * cos(angle)
    z1[0] = r * sin(angle)


def uniform_pair(seed, path_ids, step, slot, tag):
    """Two uniforms in [0, 1) per path id; bit-identical to the numpy backend."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ids = np.ascontiguousarray(path_ids, dtype=np.uint64)
    cdef Py_ssize_t n = ids.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u0 = np.empty(n), u1 = np.empty(n)
    cdef uint64_t s = <uint64_t>seed
    cdef uint32_t st = <uint32_t>step, sl = <uint32_t>slot, tg = <uint32_t>tag
    with nogil:
        for i in range(n):
            _uniform2(s, ids[i], st, sl, tg, &u0[i], &u1[i])
    return np.asarray(u0), np.asarray(u1)


def normal_pair(seed, path_ids, step, slot, tag):
    """Two standard normals per path id via Box-Muller."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ids = np.ascontiguousarray(path_ids, dtype=np.uint64)
    cdef Py_ssize_t n = ids.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z0 = np.empty(n), z1 = np.empty(n)
    cdef uint64_t s = <uint64_t>seed
    cdef uint32_t st = <uint32_t>step, sl = <uint32_t>slot, tg = <uint32_t>tag
    with nogil:
        for i in range(n):
            _normal2(s, ids[i], st, sl, tg, &z0[i], &z1[i])
    return np.asarray(z0), np.asarray(z1)


def gbm_paths(seed, path0, n_paths, dts, sigma, m0):
    """Exact log-normal steps; see the numpy twin for the stream layout."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dt_arr = np.ascontiguousarray(dts, dtype=np.float64)
    cdef Py_ssize_t n = n_paths, m = dt_arr.shape[0], i, j
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m + 1))
    cdef uint64_t s = <uint64_t>seed, p0 = <uint64_t>path0
    cdef double sig = sigma, start = m0, val, z0, z1, dt
    with nogil:
        for i in range(n):
            val = start
            out[i, 0] = val
            for j in range(m):
                dt = dt_arr[j]
                _normal2(s, p0 + <uint64_t>i, <uint32_t>(j + 1), 0, 1, &z0, &z1)
                val = val * exp(sig * sqrt(dt) * z0 - 0.5 * sig * sig * dt)
                out[i, j + 1] = val
    return np.asarray(out)


def bm_paths(seed, path0, n_paths, dts):
    """Standard Brownian paths started at 0."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dt_arr = np.ascontiguousarray(dts, dtype=np.float64)
    cdef Py_ssize_t n = n_paths, m = dt_arr.shape[0], i, j
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m + 1))
    cdef uint64_t s = <uint64_t>seed, p0 = <uint64_t>path0
    cdef double w, z0, z1
    with nogil:
        for i in range(n):
            w = 0.0
            out[i, 0] = w
            for j in range(m):
                _normal2(s, p0 + <uint64_t>i, <uint32_t>(j + 1), 0, 3, &z0, &z1)
                w = w + sqrt(dt_arr[j]) * z0
                out[i, j + 1] = w
    return np.asarray(out)


def ou_paths(seed, path0, n_paths, dts, k, theta, sigma, x0, lo, hi, max_attempts=100):
    """Exact mean-reverting steps with box resampling; see the numpy twin."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dt_arr = np.ascontiguousarray(dts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sg = np.ascontiguousarray(sigma, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xi = np.ascontiguousarray(x0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lo_a = np.ascontiguousarray(lo, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hi_a = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = n_paths, m = dt_arr.shape[0], d = th.shape[0]
    cdef Py_ssize_t pairs = (d + 1) // 2
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out = np.empty((n, m + 1, d))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] decay_arr = np.empty(m), z = np.empty(d)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sd_arr = np.empty((m, d))
    cdef uint64_t s = <uint64_t>seed, p0 = <uint64_t>path0
    cdef double kk = k, dt, cand, z0, z1
    cdef Py_ssize_t i, j, a, p, q
    cdef int ok, failed = 0
    cdef long long n_resampled = 0
    cdef int maxa = max_attempts
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.empty(d), xn = np.empty(d)

    for j in range(m):
        dt = dt_arr[j]
        decay_arr[j] = exp(-kk * dt)
        for q in range(d):
            if kk > 0.0:
                sd_arr[j, q] = sg[q] * sqrt((1.0 - exp(-2.0 * kk * dt)) / (2.0 * kk))
            else:
                sd_arr[j, q] = sg[q] * sqrt(dt)

    with nogil:
        for i in range(n):
            for q in range(d):
                x[q] = xi[q]
                out[i, 0, q] = xi[q]
            for j in range(m):
                ok = 0
                for a in range(maxa):
                    for p in range(pairs):
                        _normal2(s, p0 + <uint64_t>i, <uint32_t>(j + 1),
                                 <uint32_t>(a * pairs + p), 2, &z0, &z1)
                        z[2 * p] = z0
                        if 2 * p + 1 < d:
                            z[2 * p + 1] = z1
                    ok = 1
                    for q in range(d):
                        cand = th[q] + (x[q] - th[q]) * decay_arr[j] + sd_arr[j, q] * z[q]
                        xn[q] = cand
                        if cand < lo_a[q] or cand > hi_a[q]:
                            ok = 0
                    if ok:
                        break
                    n_resampled += 1
                if not ok:
                    failed = 1
                    break
                for q in range(d):
                    x[q] = xn[q]
                    out[i, j + 1, q] = xn[q]
            if failed:
                break
    if failed:
        raise ModelError(
            f"box resampling exhausted {max_attempts} attempts; "
            "the box is too tight for the volatility"
        )
    return np.asarray(out), int(n_resampled)
