# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration and simulation kernels.

`_fallback.py` implements the same arithmetic with NumPy; the package
selects whichever backend imports.  Integer results (counts, matrices)
match the fallback exactly; floating-point mass accumulations may differ
in the last ulps because summation order differs.

Per-sequence surprisals are computed from the sequence's symbol counts
(``sum(count_i * logp_i)`` in fixed symbol order), so every sequence of a
composition class gets the bit-identical statistic and membership
decisions at the band edges are atomic per class.
"""

from libc.math cimport exp2, floor, log
from libc.stdint cimport int64_t, uint64_t

import numpy as np

cdef double INF = float("inf")

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15U


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9U
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBU
    return z ^ (z >> 31)


cdef inline void _seed_digits(int64_t index, Py_ssize_t k, Py_ssize_t m,
                              int64_t* digits, int64_t* counts) nogil:
    cdef Py_ssize_t i, j
    for i in range(m):
        counts[i] = 0
    for j in range(k):
        digits[j] = index % m
        counts[digits[j]] += 1
        index //= m


cdef inline void _advance(Py_ssize_t k, Py_ssize_t m,
                          int64_t* digits, int64_t* counts) nogil:
    cdef Py_ssize_t j = 0
    while j < k:
        counts[digits[j]] -= 1
        digits[j] += 1
        if digits[j] < m:
            counts[digits[j]] += 1
            return
        digits[j] = 0
        counts[0] += 1
        j += 1


def sequence_scan(double[::1] logp, Py_ssize_t k, double lo, double hi,
                  int64_t start, int64_t stop):
    """Scan i.i.d. sequences with flat indices in [start, stop).

    Sequence ``i`` has the base-``m`` digits of ``i`` as its symbols.
    Returns ``(count, mass, tmin, tmax)`` over the sequences whose
    per-symbol surprisal ``t`` lies in [lo, hi]: member count, total
    probability, and the extreme t values (+/-inf when no member).
    """
    cdef Py_ssize_t m = logp.shape[0]
    digits_arr = np.empty(k, dtype=np.int64)
    counts_arr = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] digits = digits_arr
    cdef int64_t[::1] counts = counts_arr

    cdef int64_t count = 0
    cdef int64_t i, nseq = stop - start
    cdef double mass = 0.0, tmin = INF, tmax = -INF
    cdef double s, t, kd = <double>k
    cdef Py_ssize_t sym
    with nogil:
        _seed_digits(start, k, m, &digits[0], &counts[0])
        for i in range(nseq):
            s = 0.0
            for sym in range(m):
                s += <double>counts[sym] * logp[sym]
            t = -s / kd
            if lo <= t <= hi:
                count += 1
                mass += exp2(s)
                if t < tmin:
                    tmin = t
                if t > tmax:
                    tmax = t
            _advance(k, m, &digits[0], &counts[0])
    return count, mass, tmin, tmax


def pair_scan(double[::1] logj, double[::1] logx, double[::1] logy,
              Py_ssize_t k,
              double lo_j, double hi_j, double lo_x, double hi_x,
              double lo_y, double hi_y,
              int64_t start, int64_t stop):
    """Scan i.i.d. pair-symbol sequences; three-way typicality test.

    Returns ``(count, mass)`` over sequences whose joint, X-marginal and
    Y-marginal per-symbol surprisals all lie inside their [lo, hi] bands.
    """
    cdef Py_ssize_t m = logj.shape[0]
    digits_arr = np.empty(k, dtype=np.int64)
    counts_arr = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] digits = digits_arr
    cdef int64_t[::1] counts = counts_arr

    cdef int64_t count = 0
    cdef int64_t i, nseq = stop - start
    cdef double mass = 0.0
    cdef double sj, sx, sy, tj, tx, ty, c, kd = <double>k
    cdef Py_ssize_t sym
    with nogil:
        _seed_digits(start, k, m, &digits[0], &counts[0])
        for i in range(nseq):
            sj = 0.0
            sx = 0.0
            sy = 0.0
            for sym in range(m):
                c = <double>counts[sym]
                sj += c * logj[sym]
                sx += c * logx[sym]
                sy += c * logy[sym]
            tj = -sj / kd
            tx = -sx / kd
            ty = -sy / kd
            if (lo_j <= tj <= hi_j and lo_x <= tx <= hi_x
                    and lo_y <= ty <= hi_y):
                count += 1
                mass += exp2(sj)
            _advance(k, m, &digits[0], &counts[0])
    return count, mass


def crowds_chunk(Py_ssize_t n, double p, uint64_t chunk_seed, Py_ssize_t trials):
    """Simulate one chunk of forwarding trials; returns (n, n) int64 counts.

    Trial ``j`` consumes the counter-based splitmix64 outputs 3j+1..3j+3 of
    ``chunk_seed``: originator, geometric forward count, final holder.
    """
    counts_arr = np.zeros((n, n), dtype=np.int64)
    cdef int64_t[:, ::1] counts = counts_arr
    cdef double inv53 = 2.0 ** -53
    cdef double nd = <double>n
    cdef double log_keep = log(1.0 - p)
    cdef Py_ssize_t j, x, y
    cdef uint64_t r0, r1, r2, base
    cdef double u0, u1, u2
    cdef int64_t m
    with nogil:
        for j in range(trials):
            base = chunk_seed + (<uint64_t>(3 * j)) * GOLDEN
            r0 = mix64(base + 1 * GOLDEN)
            r1 = mix64(base + 2 * GOLDEN)
            r2 = mix64(base + 3 * GOLDEN)
            u0 = <double>(r0 >> 11) * inv53
            x = <Py_ssize_t>(u0 * nd)
            if x >= n:
                x = n - 1
            u1 = (<double>(r1 >> 11) + 1.0) * inv53
            m = <int64_t>floor(log(u1) / log_keep)
            if m == 0:
                y = x
            else:
                u2 = <double>(r2 >> 11) * inv53
                y = <Py_ssize_t>(u2 * nd)
                if y >= n:
                    y = n - 1
            counts[x, y] += 1
    return counts_arr
