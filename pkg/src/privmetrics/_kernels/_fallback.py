"""NumPy implementations of the hot kernels.

Same contracts and the same arithmetic as the compiled core in
``_core.pyx``: per-sequence surprisals come from symbol counts weighted in
fixed symbol order (class-stable), and the simulation consumes the
identical counter-based splitmix64 stream, so integer results match the
compiled backend bit for bit.
"""

import math

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_U64 = np.uint64


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> _U64(30)
    z *= _U64(0xBF58476D1CE4E5B9)
    z ^= z >> _U64(27)
    z *= _U64(0x94D049BB133111EB)
    z ^= z >> _U64(31)
    return z


def _sub_ranges(start, stop, m):
    """Split a scan range so the per-symbol counts matrix stays small."""
    step = max(1 << 12, (1 << 21) // max(m, 1))
    return [(s, min(s + step, stop)) for s in range(start, stop, step)]


def _symbol_counts(k, m, start, stop):
    """Per-symbol counts for each flat sequence index in [start, stop)."""
    idx = np.arange(start, stop, dtype=np.int64)
    counts = np.zeros((idx.shape[0], m), dtype=np.int64)
    rem = idx
    for _ in range(k):
        d = rem % m
        for sym in range(m):
            counts[:, sym] += d == sym
        rem = rem // m
    return counts


def _count_weighted_sum(counts, weights):
    """``sum_i counts_i * weights_i`` accumulated in ascending symbol order.

    Matches the compiled kernel's loop exactly, so the statistic is
    bit-identical for every sequence of a composition class.
    """
    s = np.zeros(counts.shape[0])
    for sym in range(counts.shape[1]):
        s += counts[:, sym].astype(np.float64) * weights[sym]
    return s


def sequence_scan(logp, k, lo, hi, start, stop):
    m = logp.shape[0]
    count = 0
    mass = 0.0
    tmin, tmax = math.inf, -math.inf
    for sub_start, sub_stop in _sub_ranges(start, stop, m):
        counts = _symbol_counts(k, m, sub_start, sub_stop)
        s = _count_weighted_sum(counts, logp)
        t = -s / float(k)
        mask = (t >= lo) & (t <= hi)
        hits = int(mask.sum())
        if hits:
            count += hits
            mass += float(np.exp2(s[mask]).sum())
            t_in = t[mask]
            tmin = min(tmin, float(t_in.min()))
            tmax = max(tmax, float(t_in.max()))
    return count, mass, tmin, tmax


def pair_scan(logj, logx, logy, k, lo_j, hi_j, lo_x, hi_x, lo_y, hi_y,
              start, stop):
    m = logj.shape[0]
    kd = float(k)
    count = 0
    mass = 0.0
    for sub_start, sub_stop in _sub_ranges(start, stop, m):
        counts = _symbol_counts(k, m, sub_start, sub_stop)
        sj = _count_weighted_sum(counts, logj)
        tj = -sj / kd
        tx = -_count_weighted_sum(counts, logx) / kd
        ty = -_count_weighted_sum(counts, logy) / kd
        mask = ((tj >= lo_j) & (tj <= hi_j) & (tx >= lo_x) & (tx <= hi_x)
                & (ty >= lo_y) & (ty <= hi_y))
        hits = int(mask.sum())
        if hits:
            count += hits
            mass += float(np.exp2(sj[mask]).sum())
    return count, mass


def crowds_chunk(n, p, chunk_seed, trials):
    base = _U64(chunk_seed) + np.arange(trials, dtype=np.uint64) * _U64(3 * GOLDEN % (1 << 64))
    r0 = _mix64(base + _U64(GOLDEN))
    r1 = _mix64(base + _U64(2 * GOLDEN % (1 << 64)))
    r2 = _mix64(base + _U64(3 * GOLDEN % (1 << 64)))
    inv53 = 2.0 ** -53
    u0 = (r0 >> _U64(11)).astype(np.float64) * inv53
    x = np.minimum((u0 * float(n)).astype(np.int64), n - 1)
    u1 = ((r1 >> _U64(11)).astype(np.float64) + 1.0) * inv53
    m = np.floor(np.log(u1) / math.log(1.0 - p)).astype(np.int64)
    u2 = (r2 >> _U64(11)).astype(np.float64) * inv53
    y = np.minimum((u2 * float(n)).astype(np.int64), n - 1)
    y = np.where(m == 0, x, y)
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (x, y), 1)
    return counts
