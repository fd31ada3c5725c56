"""Timing comparison: compiled kernels vs the NumPy fallback.

Run from the repository root after installing the package:

    python3 benchmarks/bench_kernels.py

Both backends implement identical arithmetic, so the printed results are
cross-checked for agreement before timing.
"""

import math
import time

import numpy as np

from privmetrics._kernels import _fallback, derive_chunk_seed

try:
    from privmetrics._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def bench_sequence_scan(impl):
    probs = np.array([0.8, 0.2])
    logp = np.ascontiguousarray(np.log2(probs))
    h = float(-(probs * logp).sum())
    k = 22
    return lambda: impl.sequence_scan(logp, k, h - 0.2, h + 0.2, 0, 2 ** k)


def bench_pair_scan(impl):
    joint = np.array([[0.35, 0.15], [0.15, 0.35]]).ravel()
    logj = np.ascontiguousarray(np.log2(joint))
    logx = np.ascontiguousarray(np.log2(np.array([0.5, 0.5, 0.5, 0.5])))
    logy = logx.copy()
    h_j = float(-(joint * logj).sum())
    k = 11
    return lambda: impl.pair_scan(logj, logx, logy, k, h_j - 0.3, h_j + 0.3,
                                  0.7, 1.3, 0.7, 1.3, 0, 4 ** k)


def bench_crowds(impl):
    seed = derive_chunk_seed(7, 0)
    return lambda: impl.crowds_chunk(10, 0.5, seed, 2_000_000)


def main():
    rows = []
    for name, make in (("sequence_scan (2^22 seqs, k=22)", bench_sequence_scan),
                       ("pair_scan (4^11 pairs, k=11)", bench_pair_scan),
                       ("crowds_chunk (2e6 trials, n=10)", bench_crowds)):
        numpy_time, numpy_result = best_of(make(_fallback))
        if _core is None:
            rows.append((name, None, numpy_time, None))
            continue
        core_time, core_result = best_of(make(_core))
        if isinstance(core_result, np.ndarray):
            assert np.array_equal(core_result, numpy_result)
        else:
            assert core_result[0] == numpy_result[0]
            assert math.isclose(core_result[1], numpy_result[1],
                                rel_tol=0, abs_tol=1e-9)
        rows.append((name, core_time, numpy_time, numpy_time / core_time))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'compiled':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, core_time, numpy_time, speedup in rows:
        compiled = f"{core_time * 1e3:8.1f}ms" if core_time else "   absent"
        ratio = f"{speedup:7.1f}x" if speedup else "       -"
        print(f"{name:<{width}}  {compiled:>10}  {numpy_time * 1e3:8.1f}ms  {ratio:>8}")


if __name__ == "__main__":
    main()
