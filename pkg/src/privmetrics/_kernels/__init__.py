"""Kernel backend selection.

The compiled Cython core is preferred when importable; setting the
environment variable ``PRIVMETRICS_PURE=1`` before import forces the NumPy
fallback.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import _fallback

_MASK = (1 << 64) - 1
GOLDEN = _fallback.GOLDEN

if os.environ.get("PRIVMETRICS_PURE", "0") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

sequence_scan = _impl.sequence_scan
pair_scan = _impl.pair_scan
crowds_chunk = _impl.crowds_chunk


def backend() -> str:
    """Name of the active kernel backend: ``"compiled"`` or ``"numpy"``."""
    return "numpy" if _impl is _fallback else "compiled"


def mix64(z: int) -> int:
    """splitmix64 finalizer on exact 64-bit integer arithmetic."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_chunk_seed(seed: int, chunk_index: int) -> int:
    """Per-chunk seed: fixed arithmetic on the master seed, merge-order free."""
    return mix64((seed + (chunk_index + 1) * GOLDEN) & _MASK)
