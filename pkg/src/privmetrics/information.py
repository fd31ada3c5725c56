"""Entropy family, divergences, and finite-horizon typicality machinery.

Every entropy and divergence in this package is reported in bits.  The
one deliberate exception is the classical total-variation bound in
:func:`pinsker_bound`, whose radicand is evaluated in nats because that is
the base for which the sqrt(2)/2 constant is valid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import pair_scan, sequence_scan
from .errors import InvalidArgumentError, ResourceLimitError
from .probability import JointPmf, Pmf

LN2 = math.log(2.0)

#: Default limit on the number of sequences an exhaustive scan may visit.
DEFAULT_ENUMERATION_CAP = 1 << 24

#: Widening of the typicality band, in bits/symbol.  Composition classes can
#: land exactly on the band edge (the entropy and the class surprisal are
#: the same linear combination of log-probabilities); the slack absorbs the
#: representation rounding so membership follows the exact-arithmetic
#: reading of the closed interval.
BAND_SLACK = 1e-12

_CHUNK = 1 << 20


def _entropy_bits(probs: np.ndarray) -> float:
    """Shannon entropy of a probability vector, 0*log(0) taken as 0."""
    p = probs[probs > 0]
    return float(-(p * np.log2(p)).sum())


def renyi_entropy(p: Pmf, alpha: float) -> float:
    """Order-``alpha`` entropy in bits.

    ``alpha=0`` is the log support size, ``alpha=1`` the Shannon limit and
    ``alpha=math.inf`` the min-entropy ``-log2 max p``; any other
    non-negative order uses the defining power sum.
    """
    if not alpha >= 0:
        raise InvalidArgumentError(f"entropy order must be >= 0, got {alpha!r}")
    probs = p.probs
    if alpha == 0:
        return float(np.log2(int((probs > 0).sum())))
    if alpha == 1:
        return _entropy_bits(probs)
    if math.isinf(alpha):
        return float(-np.log2(probs.max()))
    support = probs[probs > 0]
    return float(np.log2((support ** alpha).sum()) / (1.0 - alpha))


def entropy_ordering(p: Pmf) -> tuple[float, float, float]:
    """(min-entropy, Shannon, log-support) triple; non-decreasing by theorem."""
    triple = (renyi_entropy(p, math.inf), renyi_entropy(p, 1.0),
              renyi_entropy(p, 0.0))
    assert triple[0] <= triple[1] + 1e-12 and triple[1] <= triple[2] + 1e-12
    return triple


def _check_same_alphabet(p: Pmf, q: Pmf):
    if p.alphabet != q.alphabet:
        raise InvalidArgumentError("pmfs are over different alphabets")


def kl_divergence(p: Pmf, q: Pmf) -> float:
    """Relative entropy D(p||q) in bits; +inf when q misses mass p needs."""
    _check_same_alphabet(p, q)
    pi = p.probs
    qi = q.probs
    mask = pi > 0
    if np.any(qi[mask] == 0):
        return math.inf
    return float((pi[mask] * np.log2(pi[mask] / qi[mask])).sum())


def total_variation(p: Pmf, q: Pmf) -> float:
    _check_same_alphabet(p, q)
    return float(0.5 * np.abs(p.probs - q.probs).sum())


def pinsker_bound(p: Pmf, q: Pmf) -> tuple[float, float]:
    """Total variation and its divergence bound ``sqrt(D_nats(p||q)/2)``."""
    tv = total_variation(p, q)
    d_nats = kl_divergence(p, q) * LN2
    return tv, math.sqrt(d_nats / 2.0) if math.isfinite(d_nats) else math.inf


def mutual_information(joint: JointPmf) -> float:
    """I(X;Y) of a joint pmf, in bits."""
    j = joint.probs
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    mask = j > 0
    outer = px[:, None] * py[None, :]
    return float((j[mask] * np.log2(j[mask] / outer[mask])).sum())


@dataclass(frozen=True)
class TypicalSet:
    """Result of an exhaustive scan over all length-``k`` i.i.d. sequences.

    ``min_member_rate`` / ``max_member_rate`` are the extreme per-symbol
    surprisals (bits/symbol) among members, reported as diagnostics because
    the equal-in-the-exponent heuristic has no finite-``k`` guarantee; they
    are ``None`` when the set is empty.
    """

    k: int
    epsilon: float
    member_count: int
    total_probability: float
    cardinality_bound: float
    min_member_rate: float | None
    max_member_rate: float | None

    def __post_init__(self):
        assert self.member_count <= self.cardinality_bound
        assert 0.0 <= self.total_probability <= 1.0


def _check_enumeration(total, cap):
    if total > cap:
        raise ResourceLimitError(
            f"enumeration of {total} sequences exceeds cap {cap}; "
            f"raise the cap explicitly to proceed"
        )


def _scan_chunks(fn, total: int, threads: int):
    ranges = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda r: fn(*r), ranges))
    return [fn(*r) for r in ranges]


def typical_set(p: Pmf, k: int, epsilon: float, *,
                cap: int = DEFAULT_ENUMERATION_CAP, threads: int = 1) -> TypicalSet:
    """Enumerate all length-``k`` sequences and collect the typical ones.

    A sequence is typical when its per-symbol surprisal is within
    ``epsilon`` bits of the Shannon entropy.  Chunked scans merge in index
    order, so the result is identical whatever ``threads`` is.
    """
    if k < 1:
        raise InvalidArgumentError("sequence length must be >= 1")
    if not epsilon > 0:
        raise InvalidArgumentError("epsilon must be > 0")
    _check_enumeration(len(p.alphabet) ** k, cap)

    # Sequences using a zero-probability symbol have infinite surprisal and
    # can never be typical; scanning the support only is exact and cheaper.
    support = p.probs[p.probs > 0]
    logp = np.ascontiguousarray(np.log2(support))
    h = _entropy_bits(p.probs)
    lo, hi = h - epsilon - BAND_SLACK, h + epsilon + BAND_SLACK

    total = int(support.size) ** k
    parts = _scan_chunks(
        lambda s, e: sequence_scan(logp, k, lo, hi, s, e), total, threads)
    count = sum(part[0] for part in parts)
    mass = sum(part[1] for part in parts)
    tmin = min(part[2] for part in parts)
    tmax = max(part[3] for part in parts)
    return TypicalSet(
        k=k,
        epsilon=epsilon,
        member_count=count,
        total_probability=min(mass, 1.0),
        cardinality_bound=2.0 ** (k * (h + epsilon)),
        min_member_rate=tmin if count else None,
        max_member_rate=tmax if count else None,
    )


def jointly_typical_fraction(joint: JointPmf, k: int, epsilon: float, *,
                             cap: int = DEFAULT_ENUMERATION_CAP,
                             threads: int = 1) -> float:
    """Probability that k i.i.d. draws of (X, Y) form a jointly typical pair.

    Standard three-condition test: the X sequence, the Y sequence and the
    pair sequence must each be within ``epsilon`` bits/symbol of their
    entropies.
    """
    if k < 1:
        raise InvalidArgumentError("sequence length must be >= 1")
    if not epsilon > 0:
        raise InvalidArgumentError("epsilon must be > 0")
    nx = len(joint.row_alphabet)
    ny = len(joint.col_alphabet)
    _check_enumeration((nx * ny) ** k, cap)

    j = joint.probs
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    flat = j.ravel()
    support = np.flatnonzero(flat > 0)
    logj = np.ascontiguousarray(np.log2(flat[support]))
    logx = np.ascontiguousarray(np.log2(px[support // ny]))
    logy = np.ascontiguousarray(np.log2(py[support % ny]))

    h_joint = _entropy_bits(flat)
    h_x = _entropy_bits(px)
    h_y = _entropy_bits(py)

    total = int(support.size) ** k
    wide = epsilon + BAND_SLACK
    parts = _scan_chunks(
        lambda s, e: pair_scan(
            logj, logx, logy, k,
            h_joint - wide, h_joint + wide,
            h_x - wide, h_x + wide,
            h_y - wide, h_y + wide, s, e),
        total, threads)
    mass = sum(part[1] for part in parts)
    return min(mass, 1.0)
