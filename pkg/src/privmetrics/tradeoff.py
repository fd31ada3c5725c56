"""Privacy-utility frontier: minimum mutual information under a distortion budget.

The solver is an alternating minimization of the Lagrangian
``I(X;Y) + slope * E d`` (information in bits, exponential weights in base
2 so the slope is a bits-per-distortion trade-off).  A budgeted frontier
point bisects on the slope until the achieved distortion lands just under
the budget.  ``grid_search_oracle`` is an independent exhaustive check
over discretized channels, meant for tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bayes import LossMatrix, Scenario, privacy_report
from .errors import ConvergenceError, InvalidArgumentError, ResourceLimitError
from .information import LN2
from .probability import Alphabet, Channel, Pmf, make_uniform

SLOPE_BRACKET_MAX = float(1 << 16)
BISECTION_STEPS_MAX = 200


@dataclass(frozen=True)
class FrontierPoint:
    """One solved point: budget, what the optimizer achieved, and the channel."""

    distortion_budget: float
    achieved_distortion: float
    mutual_info: float
    slope: float | None
    channel: Channel | None
    status: str = "ok"  # "ok" | "infeasible" | "no-convergence"
    iterations: int = 0
    objective_trace: tuple[float, ...] = ()

    def __post_init__(self):
        if self.status == "ok":
            assert self.achieved_distortion <= self.distortion_budget + 1e-9
            assert self.mutual_info >= -1e-12


@dataclass(frozen=True)
class TradeoffCurve:
    points: tuple[FrontierPoint, ...]

    def __post_init__(self):
        ok = [p for p in self.points if p.status == "ok"]
        for a, b in zip(ok, ok[1:]):
            assert b.mutual_info <= a.mutual_info + 1e-9


def _mutual_info_bits(p: np.ndarray, w: np.ndarray, q: np.ndarray) -> float:
    mask = w > 0
    ratio = np.zeros_like(w)
    ratio[mask] = np.log2(w[mask] / np.broadcast_to(q, w.shape)[mask])
    return float((p[:, None] * w * ratio).sum())


def _constant_output_point(p: np.ndarray, d: np.ndarray) -> tuple[int, float]:
    """Best single-output column: (index, expected distortion)."""
    per_output = p @ d
    y = int(np.argmin(per_output))
    return y, float(per_output[y])


def blahut_arimoto(prior: Pmf, loss: LossMatrix, slope: float, *,
                   tol: float = 1e-10, max_iter: int = 100_000,
                   debug: bool = False) -> FrontierPoint:
    """Fixed point of the slope-weighted alternating minimization.

    At ``slope=0`` the Lagrangian ignores distortion entirely, so the
    solver returns the zero-information channel concentrated on the output
    with the least expected distortion instead of iterating.

    Raises :class:`ConvergenceError` (carrying the last iterate and the
    objective residual) if the objective has not settled within
    ``max_iter`` iterations.
    """
    if slope < 0:
        raise InvalidArgumentError("slope must be >= 0")
    keep = prior.probs > 0
    p = prior.probs[keep]
    d = loss.costs[keep]
    n_out = d.shape[1]

    if slope == 0.0:
        y_star, dist = _constant_output_point(p, d)
        w = np.zeros((p.size, n_out))
        w[:, y_star] = 1.0
        channel = _expand_channel(prior, loss, keep, w)
        return FrontierPoint(
            distortion_budget=dist, achieved_distortion=dist, mutual_info=0.0,
            slope=0.0, channel=channel, iterations=0)

    w = np.full((p.size, n_out), 1.0 / n_out)
    neg_weight = -slope * d * LN2
    objective_prev = math.inf
    trace: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        q = p @ w
        # Row-wise softmax of log q + neg_weight, stable against underflow.
        with np.errstate(divide="ignore"):
            logits = np.log(q)[None, :] + neg_weight
        logits -= logits.max(axis=1, keepdims=True)
        w = np.exp(logits)
        w /= w.sum(axis=1, keepdims=True)

        q = p @ w
        distortion = float((p[:, None] * w * d).sum())
        objective = _mutual_info_bits(p, w, q) + slope * distortion
        if debug:
            trace.append(objective)
            assert objective <= objective_prev + 1e-12
        if abs(objective_prev - objective) < tol:
            break
        objective_prev = objective
    else:
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations "
            f"(residual {abs(objective_prev - objective):.3e})",
            last_iterate=w, residual=abs(objective_prev - objective))

    q = p @ w
    mutual = _mutual_info_bits(p, w, q)
    distortion = float((p[:, None] * w * d).sum())
    channel = _expand_channel(prior, loss, keep, w)
    return FrontierPoint(
        distortion_budget=distortion, achieved_distortion=distortion,
        mutual_info=mutual, slope=slope, channel=channel,
        iterations=iterations, objective_trace=tuple(trace))


def _expand_channel(prior: Pmf, loss: LossMatrix, keep: np.ndarray,
                    w: np.ndarray) -> Channel:
    """Reinsert rows for zero-probability inputs (they get the output marginal)."""
    full = np.empty((len(prior.alphabet), w.shape[1]))
    full[keep] = w
    if not keep.all():
        q = prior.probs[keep] @ w
        full[~keep] = q / q.sum()
    return Channel(prior.alphabet, loss.estimate_alphabet, full)


def frontier(prior: Pmf, loss: LossMatrix, budgets, *,
             distortion_tol: float = 1e-6, tol: float = 1e-10,
             max_iter: int = 100_000) -> TradeoffCurve:
    """One frontier point per budget, solved by bisection on the slope.

    Budgets must be non-negative and ascending.  Points that cannot be
    solved are emitted with a non-``ok`` status instead of aborting the
    sweep.
    """
    budgets = [float(b) for b in budgets]
    if not budgets:
        raise InvalidArgumentError("at least one budget is required")
    if any(b < 0 for b in budgets):
        raise InvalidArgumentError("budgets must be >= 0")
    if any(b2 < b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise InvalidArgumentError("budgets must be ascending")

    points = []
    for budget in budgets:
        points.append(_solve_budget(prior, loss, budget,
                                    distortion_tol=distortion_tol,
                                    tol=tol, max_iter=max_iter))
    return TradeoffCurve(points=tuple(points))


def _with_budget(point: FrontierPoint, budget: float) -> FrontierPoint:
    return FrontierPoint(
        distortion_budget=budget,
        achieved_distortion=point.achieved_distortion,
        mutual_info=point.mutual_info, slope=point.slope,
        channel=point.channel, status=point.status,
        iterations=point.iterations, objective_trace=point.objective_trace)


def _solve_budget(prior: Pmf, loss: LossMatrix, budget: float, *,
                  distortion_tol: float, tol: float,
                  max_iter: int) -> FrontierPoint:
    def solve(slope):
        return blahut_arimoto(prior, loss, slope, tol=tol, max_iter=max_iter)

    try:
        relaxed = solve(0.0)
        if relaxed.achieved_distortion <= budget + 1e-9:
            return _with_budget(relaxed, budget)

        hi = SLOPE_BRACKET_MAX
        best = solve(hi)
        if best.achieved_distortion > budget:
            return FrontierPoint(
                distortion_budget=budget,
                achieved_distortion=best.achieved_distortion,
                mutual_info=best.mutual_info, slope=hi, channel=best.channel,
                status="infeasible", iterations=best.iterations)
        lo = 0.0
        for _ in range(BISECTION_STEPS_MAX):
            if budget - distortion_tol <= best.achieved_distortion <= budget:
                break
            mid = 0.5 * (lo + hi)
            candidate = solve(mid)
            if candidate.achieved_distortion > budget:
                lo = mid
            else:
                hi = mid
                best = candidate
        return _with_budget(best, budget)
    except ConvergenceError as err:
        return FrontierPoint(
            distortion_budget=budget, achieved_distortion=math.nan,
            mutual_info=math.nan, slope=None, channel=None,
            status="no-convergence",
            iterations=max_iter, objective_trace=())


def _row_candidates(n_out: int, resolution: int) -> np.ndarray:
    """All pmfs over ``n_out`` symbols with entries on the 1/resolution grid."""
    rows = []
    for cuts in itertools.combinations_with_replacement(range(resolution + 1),
                                                        n_out - 1):
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(resolution - prev)
        rows.append(parts)
    return np.asarray(rows, dtype=np.float64) / resolution


def grid_search_oracle(prior: Pmf, loss: LossMatrix, budget: float,
                       resolution: int, *, cap: int = 10 ** 7) -> FrontierPoint:
    """Exhaustive minimum of I(X;Y) over discretized channels within budget.

    Ground truth for tests, accurate to the grid spacing; refuses search
    spaces beyond ``cap`` channels.
    """
    if budget < 0:
        raise InvalidArgumentError("budget must be >= 0")
    keep = prior.probs > 0
    p = prior.probs[keep]
    d = loss.costs[keep]
    n_in, n_out = d.shape
    rows = _row_candidates(n_out, resolution)
    n_rows = rows.shape[0]
    n_channels = n_rows ** n_in
    if n_channels > cap:
        raise ResourceLimitError(
            f"{n_channels} candidate channels exceed cap {cap}")

    row_dist = rows @ d.T  # (n_rows, n_in): E_y d(x, y) per candidate row
    best_info = math.inf
    best_index = -1
    chunk = 1 << 14
    for start in range(0, n_channels, chunk):
        idx = np.arange(start, min(start + chunk, n_channels), dtype=np.int64)
        digits = np.empty((idx.size, n_in), dtype=np.int64)
        rem = idx
        for x in range(n_in):
            digits[:, x] = rem % n_rows
            rem = rem // n_rows
        w = rows[digits]  # (m, n_in, n_out)
        distortion = (p[None, :] * row_dist[digits, np.arange(n_in)]).sum(axis=1)
        feasible = distortion <= budget + 1e-12
        if not feasible.any():
            continue
        wf = w[feasible]
        q = np.einsum("x,mxy->my", p, wf)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(wf > 0, np.log2(wf / q[:, None, :]), 0.0)
        info = np.einsum("x,mxy,mxy->m", p, wf, logs)
        local = int(np.argmin(info))
        if info[local] < best_info:
            best_info = float(info[local])
            best_index = int(idx[feasible][local])

    if best_index < 0:
        raise InvalidArgumentError(
            f"no discretized channel meets budget {budget}")
    rem = best_index
    chosen = np.empty((n_in, n_out))
    for x in range(n_in):
        chosen[x] = rows[rem % n_rows]
        rem //= n_rows
    achieved = float((p[:, None] * chosen * d).sum())
    channel = _expand_channel(prior, loss, keep, chosen)
    return FrontierPoint(
        distortion_budget=budget, achieved_distortion=achieved,
        mutual_info=max(best_info, 0.0), slope=None, channel=channel)


@dataclass(frozen=True)
class BinaryExampleResult:
    avg_privacy: float
    distortion: float
    max_privacy_at_u0: float


def _flip_channel(alphabet: Alphabet, p_flip: float) -> Channel:
    return Channel(alphabet, alphabet,
                   [[1.0 - p_flip, p_flip], [p_flip, 1.0 - p_flip]],
                   _exact=True)


def binary_example(p_flip: float, u0: float) -> BinaryExampleResult:
    """Uniform-bit flip mechanism, evaluated through the generic pipeline.

    Average privacy and distortion equal the flip probability, and the best
    privacy under an average-utility floor ``u0`` is ``1 - u0`` (achieved by
    flipping exactly ``1 - u0``); the closed forms are asserted against the
    pipeline values before returning.
    """
    if not 0 <= p_flip < 0.5:
        raise InvalidArgumentError("flip probability must be in [0, 0.5)")
    if not 0.5 < u0 <= 1.0:
        raise InvalidArgumentError("utility floor must be in (0.5, 1]")
    alphabet = Alphabet(("0", "1"))
    prior = make_uniform(alphabet)
    hamming = LossMatrix.hamming(alphabet)

    report = privacy_report(Scenario(prior, _flip_channel(alphabet, p_flip),
                                     hamming, hamming))
    assert abs(report.average - p_flip) <= 1e-12
    assert abs(report.average_distortion - p_flip) <= 1e-12

    report_max = privacy_report(Scenario(prior, _flip_channel(alphabet, 1.0 - u0),
                                         hamming, hamming))
    assert abs(report_max.average - (1.0 - u0)) <= 1e-12
    return BinaryExampleResult(
        avg_privacy=report.average,
        distortion=report.average_distortion,
        max_privacy_at_u0=report_max.average,
    )
