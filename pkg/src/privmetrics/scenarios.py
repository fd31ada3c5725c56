"""Two worked systems: anonymous forwarding and perturbed-location queries.

The forwarding protocol: each of ``n`` users originates messages at a
uniform rate; whoever holds a message submits it with probability ``p``
and otherwise forwards it to a user drawn uniformly among all ``n``
(themselves included).  The observer sees only the last holder.  Because
every forward lands uniformly, the identity of the holder after the first
forward is uniform and stays uniform, which gives the closed-form
posterior implemented here; the Monte Carlo simulation is the independent
check of that derivation (see README for the short argument).

The location scenario discretizes a rectangular grid of cells, perturbs
the true cell through a channel (e.g. cell-integrated Gaussian noise) and
scores the attacker by squared distance between cell centers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import crowds_chunk, derive_chunk_seed
from .bayes import LossMatrix, Scenario, bayes_estimate, privacy_report
from .errors import InvalidArgumentError
from .information import entropy_ordering
from .probability import (Alphabet, Channel, JointPmf, Pmf, joint_from,
                          make_uniform, posterior)

_SIM_CHUNK = 1 << 16


@dataclass(frozen=True)
class CrowdsConfig:
    """Forwarding-protocol parameters and simulation controls."""

    n: int
    p: float
    trials: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgumentError("at least two users required")
        if not 0.0 < self.p < 1.0:
            raise InvalidArgumentError("submission probability must be in (0, 1)")
        if self.trials < 1:
            raise InvalidArgumentError("at least one trial required")


def user_alphabet(n: int) -> Alphabet:
    return Alphabet(tuple(f"u{i + 1}" for i in range(n)))


def crowds_posterior(n: int, p: float, y_index: int) -> Pmf:
    """Originator distribution given that user ``y_index`` was the last holder."""
    CrowdsConfig(n=n, p=p)
    if not 0 <= y_index < n:
        raise InvalidArgumentError(f"observation index {y_index} out of range")
    probs = np.full(n, (1.0 - p) / n)
    probs[y_index] = p + (1.0 - p) / n
    return Pmf(user_alphabet(n), probs, _exact=True)


def crowds_channel(n: int, p: float) -> Channel:
    """Last-holder distribution per originator."""
    alphabet = user_alphabet(n)
    rows = np.full((n, n), (1.0 - p) / n)
    rows[np.diag_indices(n)] = p + (1.0 - p) / n
    return Channel(alphabet, alphabet, rows, _exact=True)


def crowds_scenario(n: int, p: float) -> Scenario:
    alphabet = user_alphabet(n)
    return Scenario(make_uniform(alphabet), crowds_channel(n, p),
                    LossMatrix.hamming(alphabet))


@dataclass(frozen=True)
class CrowdsPrivacy:
    """Pipeline privacy next to the closed form, plus the posterior entropies."""

    pipeline_privacy: float
    formula_privacy: float
    h_min: float
    h_shannon: float
    h_hartley: float


def crowds_privacy(n: int, p: float) -> CrowdsPrivacy:
    """Per-observation privacy of the protocol (identical for every holder).

    Computed through the generic estimation pipeline; the closed form
    ``(1 - p)(1 - 1/n)`` is returned alongside for comparison.
    """
    scenario = crowds_scenario(n, p)
    post = posterior(scenario.joint(), 0)
    pipeline = bayes_estimate(post, scenario.attacker_loss)[1]
    h_min, h_shannon, h_hartley = entropy_ordering(crowds_posterior(n, p, 0))
    return CrowdsPrivacy(
        pipeline_privacy=pipeline,
        formula_privacy=(1.0 - p) * (1.0 - 1.0 / n),
        h_min=h_min,
        h_shannon=h_shannon,
        h_hartley=h_hartley,
    )


def crowds_simulate(config: CrowdsConfig, *, threads: int = 1) -> JointPmf:
    """Monte Carlo joint over (originator, last holder).

    A holder's forward count is geometric, and every forwarded message
    lands on a uniform user, so each trial draws the chain length and (when
    non-zero) the final holder directly; this is distribution-identical to
    looping the coin flips.  Trials run in fixed-size chunks whose seeds
    derive from the master seed, so the result depends only on
    ``(seed, trials)``, never on ``threads``.
    """
    seed = config.seed & ((1 << 64) - 1)
    n_chunks = (config.trials + _SIM_CHUNK - 1) // _SIM_CHUNK

    def run(c: int) -> np.ndarray:
        trials = min(_SIM_CHUNK, config.trials - c * _SIM_CHUNK)
        return crowds_chunk(config.n, config.p, derive_chunk_seed(seed, c), trials)

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(c) for c in range(n_chunks)]
    counts = np.sum(parts, axis=0)
    alphabet = user_alphabet(config.n)
    return JointPmf(alphabet, alphabet, counts / config.trials)


def posterior_z_scores(empirical: JointPmf, n: int, p: float,
                       trials: int) -> np.ndarray:
    """Per-entry z-scores of the simulated posterior against the closed form.

    Entry (x, y) compares the empirical conditional of x given y with the
    analytic posterior, using the binomial standard error at the observed
    column count.  Columns that never occurred score zero.
    """
    counts = empirical.probs * trials
    z = np.zeros((n, n))
    for y in range(n):
        n_y = counts[:, y].sum()
        if n_y == 0:
            continue
        post = crowds_posterior(n, p, y).probs
        se = np.sqrt(post * (1.0 - post) / n_y)
        z[:, y] = (counts[:, y] / n_y - post) / se
    return z


@dataclass(frozen=True)
class LbsGrid:
    """Rectangular cell grid with a location prior and a perturbation channel.

    Cells are indexed row-major; every cell symbol is embedded at its
    center, which is what the squared-error loss measures.
    """

    width: int
    height: int
    cell_size: float
    prior: Pmf
    noise: Channel

    def __post_init__(self):
        alphabet = self.prior.alphabet
        if alphabet.embedding is None:
            raise InvalidArgumentError("grid alphabet must embed cell centers")
        if (self.noise.input_alphabet != alphabet
                or self.noise.output_alphabet != alphabet):
            raise InvalidArgumentError("noise channel must act on the grid cells")
        if len(alphabet) != self.width * self.height:
            raise InvalidArgumentError("alphabet size must equal width*height")


def grid_alphabet(width: int, height: int, cell_size: float = 1.0) -> Alphabet:
    if width < 1 or height < 1 or cell_size <= 0:
        raise InvalidArgumentError("grid dimensions must be positive")
    symbols = []
    centers = []
    for row in range(height):
        for col in range(width):
            symbols.append(f"c{col}r{row}")
            centers.append(((col + 0.5) * cell_size, (row + 0.5) * cell_size))
    return Alphabet(tuple(symbols), tuple(centers))


def _axis_cell_weights(n_cells: int, cell_size: float, center: float,
                       sigma: float) -> np.ndarray:
    """Gaussian mass inside each 1-D cell for a given mean."""
    edges = np.arange(n_cells + 1) * cell_size
    z = (edges - center) / (sigma * math.sqrt(2.0))
    cdf = np.array([0.5 * (1.0 + math.erf(v)) for v in z])
    return np.diff(cdf)


def gaussian_noise_channel(width: int, height: int, cell_size: float,
                           sigma: float) -> Channel:
    """Additive Gaussian location noise, integrated over cells.

    The density around each true center is integrated over every cell and
    renormalized per row, which both keeps the alphabet finite and absorbs
    the truncation at the grid edge.
    """
    if sigma <= 0:
        raise InvalidArgumentError("sigma must be positive")
    alphabet = grid_alphabet(width, height, cell_size)
    rows = np.empty((len(alphabet), len(alphabet)))
    for row in range(height):
        for col in range(width):
            cx = (col + 0.5) * cell_size
            cy = (row + 0.5) * cell_size
            wx = _axis_cell_weights(width, cell_size, cx, sigma)
            wy = _axis_cell_weights(height, cell_size, cy, sigma)
            rows[row * width + col] = np.outer(wy, wx).ravel()
    # Mass outside the grid is truncated; fold it back per row.
    rows /= rows.sum(axis=1, keepdims=True)
    return Channel(alphabet, alphabet, rows)


def make_grid(width: int, height: int, cell_size: float = 1.0,
              prior=None, sigma: float | None = None,
              noise_rows=None) -> LbsGrid:
    """Convenience constructor; default prior is uniform, default noise identity."""
    alphabet = grid_alphabet(width, height, cell_size)
    if prior is None:
        prior_pmf = make_uniform(alphabet)
    else:
        prior_pmf = Pmf(alphabet, prior)
    if sigma is not None and noise_rows is not None:
        raise InvalidArgumentError("give either sigma or explicit noise rows")
    if sigma is not None:
        noise = gaussian_noise_channel(width, height, cell_size, sigma)
    elif noise_rows is not None:
        noise = Channel(alphabet, alphabet, noise_rows)
    else:
        noise = Channel(alphabet, alphabet, np.eye(len(alphabet)), _exact=True)
    return LbsGrid(width, height, cell_size, prior_pmf, noise)


@dataclass(frozen=True)
class LbsObservation:
    y_symbol: str
    probability: float
    grid_estimate: str
    grid_risk: float
    mean_point: tuple[float, ...]
    mean_risk: float


@dataclass(frozen=True)
class LbsPrivacy:
    """Average squared-error privacy under two attacker estimate spaces.

    ``mse_grid`` restricts the estimate to a grid cell; ``mse_mean`` lets
    the attacker answer with the posterior mean point, which can only be
    better for the attacker, so ``mse_mean <= mse_grid``.
    """

    mse_grid: float
    mse_mean: float
    per_observation: tuple[LbsObservation, ...]


def lbs_privacy(grid: LbsGrid) -> LbsPrivacy:
    """Mean-squared-error privacy of the perturbed grid."""
    loss = LossMatrix.squared(grid.prior.alphabet)
    scenario = Scenario(grid.prior, grid.noise, loss)
    report = privacy_report(scenario)

    points = grid.prior.alphabet.points()
    joint = joint_from(grid.prior, grid.noise)
    observations = []
    mse_mean = 0.0
    for rec in report.per_observation:
        post = posterior(joint, rec.y_index)
        mean = post.probs @ points
        variance = float(post.probs @ ((points - mean) ** 2).sum(axis=1))
        mse_mean += rec.probability * variance
        observations.append(LbsObservation(
            y_symbol=rec.y_symbol,
            probability=rec.probability,
            grid_estimate=rec.estimate_symbol,
            grid_risk=rec.privacy,
            mean_point=tuple(float(v) for v in mean),
            mean_risk=variance,
        ))
    return LbsPrivacy(
        mse_grid=report.average,
        mse_mean=mse_mean,
        per_observation=tuple(observations),
    )
