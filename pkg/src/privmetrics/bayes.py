"""Loss matrices, optimal-decision estimators, and privacy reports.

Privacy here is the expected loss of an attacker who decides optimally
from the posterior: per observation it is the minimum conditional risk,
the worst case is the minimum over observations, and the average weights
each observation by its probability.  Ties between estimates always break
toward the lowest index so reports are stable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnobservableEvidenceError
from .information import LN2, kl_divergence, renyi_entropy, total_variation
from .probability import (Alphabet, Channel, JointPmf, Pmf, alphabet_from,
                          joint_from, posterior)


class LossMatrix:
    """Cost table d(x, xhat) over unknown alphabet x estimate alphabet.

    ``is_hamming`` is detected structurally (same alphabets, costs equal to
    one minus the identity); estimators use it to take the exact
    argmax-posterior path.
    """

    __slots__ = ("unknown_alphabet", "estimate_alphabet", "costs", "d_max",
                 "is_hamming")

    def __init__(self, unknown_alphabet: Alphabet, estimate_alphabet: Alphabet,
                 costs):
        arr = np.asarray(costs, dtype=np.float64)
        if arr.shape != (len(unknown_alphabet), len(estimate_alphabet)):
            raise InvalidArgumentError("cost matrix shape must match alphabets")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidArgumentError("costs must be finite and non-negative")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.unknown_alphabet = unknown_alphabet
        self.estimate_alphabet = estimate_alphabet
        self.costs = arr
        self.d_max = float(arr.max())
        self.is_hamming = bool(
            estimate_alphabet == unknown_alphabet
            and np.array_equal(arr, 1.0 - np.eye(len(unknown_alphabet)))
        )

    @classmethod
    def hamming(cls, alphabet: Alphabet) -> "LossMatrix":
        return cls(alphabet, alphabet, 1.0 - np.eye(len(alphabet)))

    @classmethod
    def squared(cls, unknown: Alphabet, estimate: Alphabet | None = None) -> "LossMatrix":
        """Squared Euclidean distance between symbol embeddings."""
        estimate = estimate or unknown
        diff = unknown.points()[:, None, :] - estimate.points()[None, :, :]
        return cls(unknown, estimate, (diff ** 2).sum(axis=2))

    @classmethod
    def absolute(cls, unknown: Alphabet, estimate: Alphabet | None = None) -> "LossMatrix":
        """Euclidean distance between symbol embeddings."""
        estimate = estimate or unknown
        diff = unknown.points()[:, None, :] - estimate.points()[None, :, :]
        return cls(unknown, estimate, np.sqrt((diff ** 2).sum(axis=2)))

    @classmethod
    def from_dict(cls, d: dict, unknown: Alphabet,
                  estimate_default: Alphabet | None = None) -> "LossMatrix":
        """Build from the scenario-JSON loss object."""
        if not isinstance(d, dict) or "kind" not in d:
            raise InvalidArgumentError("loss must be an object with a 'kind'")
        kind = d["kind"]
        if kind == "hamming":
            return cls.hamming(unknown)
        if kind == "squared":
            return cls.squared(unknown, estimate_default)
        if kind == "absolute":
            return cls.absolute(unknown, estimate_default)
        if kind == "matrix":
            if "costs" not in d:
                raise InvalidArgumentError("matrix loss requires 'costs'")
            estimate = estimate_default or unknown
            if "estimate" in d:
                estimate = alphabet_from(d["estimate"], d.get("estimate_embedding"))
            return cls(unknown, estimate, d["costs"])
        raise InvalidArgumentError(f"unknown loss kind {kind!r}")


def bayes_estimate(post: Pmf, loss: LossMatrix) -> tuple[int, float]:
    """Minimum-conditional-risk estimate: (estimate index, attained risk)."""
    if post.alphabet != loss.unknown_alphabet:
        raise InvalidArgumentError("posterior alphabet must match loss unknowns")
    if loss.is_hamming:
        idx = int(np.argmax(post.probs))
        return idx, 1.0 - float(post.probs[idx])
    risks = post.probs @ loss.costs
    idx = int(np.argmin(risks))
    return idx, float(risks[idx])


def map_estimate(post: Pmf) -> tuple[int, float]:
    """Posterior mode and its error probability ``1 - max p``."""
    idx = int(np.argmax(post.probs))
    return idx, 1.0 - float(post.probs[idx])


class Scenario:
    """Prior + attacker-facing channel + attacker loss (+ optional system loss)."""

    __slots__ = ("prior", "channel", "attacker_loss", "system_loss")

    def __init__(self, prior: Pmf, channel: Channel, attacker_loss: LossMatrix,
                 system_loss: LossMatrix | None = None):
        if prior.alphabet != channel.input_alphabet:
            raise InvalidArgumentError("prior alphabet must match channel input")
        if attacker_loss.unknown_alphabet != prior.alphabet:
            raise InvalidArgumentError("attacker loss must be over the prior alphabet")
        if system_loss is not None:
            if (system_loss.unknown_alphabet != prior.alphabet
                    or system_loss.estimate_alphabet != channel.output_alphabet):
                raise InvalidArgumentError(
                    "system loss must be over input x output alphabets")
        self.prior = prior
        self.channel = channel
        self.attacker_loss = attacker_loss
        self.system_loss = system_loss

    def joint(self) -> JointPmf:
        return joint_from(self.prior, self.channel)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        for key in ("prior", "channel", "attacker_loss"):
            if key not in d:
                raise InvalidArgumentError(f"scenario is missing {key!r}")
        unknown = d.keys() - {"prior", "channel", "attacker_loss", "system_loss"}
        if unknown:
            raise InvalidArgumentError(f"unknown scenario keys: {sorted(unknown)}")
        prior = Pmf.from_dict(d["prior"])
        channel = Channel.from_dict(d["channel"])
        # A channel side that repeats the prior's symbols without an
        # embedding of its own adopts the prior's (embedded) alphabet, so
        # geometric losses only need the embedding stated once.
        channel_in = _adopt(channel.input_alphabet, prior.alphabet)
        channel_out = _adopt(channel.output_alphabet, prior.alphabet)
        if (channel_in is not channel.input_alphabet
                or channel_out is not channel.output_alphabet):
            channel = Channel(channel_in, channel_out, channel.probs,
                              _exact=True)
        attacker = LossMatrix.from_dict(d["attacker_loss"], prior.alphabet)
        system = None
        if "system_loss" in d:
            system = LossMatrix.from_dict(d["system_loss"], prior.alphabet,
                                          channel.output_alphabet)
        return cls(prior, channel, attacker, system)


def _adopt(alphabet: Alphabet, reference: Alphabet) -> Alphabet:
    if alphabet.embedding is None and alphabet.symbols == reference.symbols:
        return reference
    return alphabet


def conditional_privacy(scenario: Scenario, y_index: int) -> float:
    """Attacker's minimum expected loss given the observation ``y_index``."""
    post = posterior(scenario.joint(), y_index)
    return bayes_estimate(post, scenario.attacker_loss)[1]


def min_entropy_identity(scenario: Scenario, y_index: int) -> tuple[float, float]:
    """Conditional privacy next to ``1 - 2**(-Hinf(X|y))``; equal under Hamming."""
    if not scenario.attacker_loss.is_hamming:
        raise InvalidArgumentError(
            "the min-entropy identity holds only for Hamming loss")
    post = posterior(scenario.joint(), y_index)
    privacy = bayes_estimate(post, scenario.attacker_loss)[1]
    return privacy, 1.0 - 2.0 ** (-renyi_entropy(post, math.inf))


@dataclass(frozen=True)
class ObservationRecord:
    y_index: int
    y_symbol: str
    probability: float
    privacy: float
    estimate_index: int
    estimate_symbol: str


@dataclass(frozen=True)
class PrivacyReport:
    per_observation: tuple[ObservationRecord, ...]
    worst_case: float
    average: float
    average_distortion: float | None
    skipped_observations: tuple[str, ...]

    def to_dict(self) -> dict:
        d = {
            "per_observation": [
                {
                    "y": rec.y_symbol,
                    "probability": rec.probability,
                    "conditional_privacy": rec.privacy,
                    "bayes_estimate": rec.estimate_symbol,
                }
                for rec in self.per_observation
            ],
            "worst_case": self.worst_case,
            "average": self.average,
        }
        if self.average_distortion is not None:
            d["average_distortion"] = self.average_distortion
        if self.skipped_observations:
            d["skipped_observations"] = list(self.skipped_observations)
        return d


def privacy_report(scenario: Scenario) -> PrivacyReport:
    """Per-observation, worst-case and average privacy (and distortion).

    Observations with probability zero are skipped and listed in the
    report; worst case and average range over the realizable ones only.
    """
    joint = scenario.joint()
    estimates = scenario.attacker_loss.estimate_alphabet.symbols
    records = []
    skipped = []
    for y in range(len(joint.col_alphabet)):
        try:
            post = posterior(joint, y)
        except UnobservableEvidenceError:
            skipped.append(joint.col_alphabet.symbols[y])
            continue
        idx, risk = bayes_estimate(post, scenario.attacker_loss)
        records.append(ObservationRecord(
            y_index=y,
            y_symbol=joint.col_alphabet.symbols[y],
            probability=float(joint.probs[:, y].sum()),
            privacy=risk,
            estimate_index=idx,
            estimate_symbol=estimates[idx],
        ))
    if not records:
        raise InvalidArgumentError("no observation has positive probability")
    average = float(sum(rec.probability * rec.privacy for rec in records))
    distortion = None
    if scenario.system_loss is not None:
        distortion = float((joint.probs * scenario.system_loss.costs).sum())
    return PrivacyReport(
        per_observation=tuple(records),
        worst_case=min(rec.privacy for rec in records),
        average=average,
        average_distortion=distortion,
        skipped_observations=tuple(skipped),
    )


@dataclass(frozen=True)
class PrivacyReduction:
    """Drop in conditional privacy after an observation, with its two bounds."""

    delta: float
    tv_bound: float
    pinsker_bound: float


def delta_conditional_privacy(prior: Pmf, post: Pmf,
                              loss: LossMatrix) -> PrivacyReduction:
    """How much an observation helps: prior-strategy minus posterior-strategy risk.

    Both expectations are under the posterior; the result is bounded by
    ``4 d_max TV(post||prior)`` and in turn by
    ``2 sqrt(2) d_max sqrt(D_nats(post||prior))``.
    """
    if prior.alphabet != post.alphabet:
        raise InvalidArgumentError("prior and posterior alphabets differ")
    if loss.unknown_alphabet != prior.alphabet:
        raise InvalidArgumentError("loss must be over the shared alphabet")
    x_prior = bayes_estimate(prior, loss)[0]
    x_post = bayes_estimate(post, loss)[0]
    delta = float(post.probs @ loss.costs[:, x_prior]
                  - post.probs @ loss.costs[:, x_post])
    # The posterior estimate minimizes posterior risk, so delta >= 0 up to
    # rounding; guard the sign.
    delta = max(delta, 0.0)
    tv_bound = 4.0 * loss.d_max * total_variation(post, prior)
    d_nats = kl_divergence(post, prior) * LN2
    pinsker = (2.0 * math.sqrt(2.0) * loss.d_max * math.sqrt(d_nats)
               if math.isfinite(d_nats) else math.inf)
    return PrivacyReduction(delta=delta, tv_bound=tv_bound, pinsker_bound=pinsker)
