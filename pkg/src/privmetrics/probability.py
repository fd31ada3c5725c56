"""Finite-alphabet probability objects: alphabets, pmfs, joint pmfs, channels.

Distributions are validated on construction: entries must be non-negative
and sum to one within ``NORMALIZATION_TOL`` (user-supplied JSON is never
bit-exact), after which they are divided by their computed sum and frozen.
Symbol order is load order and is significant: every matrix in the package
indexes by it, so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnobservableEvidenceError

NORMALIZATION_TOL = 1e-9


def _frozen_array(values, shape_name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{shape_name} contains non-finite entries")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Alphabet:
    """Ordered collection of distinct symbol labels.

    ``embedding`` optionally places each symbol in R^d (one coordinate
    tuple per symbol, all of the same dimension); geometric losses such as
    squared error require it.
    """

    symbols: tuple[str, ...]
    embedding: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if len(self.symbols) == 0:
            raise InvalidArgumentError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidArgumentError("alphabet symbols must be distinct")
        if self.embedding is not None:
            if len(self.embedding) != len(self.symbols):
                raise InvalidArgumentError("embedding must cover every symbol")
            dims = {len(point) for point in self.embedding}
            if len(dims) != 1:
                raise InvalidArgumentError("embedding points must share one dimension")

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise InvalidArgumentError(f"symbol {symbol!r} not in alphabet") from None

    def points(self) -> np.ndarray:
        """Embedding as an (n, d) array; raises when no embedding is attached."""
        if self.embedding is None:
            raise InvalidArgumentError("alphabet has no embedding")
        return np.asarray(self.embedding, dtype=np.float64)


def alphabet_from(symbols, embedding=None) -> Alphabet:
    emb = None
    if embedding is not None:
        emb = tuple(tuple(float(c) for c in point) for point in embedding)
    return Alphabet(tuple(str(s) for s in symbols), emb)


class Pmf:
    """Probability mass function over an :class:`Alphabet`.

    ``_exact=True`` skips the renormalizing division for probabilities that
    are exact by construction (e.g. the uniform distribution), so that
    closed-form identities hold to the last ulp.
    """

    __slots__ = ("alphabet", "probs")

    def __init__(self, alphabet: Alphabet, probs, _exact: bool = False):
        arr = _frozen_array(probs, "pmf")
        if arr.ndim != 1 or arr.shape[0] != len(alphabet):
            raise InvalidArgumentError("pmf length must match alphabet size")
        if np.any(arr < 0):
            raise InvalidArgumentError("pmf entries must be non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidArgumentError(
                f"pmf sums to {total!r}, outside tolerance {NORMALIZATION_TOL}"
            )
        if not _exact:
            arr = _frozen_array(arr / total, "pmf")
        self.alphabet = alphabet
        self.probs = arr

    def __len__(self) -> int:
        return len(self.alphabet)

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])

    def __repr__(self):
        return f"Pmf({self.alphabet.symbols!r}, {self.probs.tolist()!r})"

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def to_dict(self) -> dict:
        d = {"alphabet": list(self.alphabet.symbols), "probs": self.probs.tolist()}
        if self.alphabet.embedding is not None:
            d["embedding"] = [list(p) for p in self.alphabet.embedding]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Pmf":
        _require_keys(d, {"alphabet", "probs"}, optional={"embedding"})
        alphabet = alphabet_from(d["alphabet"], d.get("embedding"))
        return cls(alphabet, d["probs"])


class JointPmf:
    """Joint distribution over a row alphabet (X) and a column alphabet (Y)."""

    __slots__ = ("row_alphabet", "col_alphabet", "probs")

    def __init__(self, row_alphabet: Alphabet, col_alphabet: Alphabet, probs,
                 _exact: bool = False):
        arr = _frozen_array(probs, "joint pmf")
        if arr.shape != (len(row_alphabet), len(col_alphabet)):
            raise InvalidArgumentError("joint matrix shape must match alphabets")
        if np.any(arr < 0):
            raise InvalidArgumentError("joint entries must be non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidArgumentError(
                f"joint pmf sums to {total!r}, outside tolerance {NORMALIZATION_TOL}"
            )
        if not _exact:
            arr = _frozen_array(arr / total, "joint pmf")
        self.row_alphabet = row_alphabet
        self.col_alphabet = col_alphabet
        self.probs = arr

    def __repr__(self):
        return f"JointPmf({self.row_alphabet.symbols!r}, {self.col_alphabet.symbols!r})"

    def to_dict(self) -> dict:
        return {
            "input": list(self.row_alphabet.symbols),
            "output": list(self.col_alphabet.symbols),
            "matrix": [row.tolist() for row in self.probs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JointPmf":
        _require_keys(d, {"input", "output", "matrix"},
                      optional={"input_embedding", "output_embedding"})
        return cls(
            alphabet_from(d["input"], d.get("input_embedding")),
            alphabet_from(d["output"], d.get("output_embedding")),
            d["matrix"],
        )


class Channel:
    """Conditional distribution: one pmf over the output alphabet per input symbol."""

    __slots__ = ("input_alphabet", "output_alphabet", "probs")

    def __init__(self, input_alphabet: Alphabet, output_alphabet: Alphabet, rows,
                 _exact: bool = False):
        arr = _frozen_array(rows, "channel")
        if arr.shape != (len(input_alphabet), len(output_alphabet)):
            raise InvalidArgumentError("channel shape must match alphabets")
        if np.any(arr < 0):
            raise InvalidArgumentError("channel entries must be non-negative")
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > NORMALIZATION_TOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise InvalidArgumentError(
                f"channel row {bad} sums to {float(sums[bad])!r}"
            )
        if not _exact:
            arr = _frozen_array(arr / sums[:, None], "channel")
        self.input_alphabet = input_alphabet
        self.output_alphabet = output_alphabet
        self.probs = arr

    def row(self, x_index: int) -> Pmf:
        return Pmf(self.output_alphabet, self.probs[x_index], _exact=True)

    def __repr__(self):
        return (f"Channel({self.input_alphabet.symbols!r} -> "
                f"{self.output_alphabet.symbols!r})")

    def to_dict(self) -> dict:
        d = {
            "input": list(self.input_alphabet.symbols),
            "output": list(self.output_alphabet.symbols),
            "rows": [row.tolist() for row in self.probs],
        }
        if self.input_alphabet.embedding is not None:
            d["input_embedding"] = [list(p) for p in self.input_alphabet.embedding]
        if self.output_alphabet.embedding is not None:
            d["output_embedding"] = [list(p) for p in self.output_alphabet.embedding]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Channel":
        _require_keys(d, {"input", "output", "rows"},
                      optional={"input_embedding", "output_embedding"})
        return cls(
            alphabet_from(d["input"], d.get("input_embedding")),
            alphabet_from(d["output"], d.get("output_embedding")),
            d["rows"],
        )


def _require_keys(d: dict, required: set, optional: set = frozenset()):
    if not isinstance(d, dict):
        raise InvalidArgumentError(f"expected a JSON object, got {type(d).__name__}")
    missing = required - d.keys()
    if missing:
        raise InvalidArgumentError(f"missing keys: {sorted(missing)}")
    unknown = d.keys() - required - optional
    if unknown:
        raise InvalidArgumentError(f"unknown keys: {sorted(unknown)}")


def make_uniform(alphabet: Alphabet) -> Pmf:
    """Uniform distribution; each probability is exactly ``1/len(alphabet)``."""
    n = len(alphabet)
    return Pmf(alphabet, np.full(n, 1.0 / n), _exact=True)


def joint_from(prior: Pmf, channel: Channel) -> JointPmf:
    """Compose a prior with a channel into the joint over (input, output)."""
    if prior.alphabet != channel.input_alphabet:
        raise InvalidArgumentError("prior alphabet must match channel input")
    return JointPmf(channel.input_alphabet, channel.output_alphabet,
                    prior.probs[:, None] * channel.probs)


def posterior(joint: JointPmf, y_index: int) -> Pmf:
    """Column ``y_index`` renormalized: the conditional over X given Y=y."""
    if not 0 <= y_index < len(joint.col_alphabet):
        raise InvalidArgumentError(f"observation index {y_index} out of range")
    col = joint.probs[:, y_index]
    p_y = float(col.sum())
    if p_y <= 0.0:
        raise UnobservableEvidenceError(
            f"observation {joint.col_alphabet.symbols[y_index]!r} has probability zero"
        )
    return Pmf(joint.row_alphabet, col / p_y, _exact=True)


def marginals(joint: JointPmf) -> tuple[Pmf, Pmf]:
    """Row-sum (X) and column-sum (Y) distributions of a joint pmf."""
    return (Pmf(joint.row_alphabet, joint.probs.sum(axis=1), _exact=True),
            Pmf(joint.col_alphabet, joint.probs.sum(axis=0), _exact=True))


def compose(first: Channel, second: Channel) -> Channel:
    """Feed the output of ``first`` into ``second`` (matrix product of rows)."""
    if first.output_alphabet != second.input_alphabet:
        raise InvalidArgumentError("channel alphabets do not chain")
    return Channel(first.input_alphabet, second.output_alphabet,
                   first.probs @ second.probs)
