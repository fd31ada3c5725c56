"""Released-table model and statistical disclosure criteria.

A table is evaluated as published: rows are grouped into equivalence
classes by their key-attribute tuple, each class induces an empirical
posterior over the confidential attribute, and the criteria compare those
posteriors against the table-wide prior.  Identifier and ignored columns
never enter any computation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .information import kl_divergence, renyi_entropy
from .probability import Alphabet, JointPmf, Pmf

ROLES = ("identifier", "key", "confidential", "ignored")


@dataclass(frozen=True)
class MicrodataTable:
    """Records with per-column roles; cells are text."""

    column_names: tuple[str, ...]
    roles: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.roles) != len(self.column_names):
            raise InvalidArgumentError("one role per column required")
        for role in self.roles:
            if role not in ROLES:
                raise InvalidArgumentError(f"unknown role {role!r}")
        if len(set(self.column_names)) != len(self.column_names):
            raise InvalidArgumentError("column names must be distinct")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.column_names):
                raise InvalidArgumentError(f"row {i} has {len(row)} cells")
        if not self.rows:
            raise InvalidArgumentError("table has no rows")

    def columns_with_role(self, role: str) -> tuple[str, ...]:
        return tuple(name for name, r in zip(self.column_names, self.roles)
                     if r == role)

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise InvalidArgumentError(f"no column named {name!r}") from None

    def column(self, name: str) -> tuple[str, ...]:
        i = self.column_index(name)
        return tuple(row[i] for row in self.rows)


def table_from_csv(text: str, roles: dict[str, str]) -> MicrodataTable:
    """Parse CSV with a header row; ``roles`` maps column name to role.

    Columns absent from ``roles`` default to ``ignored``; names in
    ``roles`` that do not appear in the header are rejected.
    """
    reader = csv.reader(io.StringIO(text))
    table_rows = [tuple(cell.strip() for cell in row) for row in reader if row]
    if len(table_rows) < 2:
        raise InvalidArgumentError("CSV needs a header row and at least one record")
    header = table_rows[0]
    unknown = set(roles) - set(header)
    if unknown:
        raise InvalidArgumentError(f"roles name missing columns: {sorted(unknown)}")
    assigned = tuple(roles.get(name, "ignored") for name in header)
    return MicrodataTable(header, assigned, tuple(table_rows[1:]))


def confidential_alphabet(table: MicrodataTable, column: str) -> Alphabet:
    """Distinct confidential values in order of first appearance."""
    seen: dict[str, None] = {}
    for value in table.column(column):
        seen.setdefault(value, None)
    return Alphabet(tuple(seen))


def empirical_prior(table: MicrodataTable, column: str) -> Pmf:
    """Table-wide distribution of the confidential attribute."""
    alphabet = confidential_alphabet(table, column)
    counts = np.zeros(len(alphabet))
    for value in table.column(column):
        counts[alphabet.index(value)] += 1
    return Pmf(alphabet, counts / len(table.rows), _exact=True)


@dataclass(frozen=True)
class EquivalenceClass:
    """Rows sharing one key-attribute tuple, with their confidential pmf.

    The pmf is over the table-wide confidential alphabet, so values absent
    from the class carry zero mass.
    """

    key_tuple: tuple[str, ...]
    row_indices: tuple[int, ...]
    confidential_pmf: Pmf

    @property
    def size(self) -> int:
        return len(self.row_indices)


def _single_confidential(table: MicrodataTable, column: str | None) -> str:
    confidential = table.columns_with_role("confidential")
    if column is not None:
        if column not in confidential:
            raise InvalidArgumentError(
                f"{column!r} is not marked confidential")
        return column
    if len(confidential) != 1:
        raise InvalidArgumentError(
            f"table has {len(confidential)} confidential columns; name one")
    return confidential[0]


def partition(table: MicrodataTable,
              confidential_column: str | None = None) -> list[EquivalenceClass]:
    """Group rows by exact key-tuple match; classes sorted by key tuple."""
    key_columns = table.columns_with_role("key")
    if not key_columns:
        raise InvalidArgumentError("table has no key columns")
    column = _single_confidential(table, confidential_column)
    alphabet = confidential_alphabet(table, column)
    key_idx = [table.column_index(name) for name in key_columns]
    conf_idx = table.column_index(column)

    groups: dict[tuple[str, ...], list[int]] = {}
    for i, row in enumerate(table.rows):
        groups.setdefault(tuple(row[j] for j in key_idx), []).append(i)

    classes = []
    for key_tuple in sorted(groups):
        indices = groups[key_tuple]
        counts = np.zeros(len(alphabet))
        for i in indices:
            counts[alphabet.index(table.rows[i][conf_idx])] += 1
        classes.append(EquivalenceClass(
            key_tuple=key_tuple,
            row_indices=tuple(indices),
            confidential_pmf=Pmf(alphabet, counts / len(indices), _exact=True),
        ))
    return classes


def k_anonymity(classes: list[EquivalenceClass]) -> int:
    """Smallest equivalence-class size."""
    if not classes:
        raise InvalidArgumentError("no equivalence classes")
    return min(c.size for c in classes)


def l_diversity(classes: list[EquivalenceClass]) -> tuple[int, float]:
    """(distinct, entropy) diversity: worst class by each reading.

    The entropy figure is the largest ``l`` the table satisfies under the
    entropy criterion, i.e. ``2**H`` of the worst class.
    """
    if not classes:
        raise InvalidArgumentError("no equivalence classes")
    distinct = min(int((c.confidential_pmf.probs > 0).sum()) for c in classes)
    entropy_l = min(2.0 ** renyi_entropy(c.confidential_pmf, 1.0)
                    for c in classes)
    return distinct, entropy_l


def t_closeness(classes: list[EquivalenceClass], prior: Pmf) -> float:
    """Largest divergence (bits) of a class posterior from the prior."""
    return max(kl_divergence(c.confidential_pmf, prior) for c in classes)


def delta_disclosure(classes: list[EquivalenceClass], prior: Pmf) -> float:
    """Largest absolute posterior/prior log ratio (bits) over classes and values.

    Ratios are taken over every value the prior supports; a class that has
    no mass on such a value contributes +inf.
    """
    worst = 0.0
    support = prior.probs > 0
    for c in classes:
        post = c.confidential_pmf.probs[support]
        if np.any(post == 0):
            return math.inf
        ratios = np.abs(np.log2(post / prior.probs[support]))
        worst = max(worst, float(ratios.max()))
    return worst


def class_weights(classes: list[EquivalenceClass]) -> np.ndarray:
    total = sum(c.size for c in classes)
    return np.array([c.size / total for c in classes])


def privacy_risk(classes: list[EquivalenceClass], prior: Pmf) -> float:
    """Average posterior-vs-prior divergence (bits), weighted by class size."""
    weights = class_weights(classes)
    return float(sum(
        w * kl_divergence(c.confidential_pmf, prior)
        for w, c in zip(weights, classes)
    ))


def induced_joint(classes: list[EquivalenceClass]) -> JointPmf:
    """Joint over (confidential value, equivalence class) implied by the table."""
    weights = class_weights(classes)
    matrix = np.column_stack([
        w * c.confidential_pmf.probs for w, c in zip(weights, classes)
    ])
    row_alphabet = classes[0].confidential_pmf.alphabet
    col_alphabet = Alphabet(tuple(f"class{i}" for i in range(len(classes))))
    return JointPmf(row_alphabet, col_alphabet, matrix)


def epsilon_max_log_ratio(p: Pmf, q: Pmf) -> float:
    """Worst-case two-sided log ratio (bits) between two output distributions.

    Symbols with zero mass under both pmfs are skipped; mass on one side
    only makes the ratio unbounded.
    """
    if p.alphabet != q.alphabet:
        raise InvalidArgumentError("pmfs are over different alphabets")
    worst = 0.0
    for pi, qi in zip(p.probs, q.probs):
        if pi == 0 and qi == 0:
            continue
        if pi == 0 or qi == 0:
            return math.inf
        worst = max(worst, math.log2(pi / qi), math.log2(qi / pi))
    return worst


@dataclass(frozen=True)
class ClassDiagnostic:
    key_tuple: tuple[str, ...]
    size: int
    distinct_values: int
    entropy_bits: float
    divergence_bits: float
    max_abs_log_ratio: float
    uniform_on_support: bool


@dataclass(frozen=True)
class SdcReport:
    """All criteria for one confidential column, plus per-class diagnostics.

    ``uniform_on_support`` flags classes whose confidential distribution is
    not uniform over its support: size-based anonymity reads the class as a
    uniform posterior, which such classes violate (a diagnostic, not an
    error).
    """

    confidential_column: str
    k: int
    l_distinct: int
    l_entropy: float
    t: float
    delta: float
    risk: float
    classes: tuple[ClassDiagnostic, ...]

    def __post_init__(self):
        assert self.risk <= self.t + 1e-12
        assert self.t <= self.delta + 1e-12

    def has_infinite_criterion(self) -> bool:
        return math.isinf(self.t) or math.isinf(self.delta) or math.isinf(self.risk)

    def to_dict(self) -> dict:
        return {
            "confidential": self.confidential_column,
            "k": self.k,
            "l_distinct": self.l_distinct,
            "l_entropy": self.l_entropy,
            "t": self.t,
            "delta": self.delta,
            "risk": self.risk,
            "classes": [
                {
                    "key_tuple": list(c.key_tuple),
                    "size": c.size,
                    "distinct_values": c.distinct_values,
                    "entropy_bits": c.entropy_bits,
                    "divergence_bits": c.divergence_bits,
                    "max_abs_log_ratio": c.max_abs_log_ratio,
                    "uniform_on_support": c.uniform_on_support,
                }
                for c in self.classes
            ],
        }


def _class_max_ratio(c: EquivalenceClass, prior: Pmf) -> float:
    support = prior.probs > 0
    post = c.confidential_pmf.probs[support]
    if np.any(post == 0):
        return math.inf
    return float(np.abs(np.log2(post / prior.probs[support])).max())


def sdc_report(table: MicrodataTable, confidential_column: str | None = None,
               prior: Pmf | None = None) -> SdcReport:
    """Evaluate every criterion on one confidential column.

    The prior defaults to the table-wide empirical distribution; an
    external one (attacker background knowledge) may be supplied as long
    as it shares the confidential alphabet.
    """
    column = _single_confidential(table, confidential_column)
    classes = partition(table, column)
    if prior is None:
        prior = empirical_prior(table, column)
    elif prior.alphabet != classes[0].confidential_pmf.alphabet:
        raise InvalidArgumentError(
            "external prior must be over the table's confidential alphabet")
    distinct, entropy_l = l_diversity(classes)
    diagnostics = []
    for c in classes:
        support = c.confidential_pmf.probs[c.confidential_pmf.probs > 0]
        diagnostics.append(ClassDiagnostic(
            key_tuple=c.key_tuple,
            size=c.size,
            distinct_values=int((c.confidential_pmf.probs > 0).sum()),
            entropy_bits=renyi_entropy(c.confidential_pmf, 1.0),
            divergence_bits=kl_divergence(c.confidential_pmf, prior),
            max_abs_log_ratio=_class_max_ratio(c, prior),
            uniform_on_support=bool(np.allclose(support, support[0], rtol=0, atol=0)),
        ))
    return SdcReport(
        confidential_column=column,
        k=k_anonymity(classes),
        l_distinct=distinct,
        l_entropy=entropy_l,
        t=t_closeness(classes, prior),
        delta=delta_disclosure(classes, prior),
        risk=privacy_risk(classes, prior),
        classes=tuple(diagnostics),
    )
