"""Group weight vectors: derivation, loading, renormalization, comparison.

A weight vector assigns a nonnegative priority to every factor group and
sums to one. Vectors come from three strategies: proportional to observed
group means, a manually assigned table (including the built-in one,
addressable as ``paper-table-4``), or a uniform baseline.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from importlib import resources
from typing import Mapping

from .analytics import StatsSummary
from .display import render_table, round_half_up
from .errors import WeightError
from .schema import QuestionnaireSchema

BUILTIN_WEIGHTS = "paper-table-4"
BUILTIN_RESOURCE = "builtin_weights.csv"

#: Raw manual-table sums may drift from 1 by rounding of the individual
#: entries; anything inside this band is accepted and renormalized exactly.
RAW_SUM_TOLERANCE = 1e-3

NORMALIZATION_TOLERANCE = 1e-9


class WeightStrategy(str, Enum):
    MEAN_NORMALIZED = "mean_normalized"
    MANUAL = "manual"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class WeightVector:
    """Normalized group weights. ``weights`` maps group_id -> weight in
    ascending group order; construction helpers guarantee nonnegativity
    and a sum of one (within 1e-9)."""

    weights: Mapping[int, float]
    strategy: WeightStrategy
    source_note: str = ""

    @property
    def group_ids(self) -> tuple[int, ...]:
        return tuple(self.weights)

    def total(self) -> float:
        return math.fsum(self.weights.values())


def _build(raw: Mapping[int, float], strategy: WeightStrategy, source_note: str) -> WeightVector:
    """Normalize raw nonnegative weights into a valid vector."""
    for gid, value in raw.items():
        if value < 0:
            raise WeightError(f"weight for group {gid} is negative ({value})")
    total = math.fsum(raw.values())
    if total <= 0:
        raise WeightError("weights sum to zero; nothing to normalize")
    normalized = {gid: raw[gid] / total for gid in sorted(raw)}
    return WeightVector(weights=normalized, strategy=strategy, source_note=source_note)


def derive_weights_mean(stats: StatsSummary, schema: QuestionnaireSchema | None = None) -> WeightVector:
    """Weights proportional to group means: w_g = mean_g / sum of means."""
    means: dict[int, float] = {}
    for entry in stats.entries:
        if not isinstance(entry.key, int):
            raise WeightError("mean-normalized weights need group-level statistics")
        if entry.mean is None:
            raise WeightError(f"group {entry.key} has no mean (missing group entry)")
        if entry.mean <= 0:
            raise WeightError(f"group {entry.key} mean must be positive, got {entry.mean}")
        means[entry.key] = entry.mean
    if schema is not None:
        _check_group_coverage(set(means), set(schema.group_ids))
    return _build(
        means,
        WeightStrategy.MEAN_NORMALIZED,
        f"normalized from {len(means)} group means (N={stats.n_total}, {stats.convention.value})",
    )


def uniform_weights(schema: QuestionnaireSchema) -> WeightVector:
    """Neutral baseline: every group weighted 1/G."""
    count = len(schema.groups)
    return _build(
        {gid: 1.0 for gid in schema.group_ids},
        WeightStrategy.UNIFORM,
        f"uniform over {count} groups",
    )


def load_weight_table(source: str, schema: QuestionnaireSchema | None = None) -> WeightVector:
    """Load a manual weight table from CSV text, or the built-in table by name.

    The raw column must sum to 1 within +/-1e-3 (covering per-entry rounding
    drift); accepted tables are renormalized exactly and the raw values are
    preserved in ``source_note``.
    """
    if source.strip() == BUILTIN_WEIGHTS:
        text = resources.files("teacheval.data").joinpath(BUILTIN_RESOURCE).read_text("utf-8")
        name = BUILTIN_WEIGHTS
    else:
        text = source
        name = "weight table"

    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"group_id", "weight"} <= set(reader.fieldnames):
        raise WeightError("weight file needs columns group_id,weight")
    raw: dict[int, float] = {}
    for row_no, row in enumerate(reader, start=2):
        try:
            gid = int(row["group_id"])
            value = float(row["weight"])
        except (TypeError, ValueError):
            raise WeightError(f"malformed weight row", location=f"row {row_no}") from None
        if gid in raw:
            raise WeightError(f"duplicate weight for group {gid}", location=f"row {row_no}")
        if value < 0:
            raise WeightError(f"weight for group {gid} is negative ({value})", location=f"row {row_no}")
        raw[gid] = value
    if not raw:
        raise WeightError("weight file holds no rows")

    if schema is not None:
        _check_group_coverage(set(raw), set(schema.group_ids))

    raw_sum = math.fsum(raw.values())
    if abs(raw_sum - 1.0) > RAW_SUM_TOLERANCE:
        raise WeightError(
            f"raw weights sum to {raw_sum:.6f}; must be within {RAW_SUM_TOLERANCE} of 1"
        )
    raw_desc = " ".join(f"{gid}={raw[gid]:g}" for gid in sorted(raw))
    note = f"{name}: raw sum {raw_sum:.4f}; raw weights {raw_desc}"
    return _build(raw, WeightStrategy.MANUAL, note)


def _check_group_coverage(got: set[int], wanted: set[int]) -> None:
    missing = sorted(wanted - got)
    extra = sorted(got - wanted)
    if missing:
        raise WeightError(f"missing weights for groups {missing}")
    if extra:
        raise WeightError(f"weights for unknown groups {extra}")


def renormalize(vector: WeightVector) -> WeightVector:
    """Divide by the current sum; idempotent, order-preserving."""
    if any(value < 0 for value in vector.weights.values()):
        raise WeightError("cannot renormalize a vector with negative weights")
    total = math.fsum(vector.weights.values())
    if total <= 0:
        raise WeightError("cannot renormalize an all-zero vector")
    return WeightVector(
        weights={gid: value / total for gid, value in vector.weights.items()},
        strategy=vector.strategy,
        source_note=vector.source_note,
    )


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightComparisonRow:
    group_id: int
    weight_a: float
    weight_b: float
    difference: float
    rank_a: int
    rank_b: int


@dataclass(frozen=True)
class WeightComparison:
    rows: tuple[WeightComparisonRow, ...]
    spearman: float | None
    strategy_a: WeightStrategy
    strategy_b: WeightStrategy

    def top_group(self, side: str) -> int:
        """Group holding rank 1 in vector ``a`` or ``b`` (ties: smallest id)."""
        attr = f"rank_{side}"
        best = min(self.rows, key=lambda row: (getattr(row, attr), row.group_id))
        return best.group_id


def _competition_ranks(weights: Mapping[int, float]) -> dict[int, int]:
    """Descending competition ranks: equal weights share the smaller rank."""
    ordered = sorted(weights, key=lambda gid: (-weights[gid], gid))
    ranks: dict[int, int] = {}
    for position, gid in enumerate(ordered, start=1):
        previous = ordered[position - 2] if position > 1 else None
        if previous is not None and weights[gid] == weights[previous]:
            ranks[gid] = ranks[previous]
        else:
            ranks[gid] = position
    return ranks


def _average_ranks(weights: Mapping[int, float]) -> dict[int, Fraction]:
    """Descending fractional ranks with ties averaged (exact arithmetic)."""
    ordered = sorted(weights, key=lambda gid: (-weights[gid], gid))
    ranks: dict[int, Fraction] = {}
    position = 0
    while position < len(ordered):
        tied = [ordered[position]]
        while (
            position + len(tied) < len(ordered)
            and weights[ordered[position + len(tied)]] == weights[tied[0]]
        ):
            tied.append(ordered[position + len(tied)])
        first = position + 1
        last = position + len(tied)
        shared = Fraction(first + last, 2)
        for gid in tied:
            ranks[gid] = shared
        position += len(tied)
    return ranks


def _spearman(a: Mapping[int, float], b: Mapping[int, float]) -> float | None:
    """Rank correlation with average ranks for ties, computed exactly.

    Exact rational covariance/variance keeps perfect agreement at 1.0 and
    perfect reversal at -1.0 without floating drift. Undefined (None) when
    either vector is constant.
    """
    keys = sorted(a)
    ranks_a = _average_ranks(a)
    ranks_b = _average_ranks(b)
    n = len(keys)
    mean_a = sum(ranks_a[k] for k in keys) / n
    mean_b = sum(ranks_b[k] for k in keys) / n
    cov = sum((ranks_a[k] - mean_a) * (ranks_b[k] - mean_b) for k in keys)
    var_a = sum((ranks_a[k] - mean_a) ** 2 for k in keys)
    var_b = sum((ranks_b[k] - mean_b) ** 2 for k in keys)
    if var_a == 0 or var_b == 0:
        return None
    squared = cov * cov / (var_a * var_b)
    sign = 1.0 if cov > 0 else (-1.0 if cov < 0 else 0.0)
    if squared == 1:
        return sign
    return sign * math.sqrt(float(squared))


def compare_weights(a: WeightVector, b: WeightVector) -> WeightComparison:
    """Per-group differences, both rank orders, and their rank correlation."""
    if set(a.weights) != set(b.weights):
        raise WeightError("weight vectors cover different group sets")
    ranks_a = _competition_ranks(a.weights)
    ranks_b = _competition_ranks(b.weights)
    rows = tuple(
        WeightComparisonRow(
            group_id=gid,
            weight_a=a.weights[gid],
            weight_b=b.weights[gid],
            difference=a.weights[gid] - b.weights[gid],
            rank_a=ranks_a[gid],
            rank_b=ranks_b[gid],
        )
        for gid in sorted(a.weights)
    )
    return WeightComparison(
        rows=rows,
        spearman=_spearman(a.weights, b.weights),
        strategy_a=a.strategy,
        strategy_b=b.strategy,
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def format_weights_text(vector: WeightVector, schema: QuestionnaireSchema) -> str:
    headers = ["Group", "Factor", "Weight"]
    rows = [
        [str(gid), schema.group(gid).name, round_half_up(value, 4)]
        for gid, value in vector.weights.items()
    ]
    title = f"Weight assignment ({vector.strategy.value})"
    return title + "\n" + render_table(headers, rows, right_align={2}) + "\n"


def format_weights_csv(vector: WeightVector) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["group_id", "weight"])
    for gid, value in vector.weights.items():
        writer.writerow([gid, repr(value)])
    return out.getvalue()


def format_comparison_text(comparison: WeightComparison, schema: QuestionnaireSchema) -> str:
    headers = ["Group", "Factor", "A", "B", "Diff", "RankA", "RankB"]
    rows = [
        [
            str(row.group_id),
            schema.group(row.group_id).name,
            round_half_up(row.weight_a, 4),
            round_half_up(row.weight_b, 4),
            round_half_up(row.difference, 4),
            str(row.rank_a),
            str(row.rank_b),
        ]
        for row in comparison.rows
    ]
    lines = [
        f"Weight comparison: A={comparison.strategy_a.value} vs B={comparison.strategy_b.value}",
        render_table(headers, rows, right_align={2, 3, 4, 5, 6}),
        f"Top-ranked group: A={comparison.top_group('a')}, B={comparison.top_group('b')}",
    ]
    if comparison.spearman is None:
        lines.append("Spearman rank correlation: undefined (constant ranks)")
    else:
        lines.append(f"Spearman rank correlation: {round_half_up(comparison.spearman, 4)}")
    return "\n".join(lines) + "\n"


def format_comparison_csv(comparison: WeightComparison) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["group_id", "weight_a", "weight_b", "difference", "rank_a", "rank_b"])
    for row in comparison.rows:
        writer.writerow(
            [
                row.group_id,
                repr(row.weight_a),
                repr(row.weight_b),
                repr(row.difference),
                row.rank_a,
                row.rank_b,
            ]
        )
    return out.getvalue()
