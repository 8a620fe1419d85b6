"""Descriptive statistics over response datasets.

Means and variances are accumulated in exact rational arithmetic and only
converted to floats at the edge, so results are independent of record
order and agree with a direct two-pass evaluation to well below 1e-12.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from math import sqrt
from typing import Mapping

from .display import render_table, round_half_up
from .errors import AnalyticsError
from .ingest import AdminRole, ExpertProfile, RatingMode, ResponseDataset
from .schema import QuestionnaireSchema


class Convention(str, Enum):
    """Standard-deviation denominator: n-1 (sample) or n (population)."""

    SAMPLE = "sample"
    POPULATION = "population"


@dataclass(frozen=True)
class StatsEntry:
    key: int | str
    n: int
    mean: float | None
    std_dev: float | None
    min: float | None
    max: float | None


@dataclass(frozen=True)
class StatsSummary:
    entries: tuple[StatsEntry, ...]
    convention: Convention
    n_total: int


def _entry(key, values: list[Fraction], convention: Convention) -> StatsEntry:
    if not values:
        return StatsEntry(key=key, n=0, mean=None, std_dev=None, min=None, max=None)
    n = len(values)
    total = sum(values)
    total_sq = sum(v * v for v in values)
    mean = Fraction(total, n)
    # Exact central second moment via the raw moments.
    sq_dev_sum = total_sq - n * mean * mean
    if n == 1:
        variance = Fraction(0)
    elif convention is Convention.SAMPLE:
        variance = sq_dev_sum / (n - 1)
    else:
        variance = sq_dev_sum / n
    return StatsEntry(
        key=key,
        n=n,
        mean=float(mean),
        std_dev=sqrt(variance) if variance > 0 else 0.0,
        min=float(min(values)),
        max=float(max(values)),
    )


def _group_contributions(dataset: ResponseDataset, schema: QuestionnaireSchema) -> dict[int, list[Fraction]]:
    """Per-group rating lists; item-level records collapse to the
    unweighted mean of the respondent's item ratings in that group."""
    per_group: dict[int, list[Fraction]] = {gid: [] for gid in schema.group_ids}
    for record in dataset.records:
        if record.mode is RatingMode.GROUP:
            for gid, rating in record.ratings.items():
                if gid in per_group:
                    per_group[gid].append(Fraction(rating))
        else:
            for group in schema.groups:
                rated = [record.ratings[iid] for iid in group.item_ids if iid in record.ratings]
                if rated:
                    per_group[group.group_id].append(Fraction(sum(rated), len(rated)))
    return per_group


def group_stats(
    dataset: ResponseDataset,
    schema: QuestionnaireSchema,
    convention: Convention = Convention.SAMPLE,
    *,
    strict: bool = True,
) -> StatsSummary:
    """One entry per factor group, in schema order.

    In strict mode a group with no contributing ratings is an error; in
    lenient mode it yields an empty (n=0) entry.
    """
    if not dataset.records:
        raise AnalyticsError("dataset has no response records")
    per_group = _group_contributions(dataset, schema)
    entries = []
    for gid in schema.group_ids:
        values = per_group[gid]
        if not values and strict:
            raise AnalyticsError(f"group {gid} has no contributing ratings")
        entries.append(_entry(gid, values, convention))
    return StatsSummary(entries=tuple(entries), convention=convention, n_total=len(dataset.records))


def item_stats(
    dataset: ResponseDataset,
    schema: QuestionnaireSchema,
    convention: Convention = Convention.SAMPLE,
    *,
    strict: bool = True,
) -> StatsSummary:
    """One entry per item, in schema order, over item-level records only."""
    if not dataset.records:
        raise AnalyticsError("dataset has no response records")
    item_records = [r for r in dataset.records if r.mode is RatingMode.ITEM]
    if not item_records:
        raise AnalyticsError("dataset is group-level only; item statistics need item-level records")
    per_item: dict[str, list[Fraction]] = {iid: [] for iid in schema.item_ids()}
    for record in item_records:
        for iid, rating in record.ratings.items():
            if iid in per_item:
                per_item[iid].append(Fraction(rating))
    entries = []
    for iid in schema.item_ids():
        values = per_item[iid]
        if not values and strict:
            raise AnalyticsError(f"item {iid!r} has no contributing ratings")
        entries.append(_entry(iid, values, convention))
    return StatsSummary(entries=tuple(entries), convention=convention, n_total=len(item_records))


# ---------------------------------------------------------------------------
# Cohort filtering
# ---------------------------------------------------------------------------

_PROFILE_FIELDS = {
    "gender",
    "designation",
    "qualification",
    "admin_experience",
    "specialty",
    "region",
}


def _profile_matches(profile: ExpertProfile, constraints: Mapping[str, object]) -> bool:
    for attr, wanted in constraints.items():
        actual = getattr(profile, attr)
        if attr == "admin_experience":
            role = AdminRole(wanted) if not isinstance(wanted, AdminRole) else wanted
            if role not in actual:
                return False
        else:
            wanted_value = wanted.value if isinstance(wanted, Enum) else str(wanted)
            if actual.value != wanted_value:
                return False
    return True


def cohort_filter(dataset: ResponseDataset, constraints: Mapping[str, object]) -> ResponseDataset:
    """Keep exactly the records whose profiles satisfy every constraint.

    Constraint keys are profile attribute names; ``admin_experience`` matches
    by set membership, everything else by equality. An empty constraint set
    returns the dataset unchanged; sent counts are carried over with a
    provenance note.
    """
    for attr in constraints:
        if attr not in _PROFILE_FIELDS:
            raise AnalyticsError(f"unknown profile attribute {attr!r}")
    if not constraints:
        return dataset

    kept = tuple(
        record
        for record in dataset.records
        if record.respondent_id in dataset.profiles
        and _profile_matches(dataset.profiles[record.respondent_id], constraints)
    )
    kept_ids = {record.respondent_id for record in kept}
    described = ", ".join(
        f"{attr}={value.value if isinstance(value, Enum) else value}"
        for attr, value in constraints.items()
    )
    note = f"cohort: {described}"
    if dataset.note:
        note = f"{dataset.note}; {note}"
    return replace(
        dataset,
        records=kept,
        profiles={rid: p for rid, p in dataset.profiles.items() if rid in kept_ids},
        note=note,
    )


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def _key_label(key, schema: QuestionnaireSchema) -> str:
    if isinstance(key, int):
        return schema.group(key).name
    found = schema.find_item(key)
    return found[1].label if found else ""


def format_stats_text(summary: StatsSummary, schema: QuestionnaireSchema) -> str:
    """Aligned response-summary table (factor, mean, standard deviation)."""
    headers = ["Key", "Factor", "N", "Mean", "Std Dev", "Min", "Max"]
    rows = []
    for entry in summary.entries:
        rows.append(
            [
                str(entry.key),
                _key_label(entry.key, schema),
                str(entry.n),
                "-" if entry.mean is None else round_half_up(entry.mean, 2),
                "-" if entry.std_dev is None else round_half_up(entry.std_dev, 3),
                "-" if entry.min is None else round_half_up(entry.min, 2),
                "-" if entry.max is None else round_half_up(entry.max, 2),
            ]
        )
    title = f"Response summary (N={summary.n_total}, {summary.convention.value} std dev)"
    return title + "\n" + render_table(headers, rows, right_align={2, 3, 4, 5, 6}) + "\n"


def format_stats_csv(summary: StatsSummary) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["key", "n", "mean", "std_dev", "min", "max"])
    for e in summary.entries:
        writer.writerow(
            [
                e.key,
                e.n,
                "" if e.mean is None else repr(e.mean),
                "" if e.std_dev is None else repr(e.std_dev),
                "" if e.min is None else repr(e.min),
                "" if e.max is None else repr(e.max),
            ]
        )
    return out.getvalue()
