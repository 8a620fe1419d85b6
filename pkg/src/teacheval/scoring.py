"""Evaluatee scoring and ranking.

An evaluatee's overall score is a two-level convex combination: item
ratings aggregate to a group score (uniform item weights unless given),
and group scores aggregate under the group weight vector. Scores live on
the native 1..5 scale with a derived [0,1] normalization; rankings are
deterministic (competition ranks, id tie-break).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Mapping

from .display import render_table, round_half_up
from .errors import ScoringError
from .schema import QuestionnaireSchema
from .weights import NORMALIZATION_TOLERANCE, WeightVector

SCALE_MIN = 1.0
SCALE_MAX = 5.0


@dataclass(frozen=True)
class EvaluateeRecord:
    evaluatee_id: str
    ratings: Mapping[str, float]


@dataclass(frozen=True)
class ScoreCard:
    evaluatee_id: str
    group_scores: Mapping[int, float]
    overall: float
    normalized: float
    rank: int | None = None


def score_group(
    ratings: Mapping[str, float], within_weights: Mapping[str, float] | None = None
) -> float:
    """Convex combination of one group's item ratings.

    ``within_weights``, when given, must cover exactly the rated items,
    be nonnegative, and sum to one; the default is uniform.
    """
    if not ratings:
        raise ScoringError("cannot score a group with no rated items")
    if within_weights is None:
        return math.fsum(ratings.values()) / len(ratings)
    if set(within_weights) != set(ratings):
        raise ScoringError("within-group weights do not match the rated items")
    if any(value < 0 for value in within_weights.values()):
        raise ScoringError("within-group weights must be nonnegative")
    total = math.fsum(within_weights.values())
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise ScoringError(f"within-group weights sum to {total!r}, not 1")
    return math.fsum(within_weights[iid] * ratings[iid] for iid in ratings)


def score_overall(
    record: EvaluateeRecord,
    weights: WeightVector,
    schema: QuestionnaireSchema,
    *,
    within_weights: Mapping[str, float] | None = None,
    strict: bool = True,
) -> ScoreCard:
    """Weighted summation over group scores -> unranked scorecard.

    Strict mode requires every schema item rated exactly once. Lenient mode
    scores each group over its rated items only (uniform weights renormalize
    over what is present) but still rejects groups with nothing rated.
    """
    if set(weights.weights) != set(schema.group_ids):
        raise ScoringError("weight vector does not cover the schema's groups")

    valid_items = set(schema.item_ids())
    unknown = sorted(set(record.ratings) - valid_items)
    if unknown:
        raise ScoringError(
            f"evaluatee {record.evaluatee_id!r} rates unknown items {unknown[:5]}"
        )
    for iid, value in record.ratings.items():
        if not SCALE_MIN <= value <= SCALE_MAX:
            raise ScoringError(
                f"rating {value!r} for item {iid!r} outside scale bounds [1, 5]"
            )
    if strict:
        missing = sorted(valid_items - set(record.ratings))
        if missing:
            raise ScoringError(
                f"evaluatee {record.evaluatee_id!r} missing ratings for {missing[:5]}"
                + ("..." if len(missing) > 5 else "")
            )

    group_scores: dict[int, float] = {}
    for group in schema.groups:
        rated = {iid: record.ratings[iid] for iid in group.item_ids if iid in record.ratings}
        if not rated:
            raise ScoringError(
                f"evaluatee {record.evaluatee_id!r} has no ratings in group {group.group_id}"
            )
        if within_weights is not None:
            group_weights = {iid: within_weights[iid] for iid in rated if iid in within_weights}
            group_scores[group.group_id] = score_group(rated, group_weights)
        else:
            group_scores[group.group_id] = score_group(rated)

    raw = math.fsum(weights.weights[gid] * group_scores[gid] for gid in group_scores)
    # Convex combinations stay in [1, 5] mathematically; pin down the last
    # ulp of floating drift so the bounds hold exactly.
    overall = min(SCALE_MAX, max(SCALE_MIN, raw))
    normalized = min(1.0, max(0.0, (overall - SCALE_MIN) / (SCALE_MAX - SCALE_MIN)))
    return ScoreCard(
        evaluatee_id=record.evaluatee_id,
        group_scores=group_scores,
        overall=overall,
        normalized=normalized,
    )


def rank(cards: list[ScoreCard]) -> list[ScoreCard]:
    """Order cards best-first and assign competition ranks (1, 2, 2, 4).

    Ties on the overall score share the smaller rank and are ordered by
    ascending evaluatee id.
    """
    seen: set[str] = set()
    for card in cards:
        if card.evaluatee_id in seen:
            raise ScoringError(f"duplicate evaluatee_id {card.evaluatee_id!r}")
        seen.add(card.evaluatee_id)

    ordered = sorted(cards, key=lambda card: (-card.overall, card.evaluatee_id))
    ranked: list[ScoreCard] = []
    for position, card in enumerate(ordered, start=1):
        if ranked and card.overall == ordered[position - 2].overall:
            assigned = ranked[-1].rank
        else:
            assigned = position
        ranked.append(replace(card, rank=assigned))
    return ranked


# ---------------------------------------------------------------------------
# Evaluatee ratings file
# ---------------------------------------------------------------------------

_RATING_COLUMNS = ["evaluatee_id", "item_id", "rating"]


def parse_evaluatee_ratings(document: str, schema: QuestionnaireSchema) -> list[EvaluateeRecord]:
    """Parse the long-form evaluatee ratings CSV (evaluatee_id,item_id,rating)."""
    reader = csv.DictReader(io.StringIO(document))
    if reader.fieldnames is None:
        raise ScoringError("ratings document is empty")
    missing = [c for c in _RATING_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise ScoringError(f"ratings header lacks columns: {', '.join(missing)}")

    valid_items = set(schema.item_ids())
    order: list[str] = []
    ratings: dict[str, dict[str, float]] = {}
    for row_no, row in enumerate(reader, start=2):
        loc = f"row {row_no}"
        eid = (row.get("evaluatee_id") or "").strip()
        iid = (row.get("item_id") or "").strip()
        if not eid:
            raise ScoringError("missing evaluatee_id", location=loc)
        if iid not in valid_items:
            raise ScoringError(f"unknown item id {iid!r}", location=loc)
        try:
            value = float(row.get("rating"))
        except (TypeError, ValueError):
            raise ScoringError(f"rating {row.get('rating')!r} is not a number", location=loc) from None
        if not SCALE_MIN <= value <= SCALE_MAX:
            raise ScoringError(f"rating {value} outside scale bounds [1, 5]", location=loc)
        if eid not in ratings:
            order.append(eid)
            ratings[eid] = {}
        if iid in ratings[eid]:
            raise ScoringError(f"evaluatee {eid!r} rates item {iid!r} twice", location=loc)
        ratings[eid][iid] = value
    return [EvaluateeRecord(evaluatee_id=eid, ratings=ratings[eid]) for eid in order]


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def format_scorecards_csv(cards: list[ScoreCard], schema: QuestionnaireSchema) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    group_columns = [f"group_{gid}" for gid in schema.group_ids]
    writer.writerow(["evaluatee_id", *group_columns, "overall", "normalized", "rank"])
    for card in cards:
        writer.writerow(
            [
                card.evaluatee_id,
                *(repr(card.group_scores[gid]) for gid in schema.group_ids),
                repr(card.overall),
                repr(card.normalized),
                "" if card.rank is None else card.rank,
            ]
        )
    return out.getvalue()


def format_leaderboard_text(cards: list[ScoreCard]) -> str:
    headers = ["Rank", "Evaluatee", "Overall", "Normalized"]
    rows = [
        [
            "-" if card.rank is None else str(card.rank),
            card.evaluatee_id,
            round_half_up(card.overall, 4),
            round_half_up(card.normalized, 4),
        ]
        for card in cards
    ]
    return "Evaluatee ranking\n" + render_table(headers, rows, right_align={0, 2, 3}) + "\n"
