#!/usr/bin/env python3
"""Regenerate the deterministic demo inputs under sample_data/.

The synthetic expert panel has 25 respondents (10 post, 6 email, 9 by
hand, matching sent counts of 50/21/16). Each group's rating multiset is
chosen by exhaustive search so the panel reproduces the target mean
exactly and the target sample standard deviation as closely as an
integer multiset allows. No randomness anywhere: rerunning this script
rewrites identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from teacheval.schema import canonical_schema, schema_to_obj  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "sample_data"

# Per-group (mean, sample std) targets for the synthetic panel, N=25.
GROUP_TARGETS = [
    (4.48, 0.653),
    (4.36, 0.810),
    (4.28, 0.936),
    (4.28, 0.737),
    (4.12, 1.053),
    (4.16, 0.986),
    (4.32, 1.029),
    (4.00, 1.080),
    (3.96, 0.934),
    (4.28, 0.842),
    (4.08, 0.862),
    (4.28, 0.842),
    (3.96, 1.059),
    (3.88, 1.235),
    (3.72, 1.275),
]

N = 25


def search_multiset(mean: float, std: float) -> list[int]:
    """Smallest-|std error| multiset of N ratings in 1..5 with the exact mean."""
    target_sum = round(mean * N)
    assert abs(target_sum - mean * N) < 1e-9, "mean must be a multiple of 1/N"
    best = None
    for ones in range(N + 1):
        for twos in range(N + 1 - ones):
            for threes in range(N + 1 - ones - twos):
                for fours in range(N + 1 - ones - twos - threes):
                    fives = N - ones - twos - threes - fours
                    total = ones + 2 * twos + 3 * threes + 4 * fours + 5 * fives
                    if total != target_sum:
                        continue
                    counts = (ones, twos, threes, fours, fives)
                    mu = total / N
                    sq = sum(c * (v - mu) ** 2 for v, c in zip((1, 2, 3, 4, 5), counts))
                    err = abs(math.sqrt(sq / (N - 1)) - std)
                    key = (err, counts)
                    if best is None or key < best:
                        best = key
    assert best is not None
    counts = best[1]
    values: list[int] = []
    for value, count in zip((1, 2, 3, 4, 5), counts):
        values.extend([value] * count)
    values.sort(reverse=True)
    return values


def write_responses() -> None:
    rows = []
    respondents = [f"E{i:02d}" for i in range(1, N + 1)]
    channels = ["post"] * 10 + ["email"] * 6 + ["by_hand"] * 9
    per_group = {
        gid: search_multiset(mean, std)
        for gid, (mean, std) in enumerate(GROUP_TARGETS, start=1)
    }
    for r, rid in enumerate(respondents):
        for gid in range(1, 16):
            values = per_group[gid]
            rating = values[(r + 7 * (gid - 1)) % N]
            rows.append([rid, channels[r], "group", gid, rating])
    with open(OUT / "responses.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["respondent_id", "channel", "mode", "key", "rating"])
        writer.writerows(rows)


def write_profiles() -> None:
    genders = ["male", "female"]
    designations = ["professor", "associate_professor", "assistant_professor", "lecturer"]
    qualifications = ["phd", "post_doc", "mphil"]
    specialties = ["education", "psychology", "hrm", "computer_science", "statistics"]
    regions = ["federal", "sindh", "punjab", "nwfp", "balochistan"]
    with open(OUT / "profiles.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["respondent_id", "gender", "designation", "qualification", "admin_experience", "specialty", "region"]
        )
        for i in range(1, N + 1):
            admin = []
            if i == 1:
                admin.append("vice_chancellor")
            if i % 5 == 0:
                admin.append("dean")
            if i % 7 == 0:
                admin.extend(["director", "chairman"])
            writer.writerow(
                [
                    f"E{i:02d}",
                    genders[i % 2],
                    designations[i % 4],
                    qualifications[i % 3],
                    ";".join(admin),
                    specialties[i % 5],
                    regions[i % 5],
                ]
            )


def write_sent() -> None:
    (OUT / "sent.json").write_text(
        json.dumps({"post": 50, "email": 21, "by_hand": 16}, indent=2) + "\n", encoding="utf-8"
    )


def write_evaluatees() -> None:
    schema = canonical_schema()
    item_ids = schema.item_ids()
    with open(OUT / "evaluatees.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["evaluatee_id", "item_id", "rating"])
        for t in range(4):
            for k, iid in enumerate(item_ids):
                writer.writerow([f"T{t + 1:02d}", iid, (k * 3 + t * 11) % 5 + 1])


EXTRA_DRAFT_ITEMS = [
    ("1.16", 1, "Time Management", "The ability to plan and keep to working hours"),
    ("4.11", 4, "Delegation", "Assigning duties to the right staff at the right time"),
    ("6.7", 6, "Dress Code", "Observing the expected standard of dress"),
    ("8.5", 8, "Conference Proceedings", "Papers appearing in conference proceedings"),
    ("10.7", 10, "Travel Allowances", "Availability of travel support for official duties"),
    ("12.6", 12, "Office Facilities", "Adequacy of office space and equipment"),
    ("14.6", 14, "Recreation Needs", "Time and facilities for rest and recreation"),
    ("15.7", 15, "Marital Status", None),
]


def write_draft_and_revisions() -> None:
    obj = schema_to_obj(canonical_schema())
    obj["version"] = 1
    obj["revision_log"] = []
    by_id = {group["group_id"]: group for group in obj["groups"]}
    for item_id, gid, label, gloss in EXTRA_DRAFT_ITEMS:
        by_id[gid]["items"].append(
            {"item_id": item_id, "label": label, "gloss": gloss, "paper_alias": None}
        )
    (OUT / "draft_instrument.json").write_text(
        json.dumps(obj, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    revisions = [{"kind": "DeleteItem", "target": item_id} for item_id, *_ in EXTRA_DRAFT_ITEMS]
    (OUT / "draft_revisions.json").write_text(
        json.dumps(revisions, indent=2) + "\n", encoding="utf-8"
    )


def write_custom_weights() -> None:
    values = {
        1: 0.085, 2: 0.090, 3: 0.075, 4: 0.065, 5: 0.065,
        6: 0.070, 7: 0.070, 8: 0.065, 9: 0.060, 10: 0.065,
        11: 0.060, 12: 0.065, 13: 0.060, 14: 0.055, 15: 0.050,
    }
    assert abs(sum(values.values()) - 1.0) < 1e-9
    with open(OUT / "custom_weights.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group_id", "weight"])
        for gid, value in values.items():
            writer.writerow([gid, f"{value:.3f}"])


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    write_responses()
    write_profiles()
    write_sent()
    write_evaluatees()
    write_draft_and_revisions()
    write_custom_weights()
    print(f"sample data written to {OUT}")
