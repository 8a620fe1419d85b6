"""Expert profiles, response datasets, and delivery-channel summaries.

Input formats (all UTF-8):
  profiles   CSV, header ``respondent_id,gender,designation,qualification,
             admin_experience,specialty,region`` (admin_experience is a
             ``;``-joined token list)
  responses  long-form CSV, header ``respondent_id,channel,mode,key,rating``,
             one rating per row; or the JSON equivalent
             ``{"records": [{"respondent_id", "channel", "mode", "ratings"}]}``
  sent file  JSON mapping channel name -> questionnaires distributed
"""

from __future__ import annotations

import csv
import io
import json
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .display import render_table, round_truncated
from .errors import DataFormatError, ParseWarning
from .schema import QuestionnaireSchema
from .validation import (
    CATEGORY_COMPLETENESS,
    CATEGORY_CONSISTENCY,
    Finding,
    ValidationReport,
)


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"
    UNSPECIFIED = "unspecified"


class Designation(str, Enum):
    PROFESSOR = "professor"
    ASSOCIATE_PROFESSOR = "associate_professor"
    ASSISTANT_PROFESSOR = "assistant_professor"
    LECTURER = "lecturer"
    OTHER = "other"


class Qualification(str, Enum):
    POST_DOC = "post_doc"
    PHD = "phd"
    MPHIL = "mphil"
    OTHER = "other"


class AdminRole(str, Enum):
    VICE_CHANCELLOR = "vice_chancellor"
    DEAN = "dean"
    CHAIRMAN = "chairman"
    DIRECTOR = "director"


class Specialty(str, Enum):
    EDUCATION = "education"
    HRM = "hrm"
    PSYCHOLOGY = "psychology"
    COMPUTER_SCIENCE = "computer_science"
    STATISTICS = "statistics"
    OTHER = "other"


class Region(str, Enum):
    FEDERAL = "federal"
    SINDH = "sindh"
    PUNJAB = "punjab"
    NWFP = "nwfp"
    BALOCHISTAN = "balochistan"
    OTHER = "other"


class Channel(str, Enum):
    POST = "post"
    EMAIL = "email"
    BY_HAND = "by_hand"


CHANNEL_LABELS = {Channel.POST: "Post", Channel.EMAIL: "Email", Channel.BY_HAND: "By hand"}


class RatingMode(str, Enum):
    ITEM = "item"
    GROUP = "group"


@dataclass(frozen=True)
class ExpertProfile:
    respondent_id: str
    gender: Gender = Gender.UNSPECIFIED
    designation: Designation = Designation.OTHER
    qualification: Qualification = Qualification.OTHER
    admin_experience: frozenset[AdminRole] = frozenset()
    specialty: Specialty = Specialty.OTHER
    region: Region = Region.OTHER


@dataclass(frozen=True)
class ResponseRecord:
    """One expert's ratings, either all item-level or all group-level.

    ``ratings`` maps item ids (strings) or group ids (integers) to integers
    in 1..5, depending on ``mode``.
    """

    respondent_id: str
    channel: Channel
    mode: RatingMode
    ratings: Mapping[str | int, int]


@dataclass(frozen=True)
class ResponseDataset:
    schema_version: int
    records: tuple[ResponseRecord, ...]
    profiles: Mapping[str, ExpertProfile] = field(default_factory=dict)
    sent_counts: Mapping[Channel, int] = field(default_factory=dict)
    note: str = ""

    def received_by_channel(self) -> dict[Channel, int]:
        counts: dict[Channel, int] = {}
        for record in self.records:
            counts[record.channel] = counts.get(record.channel, 0) + 1
        return counts


@dataclass(frozen=True)
class DeliveryRow:
    channel: Channel
    sent: int
    received: int

    @property
    def rate_percent(self) -> Fraction:
        """Exact response rate as a percentage (0 when nothing was sent)."""
        if self.sent == 0:
            return Fraction(0)
        return Fraction(100 * self.received, self.sent)


@dataclass(frozen=True)
class DistributionSummary:
    rows: tuple[DeliveryRow, ...]

    @property
    def total_sent(self) -> int:
        return sum(row.sent for row in self.rows)

    @property
    def total_received(self) -> int:
        return sum(row.received for row in self.rows)

    @property
    def total_rate_percent(self) -> Fraction:
        # Recomputed from the totals, never averaged from row rates.
        if self.total_sent == 0:
            return Fraction(0)
        return Fraction(100 * self.total_received, self.total_sent)


# ---------------------------------------------------------------------------
# Token handling
# ---------------------------------------------------------------------------

_TOKEN_JUNK = re.compile(r"[^a-z0-9]+")


def _normalize_token(raw: str) -> str:
    return _TOKEN_JUNK.sub("_", raw.strip().lower()).strip("_")


def _coerce_enum(enum_cls, raw: str, fallback, row: int, column: str):
    token = _normalize_token(raw)
    if not token:
        return fallback
    try:
        return enum_cls(token)
    except ValueError:
        warnings.warn(
            f"row {row}: unknown {column} {raw!r} mapped to {fallback.value!r}",
            ParseWarning,
            stacklevel=3,
        )
        return fallback


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

_PROFILE_COLUMNS = [
    "respondent_id",
    "gender",
    "designation",
    "qualification",
    "admin_experience",
    "specialty",
    "region",
]


def parse_profiles(document: str) -> list[ExpertProfile]:
    """Parse the profile CSV. Unknown attribute tokens degrade to the
    catch-all value with a :class:`ParseWarning`; identity problems raise."""
    reader = csv.DictReader(io.StringIO(document))
    if reader.fieldnames is None:
        raise DataFormatError("profile document is empty")
    missing = [c for c in _PROFILE_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise DataFormatError(f"profile header lacks columns: {', '.join(missing)}")

    profiles: list[ExpertProfile] = []
    seen: set[str] = set()
    for row_no, row in enumerate(reader, start=2):
        rid = (row.get("respondent_id") or "").strip()
        if not rid:
            raise DataFormatError("missing respondent_id", location=f"row {row_no}")
        if rid in seen:
            raise DataFormatError(f"duplicate respondent_id {rid!r}", location=f"row {row_no}")
        seen.add(rid)

        roles = set()
        for raw_role in (row.get("admin_experience") or "").split(";"):
            token = _normalize_token(raw_role)
            if not token:
                continue
            try:
                roles.add(AdminRole(token))
            except ValueError:
                warnings.warn(
                    f"row {row_no}: unknown admin_experience token {raw_role!r} dropped",
                    ParseWarning,
                    stacklevel=2,
                )

        profiles.append(
            ExpertProfile(
                respondent_id=rid,
                gender=_coerce_enum(Gender, row.get("gender") or "", Gender.UNSPECIFIED, row_no, "gender"),
                designation=_coerce_enum(
                    Designation, row.get("designation") or "", Designation.OTHER, row_no, "designation"
                ),
                qualification=_coerce_enum(
                    Qualification, row.get("qualification") or "", Qualification.OTHER, row_no, "qualification"
                ),
                admin_experience=frozenset(roles),
                specialty=_coerce_enum(
                    Specialty, row.get("specialty") or "", Specialty.OTHER, row_no, "specialty"
                ),
                region=_coerce_enum(Region, row.get("region") or "", Region.OTHER, row_no, "region"),
            )
        )
    return profiles


# ---------------------------------------------------------------------------
# Responses
# ---------------------------------------------------------------------------


def parse_sent_counts(document: str) -> dict[Channel, int]:
    """Parse the sent-counts JSON mapping channel -> questionnaires sent."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"unreadable sent-counts document: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise DataFormatError("sent-counts document must be a JSON object")
    counts: dict[Channel, int] = {}
    for key, value in raw.items():
        try:
            channel = Channel(_normalize_token(str(key)))
        except ValueError:
            raise DataFormatError(f"unknown channel {key!r} in sent counts") from None
        if not isinstance(value, int) or value < 0:
            raise DataFormatError(f"sent count for {key!r} must be a nonnegative integer")
        counts[channel] = value
    return counts


def parse_responses(
    document: str,
    schema: QuestionnaireSchema,
    *,
    profiles: list[ExpertProfile] | None = None,
    sent_counts: Mapping[Channel, int] | None = None,
) -> ResponseDataset:
    """Parse a response document (CSV or JSON) against a schema.

    Every rating is checked for scale range, key existence, and mode
    consistency; when ``profiles`` are supplied each respondent must have
    one. Record order follows first appearance in the document.
    """
    stripped = document.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        rows = _response_rows_from_json(document)
    else:
        rows = _response_rows_from_csv(document)

    valid_items = set(schema.item_ids())
    valid_groups = set(schema.group_ids)

    order: list[str] = []
    channels: dict[str, Channel] = {}
    modes: dict[str, RatingMode] = {}
    ratings: dict[str, dict[str | int, int]] = {}

    for location, rid, channel_raw, mode_raw, key_raw, rating_raw in rows:
        if not rid:
            raise DataFormatError("missing respondent_id", location=location)
        try:
            channel = Channel(_normalize_token(channel_raw))
        except ValueError:
            raise DataFormatError(f"unknown channel {channel_raw!r}", location=location) from None
        try:
            mode = RatingMode(_normalize_token(mode_raw))
        except ValueError:
            raise DataFormatError(f"unknown mode {mode_raw!r}", location=location) from None

        if rid not in order:
            order.append(rid)
            channels[rid] = channel
            modes[rid] = mode
            ratings[rid] = {}
        else:
            if channels[rid] != channel:
                raise DataFormatError(
                    f"respondent {rid!r} reported with two channels", location=location
                )
            if modes[rid] != mode:
                raise DataFormatError(
                    f"respondent {rid!r} mixes item-level and group-level ratings",
                    location=location,
                )

        key: str | int
        if mode is RatingMode.GROUP:
            try:
                key = int(key_raw)
            except (TypeError, ValueError):
                raise DataFormatError(
                    f"group-level key {key_raw!r} must be a group ordinal", location=location
                ) from None
            if key not in valid_groups:
                raise DataFormatError(f"unknown group id {key}", location=location)
        else:
            key = str(key_raw)
            if key not in valid_items:
                raise DataFormatError(f"unknown item id {key!r}", location=location)

        rating = _parse_rating(rating_raw, key, location)
        if key in ratings[rid]:
            raise DataFormatError(
                f"respondent {rid!r} rates key {key!r} twice", location=location
            )
        ratings[rid][key] = rating

    if profiles is not None:
        profile_map = {p.respondent_id: p for p in profiles}
        for rid in order:
            if rid not in profile_map:
                raise DataFormatError(f"respondent {rid!r} has no profile")
    else:
        profile_map = {}

    records = tuple(
        ResponseRecord(respondent_id=rid, channel=channels[rid], mode=modes[rid], ratings=ratings[rid])
        for rid in order
    )
    return ResponseDataset(
        schema_version=schema.version,
        records=records,
        profiles=profile_map,
        sent_counts=dict(sent_counts) if sent_counts else {},
    )


def _parse_rating(raw, key, location: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise DataFormatError(f"rating for key {key!r} must be an integer", location=location)
    try:
        value = int(str(raw).strip())
    except ValueError:
        raise DataFormatError(
            f"rating {raw!r} for key {key!r} is not an integer", location=location
        ) from None
    if not 1 <= value <= 5:
        raise DataFormatError(
            f"rating {value} for key {key!r} outside scale range 1..5", location=location
        )
    return value


_RESPONSE_COLUMNS = ["respondent_id", "channel", "mode", "key", "rating"]


def _response_rows_from_csv(document: str):
    reader = csv.DictReader(io.StringIO(document))
    if reader.fieldnames is None:
        raise DataFormatError("response document is empty")
    missing = [c for c in _RESPONSE_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise DataFormatError(f"response header lacks columns: {', '.join(missing)}")
    for row_no, row in enumerate(reader, start=2):
        yield (
            f"row {row_no}",
            (row.get("respondent_id") or "").strip(),
            row.get("channel") or "",
            row.get("mode") or "",
            (row.get("key") or "").strip(),
            row.get("rating"),
        )


def _response_rows_from_json(document: str):
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"unreadable response document: {exc.msg}") from exc
    if isinstance(raw, dict):
        raw = raw.get("records", raw.get("responses"))
    if not isinstance(raw, list):
        raise DataFormatError("response JSON must hold a list of records")
    for i, record in enumerate(raw):
        loc = f"records[{i}]"
        if not isinstance(record, dict):
            raise DataFormatError("record must be an object", location=loc)
        rid = str(record.get("respondent_id") or "").strip()
        channel = record.get("channel") or ""
        mode = record.get("mode") or ""
        rating_map = record.get("ratings")
        if not isinstance(rating_map, dict):
            raise DataFormatError("record lacks a ratings mapping", location=loc)
        for key, value in rating_map.items():
            yield loc, rid, channel, mode, str(key).strip(), value


# ---------------------------------------------------------------------------
# Dataset validation
# ---------------------------------------------------------------------------


def validate_dataset(dataset: ResponseDataset, schema: QuestionnaireSchema) -> ValidationReport:
    """Report completeness and consistency findings; never raises.

    Completeness findings (category ``completeness``) flag missing ratings;
    consistency findings cover identity, key, range, and delivery problems.
    """
    findings: list[Finding] = []
    valid_items = set(schema.item_ids())
    valid_groups = set(schema.group_ids)

    seen_ids: set[str] = set()
    for index, record in enumerate(dataset.records):
        loc = f"record {record.respondent_id!r}"
        if record.respondent_id in seen_ids:
            findings.append(
                Finding("duplicate-respondent", loc, "respondent appears in two records", CATEGORY_CONSISTENCY)
            )
        seen_ids.add(record.respondent_id)

        if dataset.profiles and record.respondent_id not in dataset.profiles:
            findings.append(
                Finding("missing-profile", loc, "respondent has no expert profile", CATEGORY_CONSISTENCY)
            )

        expected: set = set(valid_groups) if record.mode is RatingMode.GROUP else set(valid_items)
        for key, value in record.ratings.items():
            if key not in expected:
                findings.append(
                    Finding("unknown-key", loc, f"rating key {key!r} not in schema", CATEGORY_CONSISTENCY)
                )
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                findings.append(
                    Finding(
                        "rating-range",
                        loc,
                        f"rating {value!r} for key {key!r} outside scale range 1..5",
                        CATEGORY_CONSISTENCY,
                    )
                )
        for key in sorted(expected - set(record.ratings), key=str):
            findings.append(
                Finding("missing-rating", loc, f"no rating for key {key!r}", CATEGORY_COMPLETENESS)
            )

    for rid in dataset.profiles:
        if rid not in seen_ids:
            findings.append(
                Finding(
                    "orphan-profile",
                    f"profile {rid!r}",
                    "profile has no response record",
                    CATEGORY_CONSISTENCY,
                )
            )

    if dataset.sent_counts:
        received = dataset.received_by_channel()
        for channel in Channel:
            sent = dataset.sent_counts.get(channel, 0)
            got = received.get(channel, 0)
            if got > sent:
                findings.append(
                    Finding(
                        "sent-exceeded",
                        f"channel {channel.value}",
                        f"received {got} responses but only {sent} were sent",
                        CATEGORY_CONSISTENCY,
                    )
                )

    return ValidationReport(findings=tuple(findings))


# ---------------------------------------------------------------------------
# Distribution summary
# ---------------------------------------------------------------------------


def distribution_summary(dataset: ResponseDataset) -> DistributionSummary:
    """Per-channel sent/received/rate rows plus exact totals.

    Rates are kept as exact rationals; rendering truncates them to two
    decimals (never rounds up), the convention the report consumers expect.
    """
    received = dataset.received_by_channel()
    rows = []
    for channel in Channel:
        sent = dataset.sent_counts.get(channel, 0)
        got = received.get(channel, 0)
        if sent == 0 and got == 0:
            continue
        if sent == 0:
            raise DataFormatError(
                f"channel {channel.value!r} has {got} responses but a sent count of zero"
            )
        rows.append(DeliveryRow(channel=channel, sent=sent, received=got))
    return DistributionSummary(rows=tuple(rows))


def format_distribution_text(summary: DistributionSummary) -> str:
    headers = ["Channel", "Sent", "Responses", "Rate%"]
    rows = [
        [
            CHANNEL_LABELS[row.channel],
            str(row.sent),
            str(row.received),
            round_truncated(row.rate_percent, 2),
        ]
        for row in summary.rows
    ]
    rows.append(
        [
            "Total",
            str(summary.total_sent),
            str(summary.total_received),
            round_truncated(summary.total_rate_percent, 2),
        ]
    )
    table = render_table(headers, rows, right_align={1, 2, 3})
    return "Questionnaire distribution summary\n" + table + "\n"


def format_distribution_csv(summary: DistributionSummary) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["channel", "sent", "received", "rate_percent"])
    for row in summary.rows:
        writer.writerow([row.channel.value, row.sent, row.received, round_truncated(row.rate_percent, 2)])
    writer.writerow(["total", summary.total_sent, summary.total_received, round_truncated(summary.total_rate_percent, 2)])
    return out.getvalue()
