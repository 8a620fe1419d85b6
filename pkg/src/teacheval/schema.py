"""Versioned questionnaire instrument: types, parsing, validation, revisions.

The canonical instrument (15 factor groups, 99 rated items, a five-anchor
importance scale) ships as package data and is exposed via
:func:`canonical_schema`. Instruments are immutable; revision batches
produce new versions and keep an audit log.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from importlib import resources

from .errors import RevisionError, SchemaFormatError
from .validation import Finding, ValidationReport

_ITEM_ID_RE = re.compile(r"^\d+\.\d+$")

CANONICAL_RESOURCE = "canonical_schema.json"


@dataclass(frozen=True)
class FuzzyScale:
    """Five-anchor importance scale mapping labels to the integers 1..5."""

    levels: tuple[tuple[int, str], ...]
    description: str = ""

    def label_for(self, level: int) -> str:
        for value, label in self.levels:
            if value == level:
                return label
        raise KeyError(level)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(value for value, _ in self.levels)


@dataclass(frozen=True)
class Item:
    """One rated sub-factor.

    ``item_id`` is hierarchical ("<group ordinal>.<item ordinal>", e.g. "1.7")
    and stays attached to the item for life, even across group moves.
    ``paper_alias`` records the identifier printed in the source survey form
    when it differs from the canonical id.
    """

    item_id: str
    label: str
    gloss: str | None = None
    paper_alias: str | None = None


@dataclass(frozen=True)
class FactorGroup:
    group_id: int
    name: str
    items: tuple[Item, ...]

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(item.item_id for item in self.items)


class RevisionKind(str, Enum):
    ADD_ITEM = "AddItem"
    DELETE_ITEM = "DeleteItem"
    MOVE_ITEM = "MoveItem"
    EDIT_ITEM = "EditItem"


@dataclass(frozen=True)
class RevisionOp:
    """A single instrument edit.

    Payload fields by kind:
      AddItem    -- ``label`` (required), ``gloss``, ``group_id`` (defaults to
                    the group encoded in the fresh ``target`` id).
      DeleteItem -- none.
      MoveItem   -- ``group_id``: destination group (item appended at its end).
      EditItem   -- ``label`` and/or ``gloss``; an empty-string gloss clears it.
    """

    kind: RevisionKind
    target: str
    label: str | None = None
    gloss: str | None = None
    group_id: int | None = None


@dataclass(frozen=True)
class QuestionnaireSchema:
    version: int
    scale: FuzzyScale
    groups: tuple[FactorGroup, ...]
    revision_log: tuple[RevisionOp, ...] = ()

    @property
    def item_count(self) -> int:
        return sum(len(group.items) for group in self.groups)

    @property
    def group_ids(self) -> tuple[int, ...]:
        return tuple(group.group_id for group in self.groups)

    def group(self, group_id: int) -> FactorGroup:
        for g in self.groups:
            if g.group_id == group_id:
                return g
        raise KeyError(group_id)

    def item_ids(self) -> tuple[str, ...]:
        return tuple(item.item_id for group in self.groups for item in group.items)

    def find_item(self, item_id: str) -> tuple[FactorGroup, Item] | None:
        for group in self.groups:
            for item in group.items:
                if item.item_id == item_id:
                    return group, item
        return None


# ---------------------------------------------------------------------------
# Canonical instrument
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def canonical_schema() -> QuestionnaireSchema:
    """The built-in final instrument (15 groups, 99 items).

    Loaded once from package data; the returned value is immutable and
    shared across calls.
    """
    text = resources.files("teacheval.data").joinpath(CANONICAL_RESOURCE).read_text("utf-8")
    return parse_schema(text)


# ---------------------------------------------------------------------------
# Parsing and serialization (JSON document format)
# ---------------------------------------------------------------------------


def parse_schema(document: str) -> QuestionnaireSchema:
    """Parse a schema document, raising :class:`SchemaFormatError` on any defect.

    Errors carry the location of the offending element. Semantic invariant
    violations (duplicate ids, empty groups, malformed scale, ...) are
    gathered through :func:`validate_schema` and reported together.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaFormatError(
            f"unreadable schema document: {exc.msg}",
            location=f"line {exc.lineno}, column {exc.colno}",
        ) from exc
    schema = _schema_from_obj(raw)
    report = validate_schema(schema)
    if not report.ok:
        details = "; ".join(f.render() for f in report.findings)
        raise SchemaFormatError(f"invalid schema: {details}")
    return schema


def _require(obj: dict, key: str, location: str):
    if key not in obj:
        raise SchemaFormatError(f"missing field {key!r}", location=location)
    return obj[key]


def _schema_from_obj(raw: object) -> QuestionnaireSchema:
    if not isinstance(raw, dict):
        raise SchemaFormatError("schema document must be a JSON object", location="$")
    version = _require(raw, "version", "$")
    if not isinstance(version, int) or version < 1:
        raise SchemaFormatError("version must be a positive integer", location="version")

    scale = _scale_from_obj(_require(raw, "scale", "$"))

    groups_raw = _require(raw, "groups", "$")
    if not isinstance(groups_raw, list):
        raise SchemaFormatError("groups must be a list", location="groups")
    groups = []
    for gi, group_raw in enumerate(groups_raw):
        loc = f"groups[{gi}]"
        if not isinstance(group_raw, dict):
            raise SchemaFormatError("group must be an object", location=loc)
        group_id = _require(group_raw, "group_id", loc)
        name = _require(group_raw, "name", loc)
        items_raw = _require(group_raw, "items", loc)
        if not isinstance(group_id, int):
            raise SchemaFormatError("group_id must be an integer", location=loc)
        if not isinstance(name, str):
            raise SchemaFormatError("group name must be a string", location=loc)
        if not isinstance(items_raw, list):
            raise SchemaFormatError("items must be a list", location=loc)
        items = []
        for ii, item_raw in enumerate(items_raw):
            iloc = f"{loc}.items[{ii}]"
            if not isinstance(item_raw, dict):
                raise SchemaFormatError("item must be an object", location=iloc)
            item_id = _require(item_raw, "item_id", iloc)
            label = _require(item_raw, "label", iloc)
            if not isinstance(item_id, str) or not isinstance(label, str):
                raise SchemaFormatError("item_id and label must be strings", location=iloc)
            gloss = item_raw.get("gloss")
            alias = item_raw.get("paper_alias")
            items.append(Item(item_id=item_id, label=label, gloss=gloss, paper_alias=alias))
        groups.append(FactorGroup(group_id=group_id, name=name, items=tuple(items)))

    log_raw = raw.get("revision_log", [])
    if not isinstance(log_raw, list):
        raise SchemaFormatError("revision_log must be a list", location="revision_log")
    log = tuple(_revision_from_obj(op, f"revision_log[{i}]") for i, op in enumerate(log_raw))

    return QuestionnaireSchema(version=version, scale=scale, groups=tuple(groups), revision_log=log)


def _scale_from_obj(raw: object) -> FuzzyScale:
    # Accepted forms: a bare list of {level, label}, or an object wrapping
    # that list with an optional free-text description.
    description = ""
    if isinstance(raw, dict):
        description = raw.get("description", "") or ""
        raw = _require(raw, "levels", "scale")
    if not isinstance(raw, list):
        raise SchemaFormatError("scale levels must be a list", location="scale")
    levels = []
    for i, level_raw in enumerate(raw):
        loc = f"scale[{i}]"
        if not isinstance(level_raw, dict):
            raise SchemaFormatError("scale level must be an object", location=loc)
        value = _require(level_raw, "level", loc)
        label = _require(level_raw, "label", loc)
        if not isinstance(value, int) or not isinstance(label, str):
            raise SchemaFormatError("level must be an integer and label a string", location=loc)
        levels.append((value, label))
    return FuzzyScale(levels=tuple(levels), description=description)


def _revision_from_obj(raw: object, location: str) -> RevisionOp:
    if not isinstance(raw, dict):
        raise SchemaFormatError("revision must be an object", location=location)
    kind_raw = _require(raw, "kind", location)
    try:
        kind = RevisionKind(kind_raw)
    except ValueError:
        raise SchemaFormatError(f"unknown revision kind {kind_raw!r}", location=location) from None
    target = _require(raw, "target", location)
    if not isinstance(target, str):
        raise SchemaFormatError("revision target must be a string", location=location)
    group_id = raw.get("group_id")
    if group_id is not None and not isinstance(group_id, int):
        raise SchemaFormatError("group_id must be an integer", location=location)
    return RevisionOp(
        kind=kind,
        target=target,
        label=raw.get("label"),
        gloss=raw.get("gloss"),
        group_id=group_id,
    )


def parse_revisions(document: str) -> tuple[RevisionOp, ...]:
    """Parse a JSON list of revision operations (the ``--revisions`` file)."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaFormatError(
            f"unreadable revisions document: {exc.msg}",
            location=f"line {exc.lineno}, column {exc.colno}",
        ) from exc
    if not isinstance(raw, list):
        raise SchemaFormatError("revisions document must be a JSON list", location="$")
    return tuple(_revision_from_obj(op, f"[{i}]") for i, op in enumerate(raw))


def schema_to_obj(schema: QuestionnaireSchema) -> dict:
    return {
        "version": schema.version,
        "scale": {
            "description": schema.scale.description,
            "levels": [{"level": v, "label": lbl} for v, lbl in schema.scale.levels],
        },
        "groups": [
            {
                "group_id": group.group_id,
                "name": group.name,
                "items": [
                    {
                        "item_id": item.item_id,
                        "label": item.label,
                        "gloss": item.gloss,
                        "paper_alias": item.paper_alias,
                    }
                    for item in group.items
                ],
            }
            for group in schema.groups
        ],
        "revision_log": [_revision_to_obj(op) for op in schema.revision_log],
    }


def _revision_to_obj(op: RevisionOp) -> dict:
    obj: dict = {"kind": op.kind.value, "target": op.target}
    if op.label is not None:
        obj["label"] = op.label
    if op.gloss is not None:
        obj["gloss"] = op.gloss
    if op.group_id is not None:
        obj["group_id"] = op.group_id
    return obj


def serialize_schema(schema: QuestionnaireSchema) -> str:
    """Serialize to the JSON document format; inverse of :func:`parse_schema`."""
    return json.dumps(schema_to_obj(schema), ensure_ascii=False, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_schema(schema: QuestionnaireSchema) -> ValidationReport:
    """Check every schema invariant; one finding per violation, never raises."""
    findings: list[Finding] = []

    findings.extend(_scale_findings(schema.scale))

    seen_group_ids: set[int] = set()
    for position, group in enumerate(schema.groups):
        loc = f"group {group.group_id}"
        expected = position + 1
        if group.group_id != expected:
            findings.append(
                Finding(
                    "group-ordinal-gap",
                    loc,
                    f"group ordinals must be contiguous from 1; position {expected} holds id {group.group_id}",
                )
            )
        if group.group_id in seen_group_ids:
            findings.append(Finding("duplicate-group-id", loc, "group_id already used"))
        seen_group_ids.add(group.group_id)
        if not group.items:
            findings.append(Finding("empty-group", loc, "factor group has no items"))
        if not group.name.strip():
            findings.append(Finding("empty-group-name", loc, "factor group name is empty"))

    seen_item_ids: set[str] = set()
    for group in schema.groups:
        for item in group.items:
            loc = f"item {item.item_id} (group {group.group_id})"
            if not _ITEM_ID_RE.match(item.item_id):
                findings.append(
                    Finding("bad-item-id", loc, "item_id must look like '<group>.<ordinal>'")
                )
            if item.item_id in seen_item_ids:
                findings.append(Finding("duplicate-item-id", loc, "item_id already used"))
            seen_item_ids.add(item.item_id)
            if not item.label.strip():
                findings.append(Finding("empty-item-label", loc, "item label is empty"))

    if schema.version < 1:
        findings.append(Finding("bad-version", "schema", "version must be >= 1"))

    return ValidationReport(findings=tuple(findings))


def _scale_findings(scale: FuzzyScale) -> list[Finding]:
    findings = []
    if scale.values != (1, 2, 3, 4, 5):
        findings.append(
            Finding(
                "malformed-scale",
                "scale",
                f"scale must have exactly the five levels 1..5 in order, got {scale.values}",
            )
        )
    for value, label in scale.levels:
        if not label.strip():
            findings.append(Finding("empty-scale-label", f"scale level {value}", "anchor label is empty"))
    return findings


# ---------------------------------------------------------------------------
# Revisions
# ---------------------------------------------------------------------------


def apply_revisions(
    schema: QuestionnaireSchema, revisions: list[RevisionOp] | tuple[RevisionOp, ...]
) -> QuestionnaireSchema:
    """Apply one batch of revisions atomically.

    Operations are evaluated in order against the working state; any failure
    (unresolvable target, colliding id, missing destination group, or a
    result that breaks a schema invariant) raises :class:`RevisionError` and
    leaves the input untouched. On success the version advances by one and
    the batch is appended to the revision log.
    """
    # Working state: mutable lists, rebuilt into frozen tuples at the end.
    work: list[tuple[int, str, list[Item]]] = [
        (g.group_id, g.name, list(g.items)) for g in schema.groups
    ]

    def locate(item_id: str) -> tuple[int, int]:
        for gi, (_, _, items) in enumerate(work):
            for ii, item in enumerate(items):
                if item.item_id == item_id:
                    return gi, ii
        raise RevisionError(f"target item {item_id!r} does not exist")

    def group_index(group_id: int) -> int:
        for gi, (gid, _, _) in enumerate(work):
            if gid == group_id:
                return gi
        raise RevisionError(f"destination group {group_id} does not exist")

    for op in revisions:
        if op.kind is RevisionKind.ADD_ITEM:
            if not _ITEM_ID_RE.match(op.target):
                raise RevisionError(f"AddItem target {op.target!r} is not a valid item id")
            if any(item.item_id == op.target for _, _, items in work for item in items):
                raise RevisionError(f"AddItem target {op.target!r} already exists")
            if op.label is None or not op.label.strip():
                raise RevisionError(f"AddItem {op.target!r} requires a nonempty label")
            dest = op.group_id if op.group_id is not None else int(op.target.split(".", 1)[0])
            gi = group_index(dest)
            work[gi][2].append(Item(item_id=op.target, label=op.label, gloss=op.gloss))
        elif op.kind is RevisionKind.DELETE_ITEM:
            gi, ii = locate(op.target)
            del work[gi][2][ii]
        elif op.kind is RevisionKind.MOVE_ITEM:
            if op.group_id is None:
                raise RevisionError(f"MoveItem {op.target!r} requires a destination group_id")
            gi, ii = locate(op.target)
            di = group_index(op.group_id)
            item = work[gi][2].pop(ii)
            work[di][2].append(item)
        elif op.kind is RevisionKind.EDIT_ITEM:
            gi, ii = locate(op.target)
            item = work[gi][2][ii]
            if op.label is None and op.gloss is None:
                raise RevisionError(f"EditItem {op.target!r} changes nothing")
            if op.label is not None:
                if not op.label.strip():
                    raise RevisionError(f"EditItem {op.target!r} label must be nonempty")
                item = replace(item, label=op.label)
            if op.gloss is not None:
                item = replace(item, gloss=op.gloss or None)
            work[gi][2][ii] = item
        else:  # pragma: no cover - enum is closed
            raise RevisionError(f"unknown revision kind {op.kind!r}")

    result = QuestionnaireSchema(
        version=schema.version + 1,
        scale=schema.scale,
        groups=tuple(
            FactorGroup(group_id=gid, name=name, items=tuple(items)) for gid, name, items in work
        ),
        revision_log=schema.revision_log + tuple(revisions),
    )
    report = validate_schema(result)
    if not report.ok:
        details = "; ".join(f.render() for f in report.findings)
        raise RevisionError(f"revision batch would break schema invariants: {details}")
    return result


def replay_revisions(base: QuestionnaireSchema, log: tuple[RevisionOp, ...]) -> QuestionnaireSchema:
    """Re-apply a recorded revision log to its base schema as a single batch.

    For a schema produced by one ``apply_revisions`` call this reproduces it
    bit-exactly. The version counts revision batches, so a log accumulated
    over several calls replays to the same structure at version base+1.
    """
    return apply_revisions(base, tuple(log))
