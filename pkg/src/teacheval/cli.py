"""Command-line pipeline: validate, ingest, analyze, weight, score, rank.

Exit codes: 0 success, 1 data or validation failure (including I/O), 2
usage errors. Output is deterministic: identical inputs and flags yield
byte-identical reports.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import analytics, ingest, schema as schema_mod, scoring, weights as weights_mod
from .errors import ParseWarning, TeachevalError
from .validation import CATEGORY_COMPLETENESS

BUILTIN = "builtin"

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teacheval",
        description="Questionnaire-driven teacher-performance evaluation pipeline.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
        cmd.add_argument(
            "--format", choices=["text", "csv"], default="text", help="report format (default text)"
        )
        return cmd

    cmd = add("schema-validate", "check a questionnaire schema against its invariants")
    cmd.add_argument("--schema", default=BUILTIN, help="schema JSON path or 'builtin'")

    cmd = add("schema-revise", "apply a revision batch to a schema")
    cmd.add_argument("--schema", default=BUILTIN, help="schema JSON path or 'builtin'")
    cmd.add_argument("--revisions", required=True, metavar="PATH", help="JSON list of revision ops")

    cmd = add("ingest-check", "parse and validate a response dataset")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--responses", required=True, metavar="PATH")
    cmd.add_argument("--profiles", metavar="PATH")
    cmd.add_argument("--sent", metavar="PATH")
    cmd.add_argument("--lenient", action="store_true", help="downgrade completeness findings to warnings")

    cmd = add("stats", "per-group (or per-item) means and standard deviations")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--responses", required=True, metavar="PATH")
    cmd.add_argument("--profiles", metavar="PATH")
    cmd.add_argument("--convention", choices=["sample", "population"], default="sample")
    cmd.add_argument("--per-item", action="store_true", help="item-level statistics")
    cmd.add_argument(
        "--cohort",
        action="append",
        default=[],
        metavar="ATTR=VALUE",
        help="filter respondents by profile attribute (repeatable; needs --profiles)",
    )
    cmd.add_argument("--lenient", action="store_true")

    cmd = add("distribution", "per-channel sent/received/rate summary")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--responses", required=True, metavar="PATH")
    cmd.add_argument("--sent", required=True, metavar="PATH")

    cmd = add("weights-derive", "derive a group weight vector from responses")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--responses", required=True, metavar="PATH")
    cmd.add_argument("--convention", choices=["sample", "population"], default="sample")
    cmd.add_argument("--strategy", choices=["mean", "uniform"], default="mean")
    cmd.add_argument("--lenient", action="store_true")

    cmd = add("weights-compare", "compare two weight vectors (differences, ranks, correlation)")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--weights", required=True, metavar="SRC", help="path | paper-table-4 | uniform | mean")
    cmd.add_argument("--against", required=True, metavar="SRC", help="path | paper-table-4 | uniform | mean")
    cmd.add_argument("--responses", metavar="PATH", help="needed when a side is 'mean'")
    cmd.add_argument("--convention", choices=["sample", "population"], default="sample")
    cmd.add_argument("--lenient", action="store_true")

    cmd = add("score", "score evaluatees with a weight vector")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--ratings", required=True, metavar="PATH", help="evaluatee ratings CSV")
    cmd.add_argument("--weights", required=True, metavar="SRC", help="path | paper-table-4 | uniform | mean")
    cmd.add_argument("--responses", metavar="PATH", help="needed when --weights is 'mean'")
    cmd.add_argument("--convention", choices=["sample", "population"], default="sample")
    cmd.add_argument("--lenient", action="store_true")

    cmd = add("rank-report", "score evaluatees and emit the ranked leaderboard")
    cmd.add_argument("--schema", default=BUILTIN)
    cmd.add_argument("--ratings", required=True, metavar="PATH")
    cmd.add_argument("--weights", required=True, metavar="SRC")
    cmd.add_argument("--responses", metavar="PATH")
    cmd.add_argument("--convention", choices=["sample", "population"], default="sample")
    cmd.add_argument("--lenient", action="store_true")

    return parser


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_schema(source: str) -> schema_mod.QuestionnaireSchema:
    if source == BUILTIN:
        return schema_mod.canonical_schema()
    return schema_mod.parse_schema(_read(source))


def _load_dataset(args, schema, *, need_profiles: bool = False) -> ingest.ResponseDataset:
    profiles = None
    if getattr(args, "profiles", None):
        profiles = ingest.parse_profiles(_read(args.profiles))
    elif need_profiles:
        raise TeachevalError("--cohort filtering requires --profiles")
    sent = None
    if getattr(args, "sent", None):
        sent = ingest.parse_sent_counts(_read(args.sent))
    return ingest.parse_responses(
        _read(args.responses), schema, profiles=profiles, sent_counts=sent
    )


def _check_dataset(dataset, schema, lenient: bool, stderr) -> bool:
    """Print findings; return True when the run may proceed."""
    report = ingest.validate_dataset(dataset, schema)
    if report.ok:
        return True
    blocking = [f for f in report.findings if f.category != CATEGORY_COMPLETENESS]
    completeness = report.by_category(CATEGORY_COMPLETENESS)
    if lenient:
        for finding in completeness:
            print(f"warning: {finding.render()}", file=stderr)
        if not blocking:
            return True
    for finding in (report.findings if not lenient else blocking):
        print(finding.render(), file=stderr)
    return False


def _resolve_weights(source: str, args, schema) -> weights_mod.WeightVector:
    if source == "uniform":
        return weights_mod.uniform_weights(schema)
    if source == "mean":
        if not getattr(args, "responses", None):
            raise TeachevalError("weight source 'mean' requires --responses")
        dataset = ingest.parse_responses(_read(args.responses), schema)
        stats = analytics.group_stats(
            dataset,
            schema,
            analytics.Convention(args.convention),
            strict=not getattr(args, "lenient", False),
        )
        return weights_mod.derive_weights_mean(stats, schema)
    if source == weights_mod.BUILTIN_WEIGHTS:
        return weights_mod.load_weight_table(source, schema)
    return weights_mod.load_weight_table(_read(source), schema)


def _emit(text: str, args, stdout) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_schema_validate(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    report = schema_mod.validate_schema(schema)
    summary = (
        f"schema version {schema.version}: {len(schema.groups)} groups, "
        f"{schema.item_count} items"
    )
    _emit(report.render() + "\n" + summary + "\n", args, stdout)
    return EXIT_OK if report.ok else EXIT_DATA


def _cmd_schema_revise(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    revisions = schema_mod.parse_revisions(_read(args.revisions))
    revised = schema_mod.apply_revisions(schema, revisions)
    _emit(schema_mod.serialize_schema(revised), args, stdout)
    print(
        f"applied {len(revisions)} revision(s): version {schema.version} -> {revised.version}, "
        f"{schema.item_count} -> {revised.item_count} items",
        file=stderr,
    )
    return EXIT_OK


def _cmd_ingest_check(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    dataset = _load_dataset(args, schema)
    report = ingest.validate_dataset(dataset, schema)
    _emit(report.render() + "\n", args, stdout)
    if report.ok:
        return EXIT_OK
    if args.lenient and not [f for f in report.findings if f.category != CATEGORY_COMPLETENESS]:
        return EXIT_OK
    return EXIT_DATA


def _cmd_stats(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    dataset = _load_dataset(args, schema, need_profiles=bool(args.cohort))
    if args.cohort:
        constraints = {}
        for raw in args.cohort:
            if "=" not in raw:
                raise TeachevalError(f"--cohort expects ATTR=VALUE, got {raw!r}")
            attr, _, value = raw.partition("=")
            constraints[attr.strip()] = value.strip()
        dataset = analytics.cohort_filter(dataset, constraints)
    if not _check_dataset(dataset, schema, args.lenient, stderr):
        return EXIT_DATA
    convention = analytics.Convention(args.convention)
    fn = analytics.item_stats if args.per_item else analytics.group_stats
    summary = fn(dataset, schema, convention, strict=not args.lenient)
    if args.format == "csv":
        _emit(analytics.format_stats_csv(summary), args, stdout)
    else:
        _emit(analytics.format_stats_text(summary, schema), args, stdout)
    return EXIT_OK


def _cmd_distribution(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    dataset = _load_dataset(args, schema)
    summary = ingest.distribution_summary(dataset)
    if args.format == "csv":
        _emit(ingest.format_distribution_csv(summary), args, stdout)
    else:
        _emit(ingest.format_distribution_text(summary), args, stdout)
    return EXIT_OK


def _cmd_weights_derive(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    if args.strategy == "uniform":
        vector = weights_mod.uniform_weights(schema)
    else:
        dataset = _load_dataset(args, schema)
        if not _check_dataset(dataset, schema, args.lenient, stderr):
            return EXIT_DATA
        stats = analytics.group_stats(
            dataset, schema, analytics.Convention(args.convention), strict=not args.lenient
        )
        vector = weights_mod.derive_weights_mean(stats, schema)
    if args.format == "csv":
        _emit(weights_mod.format_weights_csv(vector), args, stdout)
    else:
        _emit(weights_mod.format_weights_text(vector, schema), args, stdout)
    return EXIT_OK


def _cmd_weights_compare(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    vector_a = _resolve_weights(args.weights, args, schema)
    vector_b = _resolve_weights(args.against, args, schema)
    comparison = weights_mod.compare_weights(vector_a, vector_b)
    if args.format == "csv":
        _emit(weights_mod.format_comparison_csv(comparison), args, stdout)
    else:
        _emit(weights_mod.format_comparison_text(comparison, schema), args, stdout)
    return EXIT_OK


def _score_cards(args, schema) -> list[scoring.ScoreCard]:
    vector = _resolve_weights(args.weights, args, schema)
    records = scoring.parse_evaluatee_ratings(_read(args.ratings), schema)
    return [
        scoring.score_overall(record, vector, schema, strict=not args.lenient)
        for record in records
    ]


def _cmd_score(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    cards = _score_cards(args, schema)
    if args.format == "text":
        _emit(scoring.format_leaderboard_text(cards), args, stdout)
    else:
        _emit(scoring.format_scorecards_csv(cards, schema), args, stdout)
    return EXIT_OK


def _cmd_rank_report(args, stdout, stderr) -> int:
    schema = _load_schema(args.schema)
    ranked = scoring.rank(_score_cards(args, schema))
    if args.format == "csv":
        _emit(scoring.format_scorecards_csv(ranked, schema), args, stdout)
    else:
        _emit(scoring.format_leaderboard_text(ranked), args, stdout)
    return EXIT_OK


_COMMANDS = {
    "schema-validate": _cmd_schema_validate,
    "schema-revise": _cmd_schema_revise,
    "ingest-check": _cmd_ingest_check,
    "stats": _cmd_stats,
    "distribution": _cmd_distribution,
    "weights-derive": _cmd_weights_derive,
    "weights-compare": _cmd_weights_compare,
    "score": _cmd_score,
    "rank-report": _cmd_rank_report,
}


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        return int(exc.code or 0)
    handler = _COMMANDS[args.subcommand]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ParseWarning)
            code = handler(args, stdout, stderr)
        for warning in caught:
            print(f"warning: {warning.message}", file=stderr)
        return code
    except TeachevalError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
