"""Questionnaire-driven teacher-performance evaluation toolkit.

Models a versioned evaluation instrument (15 factor groups, 99 rated
items on a five-anchor importance scale), aggregates expert questionnaire
responses into descriptive statistics and normalized group weights, and
scores and ranks evaluatees with a weighted summation over their ratings.
"""

from .analytics import (
    Convention,
    StatsEntry,
    StatsSummary,
    cohort_filter,
    group_stats,
    item_stats,
)
from .errors import (
    AnalyticsError,
    DataFormatError,
    ParseWarning,
    RevisionError,
    SchemaFormatError,
    ScoringError,
    TeachevalError,
    WeightError,
)
from .ingest import (
    AdminRole,
    Channel,
    Designation,
    DistributionSummary,
    ExpertProfile,
    Gender,
    Qualification,
    RatingMode,
    Region,
    ResponseDataset,
    ResponseRecord,
    Specialty,
    distribution_summary,
    parse_profiles,
    parse_responses,
    parse_sent_counts,
    validate_dataset,
)
from .schema import (
    FactorGroup,
    FuzzyScale,
    Item,
    QuestionnaireSchema,
    RevisionKind,
    RevisionOp,
    apply_revisions,
    canonical_schema,
    parse_revisions,
    parse_schema,
    replay_revisions,
    serialize_schema,
    validate_schema,
)
from .scoring import (
    EvaluateeRecord,
    ScoreCard,
    parse_evaluatee_ratings,
    rank,
    score_group,
    score_overall,
)
from .validation import Finding, ValidationReport
from .weights import (
    BUILTIN_WEIGHTS,
    WeightComparison,
    WeightStrategy,
    WeightVector,
    compare_weights,
    derive_weights_mean,
    load_weight_table,
    renormalize,
    uniform_weights,
)

__version__ = "0.1.0"
