"""serplab: randomized arrangement experiments on search result pages.

The package covers the full loop: a canonical page/event model, the
counterfactual arrangement transforms, deterministic hash-based treatment
assignment, a parametric click simulator that doubles as an exact oracle,
causal effect estimators with bootstrap intervals, an event ingestion
service, and a CLI tying the pipeline together.
"""

from .arrangements import ApplyResult, apply, hide_kinds, swap_generic
from .assignment import (
    AssignmentKey,
    GroupWeights,
    assign,
    fnv1a64,
    mix64,
    normalize_query,
    stable_hash,
)
from .clicksim import (
    ClickModelParams,
    Coupling,
    PopulationSpec,
    SyntheticQuery,
    arrangement_click_shift,
    click_distribution,
    generate_population,
    sample_events,
    true_ctr,
    true_gap,
    true_pp,
)
from .estimators import (
    BinEstimate,
    CtrEstimate,
    Direction,
    DistortionEstimate,
    GapEstimate,
    PercentileBinsResult,
    bootstrap_ci,
    click_share_table,
    compose_power,
    ctr_hat,
    distortion_hat,
    gap_hat,
    percentile_bins,
    pp_lower_bound,
    split_by,
)
from .model import (
    ArrangementId,
    ClickEvent,
    Column,
    ElementKind,
    Engine,
    SerpElement,
    SerpSnapshot,
    Slot,
    arrangements_for,
    event_from_json,
    event_to_json,
    generic_rank,
    parse_candidate_count,
    read_events_jsonl,
    snapshot_from_json,
    snapshot_to_json,
    validate_event_json,
    validate_snapshot,
    write_events_jsonl,
)
from .preprocess import DropReport, PreprocessConfig, preprocess
from .report import EstimateReport, build_report, write_report

__version__ = "0.1.0"
