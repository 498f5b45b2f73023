"""Estimate report assembly and serialization.

A report bundles, for one event set: per-group click-share tables by
position, gap/distortion estimates for the rerank arrangements, the
combined-conduct comparisons on box-present pages, subgroup splits, the
candidate-count percentile curve, and the performative-power lower
bound. Estimates whose groups are missing from the data are recorded as
"insufficient data" notes instead of failing the run.

Serialization is deterministic: the same events, seed and resample count
produce byte-identical JSON and CSV, so reports can be diffed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .assignment import fnv1a64
from .errors import (
    EmptyGroupError,
    InvalidArgumentError,
    UndefinedDistortionError,
    UnstableStatisticError,
)
from .estimators import (
    DistortionEstimate,
    GapEstimate,
    click_share_table,
    distortion_hat,
    gap_hat,
    percentile_bins,
    pp_lower_bound,
    split_by,
)
from .model import ArrangementId, ClickEvent

CSV_COLUMNS = (
    "estimate",
    "position",
    "aRef",
    "aAlt",
    "n",
    "ctrRef",
    "ctrAlt",
    "gap",
    "ciLow",
    "ciHigh",
    "beta",
)

# Combined conducts of the box analysis, framed so the reference group is
# the counterfactual page without the element: "addBox" compares box-hidden
# (a6) against control, "swapAddAdsBox" compares clean pages (a4) against
# pages with ads/box kept and results swapped (a1).
CONDUCTS = (
    ("addBox", ArrangementId.A6, ArrangementId.A0),
    ("addAdsBox", ArrangementId.A4, ArrangementId.A0),
    ("swapAddBox", ArrangementId.A6, ArrangementId.A1),
    ("swapAddAdsBox", ArrangementId.A4, ArrangementId.A1),
)


@dataclass
class EstimateReport:
    metadata: dict[str, Any]
    group_counts: dict[str, int]
    click_shares: dict[str, dict[str, float]]
    estimates: list[dict[str, Any]]
    pp_lower_bound: float | None
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "metadata": self.metadata,
            "groupCounts": self.group_counts,
            "clickShares": self.click_shares,
            "estimates": self.estimates,
            "ppLowerBound": self.pp_lower_bound,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.estimates:
            if "gap" not in row:
                continue
            writer.writerow(
                [
                    row["estimate"],
                    row["position"],
                    row["aRef"],
                    row["aAlt"],
                    row["nRef"] + row["nAlt"],
                    repr(row["ctrRef"]),
                    repr(row["ctrAlt"]),
                    repr(row["gap"]),
                    repr(row["ciLow"]),
                    repr(row["ciHigh"]),
                    repr(row["beta"]) if row.get("beta") is not None else "",
                ]
            )
        return buffer.getvalue()


def _row(label: str, estimate: GapEstimate) -> dict[str, Any]:
    row: dict[str, Any] = {
        "estimate": label,
        "position": estimate.i,
        "aRef": estimate.a_ref.value,
        "aAlt": estimate.a_alt.value,
        "nRef": estimate.n_ref,
        "nAlt": estimate.n_alt,
        "ctrRef": estimate.ctr_ref,
        "ctrAlt": estimate.ctr_alt,
        "gap": estimate.gap,
        "ciLow": estimate.ci_low,
        "ciHigh": estimate.ci_high,
        "beta": None,
        "direction": None,
    }
    if isinstance(estimate, DistortionEstimate):
        row["beta"] = estimate.beta
        row["direction"] = estimate.direction.value
    return row


def _seed_for(seed: int, label: str) -> list[int]:
    return [seed, fnv1a64(label.encode("utf-8"))]


def build_report(
    events: Sequence[ClickEvent],
    *,
    seed: int = 0,
    resamples: int = 200,
    max_position: int = 3,
    n_bins: int = 4,
    filters: Sequence[str] = (),
) -> EstimateReport:
    report = EstimateReport(
        metadata={
            "events": len(events),
            "seed": seed,
            "resamples": resamples,
            "filters": list(filters),
        },
        group_counts={},
        click_shares={},
        estimates=[],
        pp_lower_bound=None,
    )
    for event in events:
        key = event.group.value
        report.group_counts[key] = report.group_counts.get(key, 0) + 1
    report.group_counts = dict(sorted(report.group_counts.items()))

    for group_name in report.group_counts:
        report.click_shares[group_name] = click_share_table(events, ArrangementId(group_name))

    def attempt(label: str, fn) -> GapEstimate | None:
        try:
            estimate = fn()
        except (EmptyGroupError, UndefinedDistortionError, InvalidArgumentError, UnstableStatisticError) as exc:
            report.estimates.append({"estimate": label, "status": "insufficient data"})
            report.notes.append(f"{label}: insufficient data ({exc})")
            return None
        report.estimates.append(_row(label, estimate))
        return estimate

    # Rerank effects against control, positions 1..max_position.
    position1_gaps: list[GapEstimate] = []
    for a_alt in (ArrangementId.A1, ArrangementId.A2, ArrangementId.A3):
        for i in range(1, max_position + 1):
            label = f"gap:{a_alt.value}:c{i}"
            estimate = attempt(
                label,
                lambda a=a_alt, pos=i, lbl=label: _gap_or_distortion(
                    events, a, ArrangementId.A0, pos, resamples, _seed_for(seed, lbl)
                ),
            )
            if estimate is not None and i == 1:
                position1_gaps.append(estimate)

    if position1_gaps:
        report.pp_lower_bound = pp_lower_bound(position1_gaps)

    # Combined conducts, on pages where the shopping box is present.
    box_events, _ = split_by(events, lambda e: e.box_present)
    for name, a_ref, a_alt in CONDUCTS:
        label = f"conduct:{name}"
        attempt(
            label,
            lambda r=a_ref, a=a_alt, lbl=label: distortion_hat(
                box_events, a, r, 1, resamples=resamples, seed=_seed_for(seed, lbl)
            ),
        )

    # Subgroup splits for the swap-1-2 effect at position 1.
    for predicate in ("adsOrBoxPresent", "ssrBetweenTopTwo"):
        matching, rest = split_by(events, predicate)
        for side, subset in (("with", matching), ("without", rest)):
            label = f"split:{predicate}:{side}"
            attempt(
                label,
                lambda sub=subset, lbl=label: _gap_or_distortion(
                    sub, ArrangementId.A1, ArrangementId.A0, 1, resamples, _seed_for(seed, lbl)
                ),
            )

    # Candidate-count percentile curve.
    try:
        bins = percentile_bins(
            events, n_bins=n_bins, resamples=resamples, seed=seed
        )
    except (InvalidArgumentError, EmptyGroupError, UndefinedDistortionError, UnstableStatisticError) as exc:
        report.notes.append(f"candidateBins: insufficient data ({exc})")
    else:
        for bin_estimate in bins.bins:
            row = _row(f"candidateBin:{bin_estimate.bin_index}", bin_estimate.estimate)
            row["keyLow"] = bin_estimate.key_low
            row["keyHigh"] = bin_estimate.key_high
            report.estimates.append(row)
        report.metadata["candidateBinsExcluded"] = bins.excluded

    return report


def _gap_or_distortion(
    events: Sequence[ClickEvent],
    a_alt: ArrangementId,
    a_ref: ArrangementId,
    i: int,
    resamples: int,
    seed,
) -> GapEstimate:
    """Distortion when the reference CTR allows it, otherwise the bare gap."""
    try:
        return distortion_hat(events, a_alt, a_ref, i, resamples=resamples, seed=seed)
    except UndefinedDistortionError:
        return gap_hat(events, a_alt, a_ref, i, resamples=resamples, seed=seed)


def write_report(report: EstimateReport, outdir: str | Path) -> tuple[Path, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    json_path = outdir / "report.json"
    csv_path = outdir / "estimates.csv"
    json_path.write_text(report.to_json(), encoding="utf-8")
    csv_path.write_text(report.to_csv(), encoding="utf-8")
    return json_path, csv_path
