"""Causal effect estimators over click event sets.

CTR^i(a) is the share of group-a clicks landing on c_i (the element's
rank on the untreated page), with all clicks - ads, boxes, whatever - in
the denominator. The gap is the CTR difference between two groups, the
distortion expresses it relative to the reference CTR, and the largest
absolute gap at position 1 lower-bounds performative power. Confidence
intervals come from a percentile bootstrap stratified by treatment group
(the resampling respects the randomized design).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EmptyGroupError,
    InvalidArgumentError,
    SerplabError,
    UndefinedDistortionError,
    UnstableStatisticError,
)
from .model import ArrangementId, ClickEvent, ElementKind

Statistic = Callable[[Sequence[ClickEvent]], float]


@dataclass(frozen=True)
class CtrEstimate:
    value: float
    n: int  # clicks in the group (the denominator)


@dataclass(frozen=True)
class GapEstimate:
    i: int
    a_ref: ArrangementId
    a_alt: ArrangementId
    ctr_ref: float
    ctr_alt: float
    gap: float
    ci_low: float
    ci_high: float
    n_ref: int
    n_alt: int


class Direction(Enum):
    LOSS = "loss"
    GAIN = "gain"


@dataclass(frozen=True)
class DistortionEstimate(GapEstimate):
    beta: float = 0.0
    direction: Direction = Direction.GAIN


def ctr_hat(events: Sequence[ClickEvent], group: ArrangementId, i: int) -> CtrEstimate:
    """Share of group clicks on c_i; denominator is every click in the group."""
    if i < 1:
        raise InvalidArgumentError("position is 1-based")
    n = 0
    hits = 0
    for event in events:
        if event.group is group:
            n += 1
            if event.original_rank == i:
                hits += 1
    if n == 0:
        raise EmptyGroupError(f"no events in group {group.value}")
    return CtrEstimate(hits / n, n)


def bootstrap_ci(
    events: Sequence[ClickEvent],
    statistic: Statistic,
    resamples: int = 200,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval, resampling within each treatment group.

    Resamples on which the statistic is undefined (an estimator error or
    division by zero) are skipped and counted; more than 10% skips makes
    the statistic unstable and raises. Deterministic for a given seed.
    """
    if resamples < 1:
        raise InvalidArgumentError("resamples must be >= 1")
    if not 0.0 < level < 1.0:
        raise InvalidArgumentError("level must be in (0, 1)")
    by_group: dict[ArrangementId, list[ClickEvent]] = {}
    for event in events:
        by_group.setdefault(event.group, []).append(event)

    rng = np.random.default_rng(seed)
    values: list[float] = []
    skipped = 0
    for _ in range(resamples):
        resample: list[ClickEvent] = []
        for group_events in by_group.values():
            n = len(group_events)
            indices = rng.integers(0, n, size=n).tolist()
            resample.extend(group_events[k] for k in indices)
        try:
            values.append(float(statistic(resample)))
        except (SerplabError, ZeroDivisionError):
            skipped += 1
    if skipped > 0.1 * resamples:
        raise UnstableStatisticError(
            f"statistic undefined on {skipped}/{resamples} resamples"
        )
    alpha = (1.0 - level) / 2.0
    low, high = np.quantile(np.asarray(values), [alpha, 1.0 - alpha])
    return float(low), float(high)


def gap_hat(
    events: Sequence[ClickEvent],
    a_alt: ArrangementId,
    a_ref: ArrangementId,
    i: int,
    *,
    resamples: int = 200,
    level: float = 0.95,
    seed: int = 0,
) -> GapEstimate:
    """Estimated performativity gap CTR^i(a_alt) - CTR^i(a_ref) with CI."""
    sub = [e for e in events if e.group in (a_alt, a_ref)]
    ref = ctr_hat(sub, a_ref, i)
    alt = ctr_hat(sub, a_alt, i)
    gap = alt.value - ref.value

    def statistic(resample: Sequence[ClickEvent]) -> float:
        # Same value as ctr_hat(a_alt) - ctr_hat(a_ref), in one pass.
        if a_alt is a_ref:
            return 0.0
        n_ref = hits_ref = n_alt = hits_alt = 0
        for event in resample:
            if event.group is a_ref:
                n_ref += 1
                if event.original_rank == i:
                    hits_ref += 1
            elif event.group is a_alt:
                n_alt += 1
                if event.original_rank == i:
                    hits_alt += 1
        return hits_alt / n_alt - hits_ref / n_ref

    low, high = bootstrap_ci(sub, statistic, resamples=resamples, level=level, seed=seed)
    # The percentile interval must bracket the point estimate; extreme
    # resampling skew could leave it outside, so widen if needed.
    low = min(low, gap)
    high = max(high, gap)
    return GapEstimate(
        i=i,
        a_ref=a_ref,
        a_alt=a_alt,
        ctr_ref=ref.value,
        ctr_alt=alt.value,
        gap=gap,
        ci_low=low,
        ci_high=high,
        n_ref=ref.n,
        n_alt=alt.n,
    )


def distortion_hat(
    events: Sequence[ClickEvent],
    a_alt: ArrangementId,
    a_ref: ArrangementId,
    i: int,
    **bootstrap_kwargs,
) -> DistortionEstimate:
    """Distortion beta = |gap| / CTR^i(a_ref): the redirected traffic share.

    Group order is the caller's to choose, so reverse-framed conducts
    (e.g. "add box" measured as box-hidden -> control) work the same way.
    """
    gap = gap_hat(events, a_alt, a_ref, i, **bootstrap_kwargs)
    if gap.ctr_ref == 0:
        raise UndefinedDistortionError(
            f"reference CTR is zero for group {a_ref.value} at position {i}"
        )
    return DistortionEstimate(
        **{f.name: getattr(gap, f.name) for f in gap.__dataclass_fields__.values()},
        beta=abs(gap.gap) / gap.ctr_ref,
        direction=Direction.LOSS if gap.gap < 0 else Direction.GAIN,
    )


def pp_lower_bound(gaps: Sequence[GapEstimate]) -> float:
    """Largest |gap| over position-1 comparisons against the control group."""
    if not gaps:
        raise InvalidArgumentError("no gap estimates given")
    for gap in gaps:
        if gap.a_ref is not ArrangementId.A0:
            raise InvalidArgumentError("lower bound requires a0 as the reference")
        if gap.i != 1:
            raise InvalidArgumentError("lower bound is defined at position 1")
    return max(abs(gap.gap) for gap in gaps)


def compose_power(mediated_share: float, position_share: float, beta: float) -> float:
    """Traffic share a platform can redirect across a mediated market:
    mediated_share * position_share * beta."""
    if not 0.0 <= mediated_share <= 1.0:
        raise InvalidArgumentError("mediated_share must be in [0, 1]")
    if not 0.0 <= position_share <= 1.0:
        raise InvalidArgumentError("position_share must be in [0, 1]")
    if beta < 0.0:
        raise InvalidArgumentError("beta must be >= 0")
    product = mediated_share * position_share * beta
    if product > 1.0:
        raise InvalidArgumentError("composed share exceeds 1")
    return product


_NAMED_PREDICATES: dict[str, Callable[[ClickEvent], bool]] = {
    # Page-level subgroups, always judged on untreated-page metadata.
    "adsOrBoxPresent": lambda e: e.ads_present or e.box_present,
    # ssr_positions counts generics above each specialized result, so the
    # value 1 marks an SSR strictly between the first two generic results.
    "ssrBetweenTopTwo": lambda e: 1 in e.ssr_positions,
}


def split_by(
    events: Sequence[ClickEvent],
    predicate: str | Callable[[ClickEvent], bool],
) -> tuple[list[ClickEvent], list[ClickEvent]]:
    """Partition events into (matching, rest) by a named or custom filter."""
    if callable(predicate):
        fn = predicate
    else:
        try:
            fn = _NAMED_PREDICATES[predicate]
        except KeyError:
            known = ", ".join(sorted(_NAMED_PREDICATES))
            raise InvalidArgumentError(
                f"unknown predicate {predicate!r} (named: {known}, or pass a callable)"
            ) from None
    matching: list[ClickEvent] = []
    rest: list[ClickEvent] = []
    for event in events:
        (matching if fn(event) else rest).append(event)
    return matching, rest


@dataclass(frozen=True)
class BinEstimate:
    bin_index: int
    key_low: int
    key_high: int
    n: int
    estimate: DistortionEstimate


@dataclass(frozen=True)
class PercentileBinsResult:
    bins: tuple[BinEstimate, ...]
    excluded: int  # events without the key, left out of every bin


def percentile_bins(
    events: Sequence[ClickEvent],
    key: str = "candidateCount",
    n_bins: int = 4,
    *,
    a_alt: ArrangementId = ArrangementId.A1,
    a_ref: ArrangementId = ArrangementId.A0,
    i: int = 1,
    resamples: int = 200,
    seed: int = 0,
) -> PercentileBinsResult:
    """Equal-frequency bins by candidate count, with per-bin distortion.

    Requires the key on at least 90% of events; the rest are excluded and
    counted. Bin sizes differ by at most one event.
    """
    if key != "candidateCount":
        raise InvalidArgumentError(f"unsupported bin key {key!r}")
    if n_bins < 1:
        raise InvalidArgumentError("n_bins must be >= 1")
    keyed = [(e.candidate_count, e) for e in events if e.candidate_count is not None]
    excluded = len(events) - len(keyed)
    if not events or excluded > 0.1 * len(events):
        raise InvalidArgumentError(
            f"candidateCount present on {len(keyed)}/{len(events)} events; need >= 90%"
        )
    distinct = len({k for k, _ in keyed})
    if n_bins > distinct:
        raise InvalidArgumentError(
            f"{n_bins} bins requested but only {distinct} distinct key values"
        )
    keyed.sort(key=lambda pair: pair[0])

    n = len(keyed)
    base, remainder = divmod(n, n_bins)
    bins: list[BinEstimate] = []
    start = 0
    for b in range(n_bins):
        size = base + (1 if b < remainder else 0)
        chunk = keyed[start : start + size]
        start += size
        chunk_events = [e for _, e in chunk]
        estimate = distortion_hat(
            chunk_events, a_alt, a_ref, i, resamples=resamples, seed=[seed, b]
        )
        bins.append(
            BinEstimate(
                bin_index=b,
                key_low=chunk[0][0],
                key_high=chunk[-1][0],
                n=size,
                estimate=estimate,
            )
        )
    return PercentileBinsResult(tuple(bins), excluded)


def click_share_table(events: Sequence[ClickEvent], group: ArrangementId) -> dict[str, float]:
    """Click shares per target for one group: c1..cK plus non-generic kinds.

    Targets a generic click by its untreated rank ("c3"); other clicks by
    element kind. Shares always sum to 1 over the returned keys.
    """
    counts: dict[str, int] = {}
    total = 0
    for event in events:
        if event.group is not group and event.group != group:
            continue
        total += 1
        if event.element_kind is ElementKind.GENERIC_RESULT and event.original_rank:
            target = f"c{event.original_rank}"
        else:
            target = event.element_kind.value
        counts[target] = counts.get(target, 0) + 1
    if total == 0:
        raise EmptyGroupError(f"no events in group {group.value}")

    def sort_key(target: str):
        if target.startswith("c") and target[1:].isdigit():
            return (0, int(target[1:]), "")
        return (1, 0, target)

    return {t: counts[t] / total for t in sorted(counts, key=sort_key)}
