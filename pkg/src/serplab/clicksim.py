"""Synthetic query population and position-based click model.

The model gives every page element a click weight
``examination(slot) * attractiveness(element)``: attractiveness is the
per-query relevance for generic results, a global constant for ads and
shopping boxes, and zero for specialized results and other elements.
A no-click weight competes with the elements; observed data conditions
on a click happening, so click-through shares are element weights
normalized over elements only.

Because arrangements move elements between slots (and hiding re-compacts
slots), the same page gets different click distributions under different
treatments - this module computes those potential outcomes exactly and
is the oracle the estimators are validated against. The exact operations
(`true_ctr`, `true_gap`, `true_pp`) use plain Python arithmetic, so
feeding `fractions.Fraction` weights yields exact rational answers.

`sample_events` is the matching event generator: it draws queries,
assigns groups through the shared hash, applies the arrangement and
samples clicks, emitting only click events (a no-click is redrawn, i.e.
the conditional distribution is sampled directly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .arrangements import apply
from .assignment import AssignmentKey, GroupWeights, assign
from .errors import DegenerateModelError, InvalidArgumentError, InvalidConfigError
from .model import (
    ArrangementId,
    ClickEvent,
    Column,
    ElementKind,
    Engine,
    SerpElement,
    SerpSnapshot,
    Slot,
    generic_rank,
)


class Coupling(Enum):
    """Joint law of potential outcomes across two arrangements.

    COMMON_RANDOMNESS couples outcomes through one shared uniform draw
    (nested intervals), giving E|z0 - za| = |p0 - pa| - the tighter
    reading and the default. INDEPENDENT draws outcomes independently,
    giving p0(1-pa) + pa(1-p0).
    """

    INDEPENDENT = "independent"
    COMMON_RANDOMNESS = "commonRandomness"


@dataclass(frozen=True)
class ClickModelParams:
    """Examination weights per slot plus attractiveness constants."""

    # int-zero defaults keep exact (Fraction) arithmetic exact
    examination: Mapping[Slot, float]
    ad_attractiveness: float = 0
    box_attractiveness: float = 0
    no_click_weight: float = 0

    @classmethod
    def positional(
        cls,
        main: Sequence[float],
        sidebar: Sequence[float] = (),
        **kwargs,
    ) -> "ClickModelParams":
        """Build from top-to-bottom per-column examination weights."""
        examination: dict[Slot, float] = {}
        for index, weight in enumerate(main):
            examination[Slot(Column.MAIN, index)] = weight
        for index, weight in enumerate(sidebar):
            examination[Slot(Column.SIDEBAR, index)] = weight
        return cls(examination=examination, **kwargs)

    @classmethod
    def from_config(cls, kv: Mapping[str, str]) -> "ClickModelParams":
        from .config import get_float, get_floats

        main = get_floats(kv, "model.examinationMain")
        if not main:
            raise InvalidConfigError("model.examinationMain is required")
        return cls.positional(
            main,
            sidebar=get_floats(kv, "model.examinationSidebar"),
            ad_attractiveness=get_float(kv, "model.adAttractiveness", 0.0),
            box_attractiveness=get_float(kv, "model.boxAttractiveness", 0.0),
            no_click_weight=get_float(kv, "model.noClickWeight", 0.0),
        )


@dataclass(frozen=True)
class SyntheticQuery:
    """One unit of the population: the untreated page plus relevances."""

    query_id: str
    engine: Engine
    snapshot: SerpSnapshot
    relevance: Mapping[str, float]

    def __post_init__(self) -> None:
        missing = [
            el.element_id
            for el in self.snapshot.generic_results()
            if el.element_id not in self.relevance
        ]
        if missing:
            raise InvalidArgumentError(
                f"relevance missing for generic result(s): {missing}"
            )


@dataclass(frozen=True)
class ClickDistribution:
    """Probabilities over page elements plus the no-click mass; sums to 1."""

    probabilities: Mapping[str, float]
    no_click: float


def _attractiveness(params: ClickModelParams, el: SerpElement, relevance: Mapping[str, float]):
    if el.kind is ElementKind.GENERIC_RESULT:
        try:
            return relevance[el.element_id]
        except KeyError:
            raise InvalidArgumentError(
                f"relevance missing for generic result {el.element_id!r}"
            ) from None
    if el.kind is ElementKind.AD:
        return params.ad_attractiveness
    if el.kind is ElementKind.SHOPPING_BOX:
        return params.box_attractiveness
    return 0


def _element_weights(
    params: ClickModelParams, snapshot: SerpSnapshot, relevance: Mapping[str, float]
) -> list[tuple[SerpElement, float]]:
    weights = []
    for el in snapshot.elements:
        exam = params.examination.get(el.slot, 0)
        weights.append((el, exam * _attractiveness(params, el, relevance)))
    return weights


def click_distribution(
    params: ClickModelParams, snapshot: SerpSnapshot, relevance: Mapping[str, float]
) -> ClickDistribution:
    """Exact click distribution for one (possibly treated) page."""
    weights = _element_weights(params, snapshot, relevance)
    total = sum(w for _, w in weights) + params.no_click_weight
    if total == 0:
        raise DegenerateModelError("all click weights are zero for this page")
    return ClickDistribution(
        probabilities={el.element_id: w / total for el, w in weights},
        no_click=params.no_click_weight / total,
    )


def true_ctr(
    params: ClickModelParams,
    query: SyntheticQuery,
    arrangement: ArrangementId,
    i: int,
) -> float:
    """P(click lands on c_i | a click happens) under the arrangement.

    c_i is the i-th generic result of the untreated page; the probability
    is evaluated on the treated page, where c_i may sit in another slot.
    """
    generics = query.snapshot.generic_results()
    if i < 1 or i > len(generics):
        raise InvalidArgumentError(f"rank {i} out of range (page has {len(generics)})")
    target = generics[i - 1].element_id
    arranged = apply(arrangement, query.snapshot).snapshot
    weights = _element_weights(params, arranged, query.relevance)
    total = sum(w for _, w in weights)
    if total == 0:
        raise DegenerateModelError("no clickable element on the treated page")
    for el, w in weights:
        if el.element_id == target:
            return w / total
    raise InvalidArgumentError(f"generic result {target!r} vanished under {arrangement}")


def _ctr_or_zero(
    params: ClickModelParams, query: SyntheticQuery, arrangement: ArrangementId, i: int
):
    # A page with fewer than i generic results can never produce a click
    # on c_i; the indicator is identically zero.
    if i > query.snapshot.num_results:
        return 0
    return true_ctr(params, query, arrangement, i)


def true_gap(
    params: ClickModelParams,
    population: Sequence[SyntheticQuery],
    a_alt: ArrangementId,
    a_ref: ArrangementId,
    i: int,
) -> float:
    """Population mean of CTR^i(a_alt) - CTR^i(a_ref); exact, no sampling."""
    if not population:
        raise InvalidArgumentError("population is empty")
    total = sum(
        _ctr_or_zero(params, q, a_alt, i) - _ctr_or_zero(params, q, a_ref, i)
        for q in population
    )
    return total / len(population)


def arrangement_click_shift(
    params: ClickModelParams,
    population: Sequence[SyntheticQuery],
    arrangement: ArrangementId,
    coupling: Coupling = Coupling.COMMON_RANDOMNESS,
    i: int = 1,
) -> float:
    """Mean over queries of E|z_{a0}(q) - z_a(q)| for one arrangement,
    where z is the indicator of a click on c_i."""
    if not population:
        raise InvalidArgumentError("population is empty")
    terms = []
    for q in population:
        p0 = _ctr_or_zero(params, q, ArrangementId.A0, i)
        pa = _ctr_or_zero(params, q, arrangement, i)
        lo, hi = (p0, pa) if p0 <= pa else (pa, p0)
        if coupling is Coupling.COMMON_RANDOMNESS:
            terms.append(hi - lo)
        else:
            # p0(1-pa) + pa(1-p0), written as |p0-pa| plus a non-negative
            # term so the coupling inequality survives float rounding.
            terms.append((hi - lo) + 2 * lo * (1 - hi))
    return sum(terms) / len(population)


def true_pp(
    params: ClickModelParams,
    population: Sequence[SyntheticQuery],
    arrangements: Iterable[ArrangementId],
    coupling: Coupling = Coupling.COMMON_RANDOMNESS,
) -> float:
    """Exact performative power: the largest mean absolute effect on the
    top-result click indicator over the given action set."""
    arrangements = tuple(arrangements)
    if not arrangements:
        raise InvalidArgumentError("arrangements set is empty")
    return max(
        arrangement_click_shift(params, population, a, coupling) for a in arrangements
    )


@dataclass(frozen=True)
class PopulationSpec:
    """Distribution of synthetic pages and relevances.

    Defaults give plausible desk-scale pages: 8-10 generic results, ads on
    roughly a third of pages, a shopping box on 3.2% of pages, candidate
    counts log-uniform between 10^3 and 10^9, and geometrically decaying
    relevance with lognormal noise.
    """

    n_queries: int
    seed: int = 0
    engine: Engine = Engine.GOOGLE
    results_min: int = 8
    results_max: int = 10
    ads_probability: float = 0.35
    max_top_ads: int = 2
    box_probability: float = 0.032
    box_sidebar_share: float = 0.5
    ssr_probability: float = 0.25
    candidate_count_log10_min: float = 3.0
    candidate_count_log10_max: float = 9.0
    candidate_count_missing: float = 0.0
    relevance_decay: float = 0.7
    relevance_sigma: float = 0.25

    def __post_init__(self) -> None:
        if self.n_queries < 0:
            raise InvalidConfigError("n_queries must be >= 0")
        if not 0 < self.results_min <= self.results_max:
            raise InvalidConfigError("need 0 < results_min <= results_max")
        for name in (
            "ads_probability",
            "box_probability",
            "box_sidebar_share",
            "ssr_probability",
            "candidate_count_missing",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfigError(f"{name} must be in [0, 1], got {value}")

    @classmethod
    def from_config(cls, kv: Mapping[str, str]) -> "PopulationSpec":
        from .config import get_float, get_int

        return cls(
            n_queries=get_int(kv, "population.queries"),
            seed=get_int(kv, "population.seed", 0),
            engine=Engine(kv.get("population.engine", "google")),
            results_min=get_int(kv, "population.resultsMin", 8),
            results_max=get_int(kv, "population.resultsMax", 10),
            ads_probability=get_float(kv, "population.adsProbability", 0.35),
            max_top_ads=get_int(kv, "population.maxTopAds", 2),
            box_probability=get_float(kv, "population.boxProbability", 0.032),
            box_sidebar_share=get_float(kv, "population.boxSidebarShare", 0.5),
            ssr_probability=get_float(kv, "population.ssrProbability", 0.25),
            candidate_count_log10_min=get_float(kv, "population.candidateLog10Min", 3.0),
            candidate_count_log10_max=get_float(kv, "population.candidateLog10Max", 9.0),
            candidate_count_missing=get_float(kv, "population.candidateMissing", 0.0),
            relevance_decay=get_float(kv, "population.relevanceDecay", 0.7),
            relevance_sigma=get_float(kv, "population.relevanceSigma", 0.25),
        )


def generate_population(spec: PopulationSpec) -> list[SyntheticQuery]:
    """Draw a deterministic population of synthetic queries from the spec.

    Page layout in the Main column, top to bottom: shopping box (when on
    top), top ads, then generic results with at most one specialized
    result inserted between two of the first few ranks.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_queries
    if n == 0:
        return []
    # One batched draw per page attribute keeps large populations cheap.
    n_results_all = rng.integers(spec.results_min, spec.results_max + 1, size=n)
    ads_flag = rng.random(n) < spec.ads_probability
    n_ads_all = rng.integers(1, spec.max_top_ads + 1, size=n)
    box_flag = rng.random(n) < spec.box_probability
    sidebar_flag = rng.random(n) < spec.box_sidebar_share
    ssr_flag = rng.random(n) < spec.ssr_probability
    ssr_draw = rng.random(n)
    cc_missing = rng.random(n) < spec.candidate_count_missing
    cc_log10 = rng.uniform(
        spec.candidate_count_log10_min, spec.candidate_count_log10_max, size=n
    )
    noise_all = (
        np.exp(rng.normal(0.0, spec.relevance_sigma, size=(n, spec.results_max)))
        if spec.relevance_sigma > 0
        else np.ones((n, spec.results_max))
    )

    population: list[SyntheticQuery] = []
    for qi in range(n):
        qid = f"q{qi:06d}"
        n_results = int(n_results_all[qi])
        n_ads = int(n_ads_all[qi]) if ads_flag[qi] else 0
        has_box = bool(box_flag[qi])
        box_sidebar = has_box and bool(sidebar_flag[qi])
        ssr_anchor = None
        if ssr_flag[qi]:
            # Number of generic results above the specialized result.
            ssr_anchor = int(ssr_draw[qi] * (min(3, n_results) + 1))

        elements: list[SerpElement] = []
        main_index = 0
        if has_box and not box_sidebar:
            elements.append(
                SerpElement(f"{qid}-box", ElementKind.SHOPPING_BOX, Slot(Column.MAIN, main_index))
            )
            main_index += 1
        for ad in range(n_ads):
            elements.append(
                SerpElement(f"{qid}-ad{ad}", ElementKind.AD, Slot(Column.MAIN, main_index))
            )
            main_index += 1
        for r in range(n_results):
            if ssr_anchor == r:
                elements.append(
                    SerpElement(
                        f"{qid}-ssr", ElementKind.SPECIALIZED_RESULT, Slot(Column.MAIN, main_index)
                    )
                )
                main_index += 1
            elements.append(
                SerpElement(f"{qid}-g{r}", ElementKind.GENERIC_RESULT, Slot(Column.MAIN, main_index))
            )
            main_index += 1
        if ssr_anchor == n_results:
            elements.append(
                SerpElement(
                    f"{qid}-ssr", ElementKind.SPECIALIZED_RESULT, Slot(Column.MAIN, main_index)
                )
            )
            main_index += 1
        if box_sidebar:
            elements.append(
                SerpElement(f"{qid}-box", ElementKind.SHOPPING_BOX, Slot(Column.SIDEBAR, 0))
            )

        candidate_count = None if cc_missing[qi] else int(10 ** cc_log10[qi])
        relevance = {
            f"{qid}-g{r}": float(spec.relevance_decay**r * noise_all[qi, r])
            for r in range(n_results)
        }

        population.append(
            SyntheticQuery(
                query_id=qid,
                engine=spec.engine,
                snapshot=SerpSnapshot(
                    engine=spec.engine,
                    page_index=0,
                    elements=tuple(elements),
                    candidate_count=candidate_count,
                ),
                relevance=relevance,
            )
        )
    return population


@dataclass
class _PageMeta:
    num_results: int
    ads_present: bool
    box_present: bool
    box_column: Column | None
    ssr_positions: tuple[int, ...]
    candidate_count: int | None
    page_index: int
    engine: Engine


@dataclass
class _Outcomes:
    """Conditional click targets and CDF for one (query, arrangement) pair."""

    kinds: list[ElementKind]
    original_ranks: list[int | None]
    displayed_ranks: list[int | None]
    cdf: np.ndarray


def _ssr_positions(snapshot: SerpSnapshot) -> tuple[int, ...]:
    """Generic-anchored positions: generics above each Main-column SSR."""
    main = snapshot.column(Column.MAIN)
    positions = []
    generics_above = 0
    for el in main:
        if el.kind is ElementKind.GENERIC_RESULT:
            generics_above += 1
        elif el.kind is ElementKind.SPECIALIZED_RESULT:
            positions.append(generics_above)
    return tuple(positions)


def _page_meta(query: SyntheticQuery) -> _PageMeta:
    snap = query.snapshot
    box = next((el for el in snap.elements if el.kind is ElementKind.SHOPPING_BOX), None)
    return _PageMeta(
        num_results=snap.num_results,
        ads_present=any(el.kind is ElementKind.AD for el in snap.elements),
        box_present=box is not None,
        box_column=box.slot.column if box else None,
        ssr_positions=_ssr_positions(snap),
        candidate_count=snap.candidate_count,
        page_index=snap.page_index,
        engine=snap.engine,
    )


def _build_outcomes(params: ClickModelParams, query: SyntheticQuery, group: ArrangementId) -> _Outcomes:
    arranged = apply(group, query.snapshot).snapshot
    weights = [
        (el, w) for el, w in _element_weights(params, arranged, query.relevance) if w > 0
    ]
    if not weights:
        raise DegenerateModelError(
            f"query {query.query_id} has no clickable element under {group.value}"
        )
    kinds = [el.kind for el, _ in weights]
    original_ranks = [generic_rank(query.snapshot, el.element_id) for el, _ in weights]
    displayed_ranks = [generic_rank(arranged, el.element_id) for el, _ in weights]
    values = np.asarray([float(w) for _, w in weights])
    cdf = np.cumsum(values / values.sum())
    cdf[-1] = 1.0
    return _Outcomes(kinds, original_ranks, displayed_ranks, cdf)


_CHUNK = 8192
_DEFAULT_START_TS = 1_700_000_000_000  # arbitrary fixed epoch for synthetic logs


def sample_events(
    params: ClickModelParams,
    population: Sequence[SyntheticQuery],
    weights: GroupWeights,
    n_events: int,
    seed: int,
    *,
    n_users: int = 32,
    duration_days: float = 28.0,
    start_ts: int = _DEFAULT_START_TS,
    salt: str = "",
) -> list[ClickEvent]:
    """Sample click events end to end: query -> group -> arrangement -> click.

    Only clicks are emitted (the no-click outcome is conditioned away, as
    in observed data). Events are generated in fixed-size chunks, each
    seeded from (seed, chunk index), so the output for a given seed is
    identical no matter how chunks are scheduled.
    """
    if n_events < 0:
        raise InvalidArgumentError("n_events must be >= 0")
    if n_events == 0:
        return []
    if not population:
        raise InvalidArgumentError("population is empty")
    if n_users < 1:
        raise InvalidArgumentError("n_users must be >= 1")

    metas = [_page_meta(q) for q in population]
    group_cache: dict[tuple[int, int], ArrangementId] = {}
    outcome_cache: dict[tuple[int, ArrangementId], _Outcomes] = {}
    duration_ms = max(1, int(duration_days * 86_400_000))

    events: list[ClickEvent] = []
    for chunk_index in range(math.ceil(n_events / _CHUNK)):
        size = min(_CHUNK, n_events - chunk_index * _CHUNK)
        rng = np.random.default_rng([seed, chunk_index])
        query_idx = rng.integers(0, len(population), size=size)
        user_idx = rng.integers(0, n_users, size=size)
        ts_offset = rng.integers(0, duration_ms, size=size)
        u_click = rng.random(size=size)
        id_bytes = rng.bytes(12 * size).hex()

        for row in range(size):
            qi = int(query_idx[row])
            ui = int(user_idx[row])
            query = population[qi]
            meta = metas[qi]

            pair = (ui, qi)
            group = group_cache.get(pair)
            if group is None:
                key = AssignmentKey(f"u{ui:04d}", query.query_id, salt)
                group = assign(key, query.engine, weights)
                group_cache[pair] = group

            outcome_key = (qi, group)
            outcomes = outcome_cache.get(outcome_key)
            if outcomes is None:
                outcomes = _build_outcomes(params, query, group)
                outcome_cache[outcome_key] = outcomes

            target = int(np.searchsorted(outcomes.cdf, u_click[row], side="right"))
            if target >= len(outcomes.kinds):  # u == 1.0 cannot happen; guard anyway
                target = len(outcomes.kinds) - 1

            events.append(
                ClickEvent(
                    event_id=id_bytes[row * 24 : row * 24 + 24],
                    user_id=f"u{ui:04d}",
                    timestamp=start_ts + int(ts_offset[row]),
                    engine=meta.engine,
                    group=group,
                    element_kind=outcomes.kinds[target],
                    page_index=meta.page_index,
                    num_results=meta.num_results,
                    ads_present=meta.ads_present,
                    box_present=meta.box_present,
                    ssr_positions=meta.ssr_positions,
                    original_rank=outcomes.original_ranks[target],
                    displayed_rank=outcomes.displayed_ranks[target],
                    box_column=meta.box_column,
                    candidate_count=meta.candidate_count,
                )
            )
    return events
