import numpy as np
import pytest

from serplab.assignment import GroupWeights
from serplab.clicksim import (
    ClickModelParams,
    PopulationSpec,
    generate_population,
    sample_events,
    true_ctr,
    true_gap,
)
from serplab.errors import (
    EmptyGroupError,
    InvalidArgumentError,
    UndefinedDistortionError,
    UnstableStatisticError,
)
from serplab.estimators import (
    Direction,
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
from serplab.model import ArrangementId, ElementKind, Engine

from conftest import make_clicks, make_event

A0, A1, A2, A3 = ArrangementId.A0, ArrangementId.A1, ArrangementId.A2, ArrangementId.A3
A6 = ArrangementId.A6


class TestCtrHat:
    def test_forty_three_percent(self):
        events = make_clicks(A0, [1] * 43 + [2] * 30 + [3] * 17 + [None] * 10)
        estimate = ctr_hat(events, A0, 1)
        assert estimate.value == pytest.approx(0.43)
        assert estimate.n == 100

    def test_all_ad_clicks(self):
        events = make_clicks(A0, [None] * 20)
        assert ctr_hat(events, A0, 1).value == 0.0

    def test_single_event(self):
        events = make_clicks(A0, [2])
        assert ctr_hat(events, A0, 2).value == 1.0

    def test_empty_group(self):
        events = make_clicks(A0, [1, 2])
        with pytest.raises(EmptyGroupError):
            ctr_hat(events, A1, 1)


class TestGapHat:
    def test_paper_aggregates(self, paper_fixture_events):
        gap = gap_hat(paper_fixture_events, A1, A0, 1, seed=2)
        assert gap.ctr_ref == pytest.approx(0.43)
        assert gap.ctr_alt == pytest.approx(0.24)
        assert gap.gap == pytest.approx(-0.19)
        assert gap.ci_low <= gap.gap <= gap.ci_high

    def test_same_group_is_zero(self, paper_fixture_events):
        gap = gap_hat(paper_fixture_events, A0, A0, 1, seed=2)
        assert gap.gap == 0.0
        assert (gap.ci_low, gap.ci_high) == (0.0, 0.0)

    def test_gap_equals_ctr_difference(self, paper_fixture_events):
        gap = gap_hat(paper_fixture_events, A2, A0, 1, seed=2)
        assert abs(gap.gap - (gap.ctr_alt - gap.ctr_ref)) <= 1e-12

    def test_consistency_against_oracle(self):
        spec = PopulationSpec(n_queries=500, seed=41, relevance_sigma=0.1)
        population = generate_population(spec)
        params = ClickModelParams.positional(
            [1.0, 0.6, 0.35, 0.2, 0.12, 0.08, 0.05, 0.03, 0.02, 0.015, 0.01, 0.008],
            sidebar=[0.3],
            ad_attractiveness=0.3,
            box_attractiveness=0.6,
            no_click_weight=0.4,
        )
        weights = GroupWeights.of(Engine.GOOGLE, {A0: 0.5, A1: 0.5})
        events = sample_events(params, population, weights, 60_000, seed=42, n_users=64)
        estimate = gap_hat(events, A1, A0, 1, seed=5, resamples=50)
        oracle = true_gap(params, population, A1, A0, 1)
        assert abs(estimate.gap - oracle) <= 0.015


class TestDistortionHat:
    def test_beta_044(self, paper_fixture_events):
        d = distortion_hat(paper_fixture_events, A1, A0, 1, seed=2)
        assert d.beta == pytest.approx(0.19 / 0.43, abs=1e-12)
        assert d.direction is Direction.LOSS

    def test_beta_039_second_position(self, paper_fixture_events):
        d = distortion_hat(paper_fixture_events, A3, A0, 2, seed=2)
        assert d.beta == pytest.approx(0.39, abs=1e-12)

    def test_zero_gap_zero_beta(self):
        events = make_clicks(A0, [1, 2]) + make_clicks(A1, [1, 2])
        d = distortion_hat(events, A1, A0, 1, seed=1)
        assert d.beta == 0.0
        assert d.direction is Direction.GAIN

    def test_reversed_comparison_measures_additions(self):
        # "Adding" the box is framed as box-hidden (a6) reference against
        # control (a0) where the box absorbs clicks from c1.
        events = make_clicks(A6, [1] * 60 + [2] * 40) + make_clicks(
            A0, [1] * 45 + [2] * 40 + [None] * 15
        )
        d = distortion_hat(events, A0, A6, 1, seed=1)
        assert d.a_ref is A6 and d.a_alt is A0
        assert d.gap == pytest.approx(0.45 - 0.60)
        assert d.beta == pytest.approx(0.15 / 0.60)

    def test_zero_reference_ctr(self):
        events = make_clicks(A0, [2, 2]) + make_clicks(A1, [1, 2])
        with pytest.raises(UndefinedDistortionError):
            distortion_hat(events, A1, A0, 1, seed=1)


class TestBootstrapCi:
    def test_constant_statistic(self):
        events = make_clicks(A0, [1, 2, 3])
        assert bootstrap_ci(events, lambda evs: 7.5, seed=1) == (7.5, 7.5)

    def test_deterministic_given_seed(self, paper_fixture_events):
        stat = lambda evs: ctr_hat(evs, A0, 1).value
        first = bootstrap_ci(paper_fixture_events, stat, seed=9)
        second = bootstrap_ci(paper_fixture_events, stat, seed=9)
        assert first == second
        assert first != bootstrap_ci(paper_fixture_events, stat, seed=10)

    def test_interval_brackets_truth_roughly(self):
        rng = np.random.default_rng(3)
        events = make_clicks(A0, rng.integers(1, 4, size=400).tolist())
        stat = lambda evs: ctr_hat(evs, A0, 1).value
        low, high = bootstrap_ci(events, stat, seed=4)
        point = ctr_hat(events, A0, 1).value
        assert low <= point <= high
        assert high - low < 0.2

    def test_unstable_statistic(self):
        events = make_clicks(A0, [1, 2, 3])

        def bad_statistic(evs):
            raise EmptyGroupError("always undefined")

        with pytest.raises(UnstableStatisticError):
            bootstrap_ci(events, bad_statistic, seed=1)

    def test_stratification_preserves_group_sizes(self):
        events = make_clicks(A0, [1] * 10) + make_clicks(A1, [1] * 5)

        def group_sizes(evs):
            assert sum(e.group is A0 for e in evs) == 10
            assert sum(e.group is A1 for e in evs) == 5
            return 0.0

        bootstrap_ci(events, group_sizes, resamples=20, seed=1)

    def test_bad_level(self):
        with pytest.raises(InvalidArgumentError):
            bootstrap_ci(make_clicks(A0, [1]), lambda e: 0.0, level=1.5)


class TestPpLowerBound:
    def _gap(self, value, a_alt=A1, a_ref=A0, i=1):
        return gap_hat(
            make_clicks(a_ref, [1] * 50 + [2] * 50) + make_clicks(a_alt, [1] * 30 + [2] * 70),
            a_alt,
            a_ref,
            i,
            seed=1,
        )

    def test_max_absolute_gap(self, paper_fixture_events):
        gaps = [
            gap_hat(paper_fixture_events, a, A0, 1, seed=2)
            for a in (A1, A2, A3)
        ]
        assert pp_lower_bound(gaps) == pytest.approx(0.27)

    def test_single_zero_gap(self):
        events = make_clicks(A0, [1, 2]) + make_clicks(A1, [1, 2])
        assert pp_lower_bound([gap_hat(events, A1, A0, 1, seed=1)]) == 0.0

    def test_requires_control_reference(self):
        events = make_clicks(A1, [1, 2]) + make_clicks(A2, [1, 2])
        gap = gap_hat(events, A2, A1, 1, seed=1)
        with pytest.raises(InvalidArgumentError):
            pp_lower_bound([gap])

    def test_requires_position_one(self, paper_fixture_events):
        gap = gap_hat(paper_fixture_events, A1, A0, 2, seed=1)
        with pytest.raises(InvalidArgumentError):
            pp_lower_bound([gap])

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            pp_lower_bound([])

    def test_bound_below_oracle_power_for_exact_gaps(self):
        # Feed the estimator exact oracle gaps: the resulting lower bound
        # must sit below true performative power under both couplings.
        from fractions import Fraction as F

        from serplab.clicksim import (
            ClickModelParams,
            Coupling,
            SyntheticQuery,
            true_gap,
            true_pp,
        )
        from serplab.estimators import GapEstimate
        from serplab.model import ArrangementId, Engine

        from conftest import make_snapshot

        params = ClickModelParams.positional(
            [F(1), F(1, 2), F(1, 4), F(1, 8)], ad_attractiveness=F(1, 3), no_click_weight=F(1, 4)
        )
        population = [
            SyntheticQuery(
                "qa",
                Engine.GOOGLE,
                make_snapshot(["ad", "g", "g", "g"]),
                {"g1": F(1), "g2": F(2, 3), "g3": F(1, 2)},
            ),
            SyntheticQuery(
                "qb",
                Engine.GOOGLE,
                make_snapshot(["g", "g", "g"]),
                {"g1": F(1, 4), "g2": F(1), "g3": F(3, 4)},
            ),
        ]
        from serplab.clicksim import true_ctr

        def mean_ctr(arrangement):
            return sum(true_ctr(params, q, arrangement, 1) for q in population) / len(population)

        arrangements = [a for a in ArrangementId if a is not A0]
        ctr_ref = mean_ctr(A0)
        gaps = []
        for a in arrangements:
            value = true_gap(params, population, a, A0, 1)
            gaps.append(
                GapEstimate(
                    i=1, a_ref=A0, a_alt=a,
                    ctr_ref=ctr_ref, ctr_alt=ctr_ref + value, gap=value,
                    ci_low=value, ci_high=value, n_ref=1, n_alt=1,
                )
            )
        bound = pp_lower_bound(gaps)
        for coupling in Coupling:
            assert bound <= true_pp(params, population, arrangements, coupling)


class TestComposePower:
    def test_published_composition(self):
        assert compose_power(0.8, 0.7, 0.528) == pytest.approx(0.29568, abs=1e-9)

    def test_zero_annihilates(self):
        assert compose_power(0.0, 0.7, 0.5) == 0.0
        assert compose_power(0.8, 0.0, 0.5) == 0.0
        assert compose_power(0.8, 0.7, 0.0) == 0.0

    def test_identity_shares(self):
        assert compose_power(1.0, 1.0, 0.37) == 0.37

    def test_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            compose_power(1.2, 0.5, 0.5)
        with pytest.raises(InvalidArgumentError):
            compose_power(0.5, -0.1, 0.5)
        with pytest.raises(InvalidArgumentError):
            compose_power(1.0, 1.0, 1.5)


class TestSplitBy:
    def test_all_unmatched(self):
        events = make_clicks(A0, [1, 2, 3])
        matching, rest = split_by(events, "adsOrBoxPresent")
        assert matching == [] and rest == events

    def test_mixed_fixture(self):
        with_box = [make_event(event_id=f"b{i}", box_present=True) for i in range(2)]
        without = [make_event(event_id=f"p{i}") for i in range(2)]
        matching, rest = split_by(with_box + without, "adsOrBoxPresent")
        assert len(matching) == 2 and len(rest) == 2

    def test_ssr_between_top_two(self):
        between = make_event(event_id="s1", ssr_positions=(1,))
        below = make_event(event_id="s2", ssr_positions=(0, 3))
        matching, rest = split_by([between, below], "ssrBetweenTopTwo")
        assert matching == [between] and rest == [below]

    def test_split_sizes_binomial(self):
        spec = PopulationSpec(n_queries=2_000, seed=17, box_probability=0.5)
        population = generate_population(spec)
        params = ClickModelParams.positional([1.0] * 12, box_attractiveness=0.5)
        events = sample_events(
            params, population, GroupWeights.single(Engine.GOOGLE, A0), 20_000, seed=18
        )
        matching, rest = split_by(events, lambda e: e.box_present)
        share = len(matching) / len(events)
        assert abs(share - 0.5) < 0.05

    def test_custom_predicate(self):
        events = make_clicks(A0, [1, 2, 3])
        matching, rest = split_by(events, lambda e: e.original_rank == 2)
        assert [e.original_rank for e in matching] == [2]

    def test_unknown_predicate(self):
        with pytest.raises(InvalidArgumentError):
            split_by([], "somethingElse")


def _binned_events(ctr_alt_by_bin):
    """Four candidate-count strata with fixed a0 CTR 0.5 and varying a1 CTR."""
    events = []
    for b, ctr_alt in enumerate(ctr_alt_by_bin):
        cc = (b + 1) * 1_000
        hits = int(ctr_alt * 100)
        events += make_clicks(A0, [1] * 50 + [2] * 50, start_id=b * 1000, candidate_count=cc)
        events += make_clicks(
            A1, [1] * hits + [2] * (100 - hits), start_id=b * 1000 + 500, candidate_count=cc
        )
    return events


class TestPercentileBins:
    def test_single_bin_matches_global(self, paper_fixture_events):
        result = percentile_bins(paper_fixture_events, n_bins=1, seed=3)
        (bin0,) = result.bins
        whole = distortion_hat(paper_fixture_events, A1, A0, 1, seed=3)
        assert bin0.estimate.gap == whole.gap
        assert bin0.estimate.beta == whole.beta
        assert bin0.n == len(paper_fixture_events)
        assert result.excluded == 0

    def test_equal_frequency_sizes(self):
        events = _binned_events([0.4, 0.3, 0.2, 0.1])
        result = percentile_bins(events, n_bins=4, seed=3)
        sizes = [b.n for b in result.bins]
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == len(events)

    def test_beta_monotone_in_constructed_strata(self):
        events = _binned_events([0.4, 0.3, 0.2, 0.1])
        result = percentile_bins(events, n_bins=4, seed=3)
        betas = [b.estimate.beta for b in result.bins]
        assert betas == sorted(betas)
        assert betas[0] == pytest.approx(0.2)
        assert betas[-1] == pytest.approx(0.8)

    def test_beta_monotone_against_simulator_oracle(self):
        # Steeper examination decay for pages with more candidate results;
        # per-bin distortion must track the per-stratum oracle value.
        weights = GroupWeights.of(Engine.GOOGLE, {A0: 0.5, A1: 0.5})
        events = []
        oracle_betas = []
        for stratum, decay in enumerate([0.9, 0.7, 0.5, 0.3]):
            spec = PopulationSpec(
                n_queries=100,
                seed=60 + stratum,
                relevance_sigma=0.0,
                candidate_count_log10_min=3 + stratum,
                candidate_count_log10_max=3 + stratum,
                ads_probability=0.0,
                box_probability=0.0,
                ssr_probability=0.0,
            )
            population = generate_population(spec)
            params = ClickModelParams.positional([decay**k for k in range(12)])
            events += sample_events(
                params, population, weights, 20_000, seed=70 + stratum, n_users=48
            )
            ref = true_gap(params, population, A0, A0, 1)  # 0, sanity anchor
            assert ref == 0
            gap = true_gap(params, population, A1, A0, 1)
            ctr_ref = sum(true_ctr(params, q, A0, 1) for q in population) / len(population)
            oracle_betas.append(abs(gap) / ctr_ref)

        assert oracle_betas == sorted(oracle_betas)
        result = percentile_bins(events, n_bins=4, seed=3, resamples=50)
        betas = [b.estimate.beta for b in result.bins]
        assert betas == sorted(betas)
        for measured, oracle in zip(betas, oracle_betas):
            assert measured == pytest.approx(oracle, abs=0.05)

    def test_too_many_bins(self):
        events = _binned_events([0.4, 0.3])  # two distinct candidate counts
        with pytest.raises(InvalidArgumentError):
            percentile_bins(events, n_bins=3, seed=1)

    def test_missing_key_coverage(self):
        events = make_clicks(A0, [1] * 50) + [
            make_event(event_id=f"m{i}", candidate_count=None) for i in range(20)
        ]
        with pytest.raises(InvalidArgumentError, match="90%"):
            percentile_bins(events, n_bins=1, seed=1)


class TestClickShareTable:
    def test_shares_sum_to_one(self):
        events = (
            make_clicks(A0, [1] * 5 + [2] * 3 + [None] * 2)
            + [
                make_event(
                    event_id="box-click",
                    element_kind=ElementKind.SHOPPING_BOX,
                    original_rank=None,
                    displayed_rank=None,
                    box_present=True,
                )
            ]
        )
        table = click_share_table(events, A0)
        assert abs(sum(table.values()) - 1.0) <= 1e-9
        assert table["c1"] == pytest.approx(5 / 11)
        assert table["Ad"] == pytest.approx(2 / 11)
        assert table["ShoppingBox"] == pytest.approx(1 / 11)

    def test_empty_group(self):
        with pytest.raises(EmptyGroupError):
            click_share_table([], A0)
