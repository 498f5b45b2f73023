from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from serplab.arrangements import apply, hide_kinds, swap_generic
from serplab.errors import InvalidArgumentError
from serplab.model import ArrangementId, Column, ElementKind, generic_rank

from conftest import main_ids, make_snapshot


class TestSwapGeneric:
    def test_swap_first_two(self):
        result = swap_generic(make_snapshot(["g", "g", "g"]), 1, 2)
        assert result.applied
        assert main_ids(result.snapshot) == ["g2", "g1", "g3"]

    def test_degenerate_page_passes_through(self):
        snap = make_snapshot(["g"])
        result = swap_generic(snap, 1, 2)
        assert not result.applied
        assert result.reason == "insufficient results"
        assert result.snapshot == snap

    def test_ad_slot_untouched(self):
        result = swap_generic(make_snapshot(["g", "ad", "g", "g"]), 1, 3)
        assert main_ids(result.snapshot) == ["g3", "ad1", "g2", "g1"]

    def test_equal_ranks_rejected(self):
        with pytest.raises(InvalidArgumentError):
            swap_generic(make_snapshot(["g", "g"]), 2, 2)

    def test_nonpositive_ranks_rejected(self):
        with pytest.raises(InvalidArgumentError):
            swap_generic(make_snapshot(["g", "g"]), 0, 1)


class TestHideKinds:
    def test_hide_top_ads_and_box(self):
        result = hide_kinds(
            make_snapshot(["ad", "box", "g", "g"]),
            {ElementKind.AD, ElementKind.SHOPPING_BOX},
            top_only=True,
        )
        assert result.applied
        assert main_ids(result.snapshot) == ["g1", "g2"]
        assert [el.slot.index for el in result.snapshot.elements] == [0, 1]

    def test_nothing_to_hide(self):
        snap = make_snapshot(["g", "g"])
        result = hide_kinds(snap, {ElementKind.SHOPPING_BOX})
        assert not result.applied
        assert result.snapshot == snap

    def test_top_only_spares_ads_below_first_result(self):
        # Enumerate the ad position against the top-only rule: only ads
        # strictly above the first generic result are removed.
        for ad_pos in range(4):
            codes = ["g", "g", "g"]
            codes.insert(ad_pos, "ad")
            snap = make_snapshot(codes)
            result = hide_kinds(snap, {ElementKind.AD}, top_only=True)
            if ad_pos == 0:
                assert result.applied
                assert main_ids(result.snapshot) == ["g1", "g2", "g3"]
            else:
                assert not result.applied
                assert result.snapshot == snap

    def test_top_only_spares_sidebar_ads(self):
        snap = make_snapshot(["g", "g"], sidebar=["ad"])
        assert not hide_kinds(snap, {ElementKind.AD}, top_only=True).applied

    def test_all_main_ads_are_top_when_no_generics(self):
        snap = make_snapshot(["ad", "ad"])
        result = hide_kinds(snap, {ElementKind.AD}, top_only=True)
        assert result.applied
        assert result.snapshot.elements == ()

    def test_box_hidden_from_either_column(self):
        snap = make_snapshot(["g", "g"], sidebar=["box"])
        result = hide_kinds(snap, {ElementKind.SHOPPING_BOX})
        assert result.applied
        assert all(el.kind is not ElementKind.SHOPPING_BOX for el in result.snapshot.elements)

    def test_generic_results_never_hideable(self):
        with pytest.raises(InvalidArgumentError):
            hide_kinds(make_snapshot(["g"]), {ElementKind.GENERIC_RESULT})


class TestApply:
    def test_control_is_identity(self):
        snap = make_snapshot(["ad", "g", "g"])
        result = apply(ArrangementId.A0, snap)
        assert result.applied
        assert result.snapshot == snap

    def test_hide_then_swap(self):
        result = apply(ArrangementId.A5, make_snapshot(["ad", "box", "g", "g", "g"]))
        assert result.applied
        assert main_ids(result.snapshot) == ["g2", "g1", "g3"]

    def test_swap_one_three(self):
        result = apply(ArrangementId.A2, make_snapshot(["g", "g", "g", "g"]))
        assert main_ids(result.snapshot) == ["g3", "g2", "g1", "g4"]

    def test_swap_two_three(self):
        result = apply(ArrangementId.A3, make_snapshot(["g", "g", "g"]))
        assert main_ids(result.snapshot) == ["g1", "g3", "g2"]

    def test_hide_box_only(self):
        result = apply(ArrangementId.A6, make_snapshot(["ad", "box", "g", "g"]))
        assert main_ids(result.snapshot) == ["ad1", "g1", "g2"]

    def test_a4_keeps_bottom_ads(self):
        result = apply(ArrangementId.A4, make_snapshot(["ad", "g", "g", "ad"]))
        assert main_ids(result.snapshot) == ["g1", "g2", "ad2"]

    def test_a5_on_degenerate_page_still_hides(self):
        result = apply(ArrangementId.A5, make_snapshot(["ad", "g"]))
        assert result.applied  # the hide stage did something
        assert main_ids(result.snapshot) == ["g1"]

    def test_a5_fully_degenerate(self):
        snap = make_snapshot(["g"])
        result = apply(ArrangementId.A5, snap)
        assert not result.applied
        assert result.snapshot == snap


# --- properties over random snapshots ---

MAIN_CODES = ["g", "ad", "box", "ssr", "other"]

snapshots = st.builds(
    make_snapshot,
    main=st.lists(st.sampled_from(MAIN_CODES), max_size=10),
    sidebar=st.lists(st.sampled_from(["box", "ad", "other"]), max_size=2),
)


def element_multiset(snapshot):
    return Counter((el.element_id, el.kind) for el in snapshot.elements)


@settings(max_examples=300)
@given(snapshots, st.sampled_from(list(ArrangementId)))
def test_never_adds_elements(snap, arrangement):
    out = apply(arrangement, snap).snapshot
    in_ids = {el.element_id for el in snap.elements}
    assert {el.element_id for el in out.elements} <= in_ids


@settings(max_examples=300)
@given(snapshots, st.sampled_from([ArrangementId.A1, ArrangementId.A2, ArrangementId.A3]))
def test_swaps_preserve_multiset(snap, arrangement):
    out = apply(arrangement, snap).snapshot
    assert element_multiset(out) == element_multiset(snap)


@settings(max_examples=300)
@given(snapshots, st.sampled_from([ArrangementId.A4, ArrangementId.A5, ArrangementId.A6]))
def test_hides_keep_all_generics(snap, arrangement):
    out = apply(arrangement, snap).snapshot
    assert [el.element_id for el in out.generic_results()] == [
        el.element_id for el in snap.generic_results()
    ] or arrangement is ArrangementId.A5  # a5 may also reorder generics
    assert Counter(el.element_id for el in out.generic_results()) == Counter(
        el.element_id for el in snap.generic_results()
    )


@settings(max_examples=300)
@given(snapshots, st.integers(1, 4), st.integers(1, 4))
def test_swap_is_involution(snap, i, j):
    if i == j:
        return
    once = swap_generic(snap, i, j)
    if once.applied:
        assert swap_generic(once.snapshot, i, j).snapshot == snap
    else:
        assert once.snapshot == snap


@settings(max_examples=300)
@given(snapshots, st.sampled_from([ArrangementId.A1, ArrangementId.A2, ArrangementId.A3]))
def test_unswapped_ranks_unchanged(snap, arrangement):
    swapped_ranks = {
        ArrangementId.A1: {1, 2},
        ArrangementId.A2: {1, 3},
        ArrangementId.A3: {2, 3},
    }[arrangement]
    out = apply(arrangement, snap).snapshot
    for el in snap.generic_results():
        before = generic_rank(snap, el.element_id)
        if before not in swapped_ranks:
            assert generic_rank(out, el.element_id) == before


@settings(max_examples=300)
@given(snapshots, st.sampled_from(list(ArrangementId)))
def test_output_slots_stay_contiguous(snap, arrangement):
    from serplab.model import validate_snapshot

    out = apply(arrangement, snap).snapshot
    assert validate_snapshot(out) == []
