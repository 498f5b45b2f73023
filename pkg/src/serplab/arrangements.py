"""Counterfactual arrangement transforms.

This module is the single source of truth for what each treatment does to
a page: a0 identity, a1/a2/a3 rank swaps, a4 hide top ads and boxes,
a5 hide-then-swap, a6 hide boxes. Transforms only reorder or remove
elements, never add or rewrite content. Pages too short for a swap pass
through unchanged (applied=False) - events from such pages still belong
to their assigned group, which keeps the analysis intent-to-treat.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .errors import InvalidArgumentError
from .model import ArrangementId, Column, ElementKind, SerpElement, SerpSnapshot

_HIDEABLE = frozenset({ElementKind.AD, ElementKind.SHOPPING_BOX})


@dataclass(frozen=True)
class ApplyResult:
    """Outcome of a transform; applied=False implies snapshot is the input."""

    snapshot: SerpSnapshot
    applied: bool
    reason: str | None = None


def swap_generic(snapshot: SerpSnapshot, i: int, j: int) -> ApplyResult:
    """Exchange the slots of the i-th and j-th generic results (1-based).

    All other elements keep their slots. If either rank does not exist on
    the page, the snapshot passes through unchanged.
    """
    if i == j:
        raise InvalidArgumentError("swap ranks must differ")
    if i < 1 or j < 1:
        raise InvalidArgumentError("swap ranks are 1-based")
    generics = snapshot.generic_results()
    if max(i, j) > len(generics):
        return ApplyResult(snapshot, applied=False, reason="insufficient results")
    first, second = generics[i - 1], generics[j - 1]

    def move(el: SerpElement) -> SerpElement:
        if el.element_id == first.element_id:
            return replace(el, slot=second.slot)
        if el.element_id == second.element_id:
            return replace(el, slot=first.slot)
        return el

    return ApplyResult(snapshot.with_elements(move(el) for el in snapshot.elements), True)


def hide_kinds(
    snapshot: SerpSnapshot,
    kinds: Iterable[ElementKind],
    top_only: bool = False,
) -> ApplyResult:
    """Remove ads and/or shopping boxes from the page.

    With top_only, only Main-column ads above the first generic result are
    removed (a page with no generic results counts all its Main ads as
    top); shopping boxes are removed from either column regardless.
    Surviving slot indices are re-compacted so each column stays
    contiguous. Generic results are never hideable.
    """
    kinds = frozenset(kinds)
    forbidden = kinds - _HIDEABLE
    if forbidden:
        names = ", ".join(sorted(k.value for k in forbidden))
        raise InvalidArgumentError(f"cannot hide element kind(s): {names}")

    generics = snapshot.generic_results()
    first_generic_index = generics[0].slot.index if generics else None

    def doomed(el: SerpElement) -> bool:
        if el.kind is ElementKind.SHOPPING_BOX:
            return ElementKind.SHOPPING_BOX in kinds
        if el.kind is ElementKind.AD and ElementKind.AD in kinds:
            if not top_only:
                return True
            return el.slot.column is Column.MAIN and (
                first_generic_index is None or el.slot.index < first_generic_index
            )
        return False

    survivors = [el for el in snapshot.elements if not doomed(el)]
    if len(survivors) == len(snapshot.elements):
        return ApplyResult(snapshot, applied=False, reason="nothing to hide")

    new_index: dict[tuple[Column, int], int] = {}
    for column in Column:
        kept = sorted(el.slot.index for el in survivors if el.slot.column is column)
        for compacted, old in enumerate(kept):
            new_index[(column, old)] = compacted
    recompacted = (
        replace(el, slot=replace(el.slot, index=new_index[(el.slot.column, el.slot.index)]))
        for el in survivors
    )
    return ApplyResult(snapshot.with_elements(recompacted), True)


def apply(arrangement: ArrangementId, snapshot: SerpSnapshot) -> ApplyResult:
    """Apply one of the experiment's arrangements to a snapshot."""
    if arrangement is ArrangementId.A0:
        return ApplyResult(snapshot, applied=True)
    if arrangement is ArrangementId.A1:
        return swap_generic(snapshot, 1, 2)
    if arrangement is ArrangementId.A2:
        return swap_generic(snapshot, 1, 3)
    if arrangement is ArrangementId.A3:
        return swap_generic(snapshot, 2, 3)
    if arrangement is ArrangementId.A4:
        return hide_kinds(snapshot, _HIDEABLE, top_only=True)
    if arrangement is ArrangementId.A5:
        # Fixed composition order: hide first, then swap on the compacted page.
        hidden = hide_kinds(snapshot, _HIDEABLE, top_only=True)
        swapped = swap_generic(hidden.snapshot, 1, 2)
        applied = hidden.applied or swapped.applied
        reason = None
        if not applied:
            reason = "; ".join(r for r in (hidden.reason, swapped.reason) if r) or None
        return ApplyResult(swapped.snapshot, applied, reason)
    if arrangement is ArrangementId.A6:
        return hide_kinds(snapshot, {ElementKind.SHOPPING_BOX})
    raise InvalidArgumentError(f"unknown arrangement {arrangement!r}")
