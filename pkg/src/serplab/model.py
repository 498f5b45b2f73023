"""Data model of search result pages and click events.

A page snapshot is a set of typed elements placed into (column, index)
slots; the generic-result rank of an element is derived from slot order,
never stored. Click events are the flat records every other component
exchanges: one JSON object per event, camelCase keys, line-delimited in
files. The schema is closed - unknown keys are rejected so that nothing
resembling a query string or URL can ever enter a log.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Iterable, Iterator

from .errors import InvalidArgumentError, NotFoundError


class Engine(str, Enum):
    GOOGLE = "google"
    BING = "bing"


class ElementKind(str, Enum):
    GENERIC_RESULT = "GenericResult"
    AD = "Ad"
    SHOPPING_BOX = "ShoppingBox"
    SPECIALIZED_RESULT = "SpecializedResult"
    OTHER = "Other"


class Column(str, Enum):
    MAIN = "Main"
    SIDEBAR = "Sidebar"


class ArrangementId(str, Enum):
    A0 = "a0"  # control: page shown unmodified
    A1 = "a1"  # swap generic results 1 and 2
    A2 = "a2"  # swap generic results 1 and 3
    A3 = "a3"  # swap generic results 2 and 3
    A4 = "a4"  # hide top ads and shopping boxes
    A5 = "a5"  # a4, then swap 1 and 2
    A6 = "a6"  # hide shopping boxes only


GOOGLE_ARRANGEMENTS: tuple[ArrangementId, ...] = tuple(ArrangementId)
BING_ARRANGEMENTS: tuple[ArrangementId, ...] = (ArrangementId.A0, ArrangementId.A1)


def arrangements_for(engine: Engine) -> tuple[ArrangementId, ...]:
    """Treatment groups that may run on the given engine."""
    return BING_ARRANGEMENTS if engine is Engine.BING else GOOGLE_ARRANGEMENTS


@dataclass(frozen=True)
class Slot:
    """Position of an element: a column and a 0-based top-to-bottom index."""

    column: Column
    index: int


@dataclass(frozen=True)
class SerpElement:
    element_id: str
    kind: ElementKind
    slot: Slot


@dataclass(frozen=True)
class SerpSnapshot:
    """One search result page, before or after an arrangement is applied."""

    engine: Engine
    page_index: int
    elements: tuple[SerpElement, ...]
    candidate_count: int | None = None

    def column(self, column: Column) -> list[SerpElement]:
        """Elements of one column in top-to-bottom slot order."""
        return sorted(
            (el for el in self.elements if el.slot.column is column),
            key=lambda el: el.slot.index,
        )

    def generic_results(self) -> list[SerpElement]:
        """Main-column generic results in rank order (rank = list index + 1)."""
        return [
            el
            for el in self.column(Column.MAIN)
            if el.kind is ElementKind.GENERIC_RESULT
        ]

    @property
    def num_results(self) -> int:
        return len(self.generic_results())

    def find(self, element_id: str) -> SerpElement | None:
        for el in self.elements:
            if el.element_id == element_id:
                return el
        return None

    def with_elements(self, elements: Iterable[SerpElement]) -> "SerpSnapshot":
        return replace(self, elements=tuple(elements))


def generic_rank(snapshot: SerpSnapshot, element_id: str) -> int | None:
    """1-based rank of an element among Main-column generic results.

    Ads, boxes, sidebar content and specialized results carry no rank and
    yield None. Unknown ids raise NotFoundError.
    """
    el = snapshot.find(element_id)
    if el is None:
        raise NotFoundError(f"no element {element_id!r} in snapshot")
    if el.kind is not ElementKind.GENERIC_RESULT or el.slot.column is not Column.MAIN:
        return None
    for rank, candidate in enumerate(snapshot.generic_results(), start=1):
        if candidate.element_id == element_id:
            return rank
    return None


def validate_snapshot(snapshot: SerpSnapshot) -> list[str]:
    """Check snapshot invariants, returning violations as strings.

    An empty list means the snapshot is well formed. Pure: never raises
    for content problems.
    """
    violations: list[str] = []
    seen_ids: set[str] = set()
    for el in snapshot.elements:
        if el.element_id in seen_ids:
            violations.append(f"duplicate id: {el.element_id}")
        seen_ids.add(el.element_id)
        if el.slot.index < 0:
            violations.append(f"negative slot index: {el.element_id}")
    for column in Column:
        indices = sorted(
            el.slot.index for el in snapshot.elements if el.slot.column is column
        )
        if len(set(indices)) != len(indices):
            violations.append(f"duplicate slot: {column.value}")
        elif indices and indices != list(range(len(indices))):
            violations.append(f"slot gap: {column.value}")
    if snapshot.page_index < 0:
        violations.append("negative page index")
    if snapshot.candidate_count is not None and snapshot.candidate_count < 0:
        violations.append("negative candidate count")
    return violations


_RESULTS_COUNT_RE = re.compile(
    r"([0-9][0-9'’.,   ]*)\s*results?\b", re.IGNORECASE
)


def parse_candidate_count(text: str | None) -> int | None:
    """Extract the candidate-result count from the page's results string.

    Accepts locale-formatted strings such as "About 323'000'000 results
    (0.65 seconds)" with apostrophes, commas, dots or spaces as grouping
    separators. Anything unparseable yields None, never an error.
    """
    if not text:
        return None
    match = _RESULTS_COUNT_RE.search(text)
    if match is None:
        return None
    digits = re.sub(r"[^0-9]", "", match.group(1))
    return int(digits) if digits else None


@dataclass(frozen=True, slots=True)
class ClickEvent:
    """One recorded click. This is the canonical wire/storage record.

    Rank semantics: original_rank is the clicked element's generic rank on
    the untreated page (its c_i identity); displayed_rank is the rank the
    user actually saw after treatment. Both are present exactly when the
    clicked element is a generic result. Page metadata (ads_present,
    box_present, ssr_positions, ...) always describes the untreated page.

    ssr_positions counts, for each Main-column specialized result, how many
    generic results sit above it - value 1 means the element sat strictly
    between the first and second generic result.
    """

    event_id: str
    user_id: str
    timestamp: int  # UTC milliseconds
    engine: Engine
    group: ArrangementId
    element_kind: ElementKind
    page_index: int
    num_results: int
    ads_present: bool
    box_present: bool
    ssr_positions: tuple[int, ...] = ()
    original_rank: int | None = None
    displayed_rank: int | None = None
    box_column: Column | None = None
    candidate_count: int | None = None


# Canonical wire field order. Field names are part of the cross-component
# contract; aliases are never accepted.
_WIRE_FIELDS = (
    "eventId",
    "userId",
    "timestamp",
    "engine",
    "group",
    "originalRank",
    "displayedRank",
    "elementKind",
    "pageIndex",
    "numResults",
    "adsPresent",
    "boxPresent",
    "boxColumn",
    "ssrPositions",
    "candidateCount",
)

_REQUIRED_FIELDS = (
    "eventId",
    "userId",
    "timestamp",
    "engine",
    "group",
    "elementKind",
    "pageIndex",
    "numResults",
    "adsPresent",
    "boxPresent",
    "ssrPositions",
)

_ENGINE_VALUES = {e.value for e in Engine}
_KIND_VALUES = {k.value for k in ElementKind}
_COLUMN_VALUES = {c.value for c in Column}


def event_to_json(event: ClickEvent) -> dict[str, Any]:
    """Canonical JSON object for an event; absent optionals are omitted."""
    obj: dict[str, Any] = {
        "eventId": event.event_id,
        "userId": event.user_id,
        "timestamp": event.timestamp,
        "engine": event.engine.value,
        "group": event.group.value,
        "elementKind": event.element_kind.value,
        "pageIndex": event.page_index,
        "numResults": event.num_results,
        "adsPresent": event.ads_present,
        "boxPresent": event.box_present,
        "ssrPositions": list(event.ssr_positions),
    }
    if event.original_rank is not None:
        obj["originalRank"] = event.original_rank
    if event.displayed_rank is not None:
        obj["displayedRank"] = event.displayed_rank
    if event.box_column is not None:
        obj["boxColumn"] = event.box_column.value
    if event.candidate_count is not None:
        obj["candidateCount"] = event.candidate_count
    return {k: obj[k] for k in _WIRE_FIELDS if k in obj}


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_event_json(obj: Any, *, strict_ranks: bool = True) -> list[str]:
    """Validate a decoded JSON object against the event schema.

    Returns machine-readable violations (empty list = valid). The schema
    is closed: any key outside the canonical field set is a violation, so
    query text or URLs can never ride along. With strict_ranks=False a
    generic click may lack its ranks - the lenient mode used when reading
    raw logs whose unclassifiable events are dropped later.
    """
    if not isinstance(obj, dict):
        return ["event must be a JSON object"]
    violations = [f"forbidden field: {k}" for k in obj if k not in _WIRE_FIELDS]
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            violations.append(f"missing field: {name}")
    if violations:
        return violations

    for name in ("eventId", "userId"):
        if not isinstance(obj[name], str) or not obj[name]:
            violations.append(f"{name} must be a non-empty string")
    if not _is_int(obj["timestamp"]) or obj["timestamp"] < 0:
        violations.append("timestamp must be a non-negative integer (UTC ms)")
    for name in ("pageIndex", "numResults"):
        if not _is_int(obj[name]) or obj[name] < 0:
            violations.append(f"{name} must be a non-negative integer")
    for name in ("adsPresent", "boxPresent"):
        if not isinstance(obj[name], bool):
            violations.append(f"{name} must be a boolean")
    if obj["engine"] not in _ENGINE_VALUES:
        violations.append(f"engine must be one of {sorted(_ENGINE_VALUES)}")
    if obj["elementKind"] not in _KIND_VALUES:
        violations.append(f"elementKind must be one of {sorted(_KIND_VALUES)}")
    if not isinstance(obj["ssrPositions"], list) or any(
        not _is_int(v) or v < 0 for v in obj["ssrPositions"]
    ):
        violations.append("ssrPositions must be a list of non-negative integers")
    if violations:
        return violations

    engine = Engine(obj["engine"])
    if obj["group"] not in {a.value for a in arrangements_for(engine)}:
        violations.append(f"group {obj['group']!r} not valid for engine {engine.value}")

    for name in ("originalRank", "displayedRank"):
        if name in obj and (not _is_int(obj[name]) or obj[name] < 1):
            violations.append(f"{name} must be a positive integer")
    if "boxColumn" in obj and obj["boxColumn"] not in _COLUMN_VALUES:
        violations.append(f"boxColumn must be one of {sorted(_COLUMN_VALUES)}")
    if "candidateCount" in obj and (not _is_int(obj["candidateCount"]) or obj["candidateCount"] < 0):
        violations.append("candidateCount must be a non-negative integer")
    if violations:
        return violations

    is_generic = obj["elementKind"] == ElementKind.GENERIC_RESULT.value
    if is_generic:
        for name in ("originalRank", "displayedRank"):
            if name not in obj:
                if strict_ranks:
                    violations.append(f"{name} required for a generic-result click")
            elif obj[name] > obj["numResults"]:
                violations.append(f"{name} exceeds numResults")
    else:
        for name in ("originalRank", "displayedRank"):
            if name in obj:
                violations.append(f"{name} not allowed for {obj['elementKind']} clicks")
    return violations


def event_from_json(obj: Any, *, strict_ranks: bool = True) -> ClickEvent:
    """Parse a decoded JSON object into a ClickEvent, enforcing the schema."""
    violations = validate_event_json(obj, strict_ranks=strict_ranks)
    if violations:
        raise InvalidArgumentError("; ".join(violations))
    return ClickEvent(
        event_id=obj["eventId"],
        user_id=obj["userId"],
        timestamp=obj["timestamp"],
        engine=Engine(obj["engine"]),
        group=ArrangementId(obj["group"]),
        element_kind=ElementKind(obj["elementKind"]),
        page_index=obj["pageIndex"],
        num_results=obj["numResults"],
        ads_present=obj["adsPresent"],
        box_present=obj["boxPresent"],
        ssr_positions=tuple(obj["ssrPositions"]),
        original_rank=obj.get("originalRank"),
        displayed_rank=obj.get("displayedRank"),
        box_column=Column(obj["boxColumn"]) if "boxColumn" in obj else None,
        candidate_count=obj.get("candidateCount"),
    )


def event_to_line(event: ClickEvent) -> str:
    return json.dumps(event_to_json(event), separators=(",", ":"))


def write_events_jsonl(events: Iterable[ClickEvent], path) -> int:
    """Write events as line-delimited JSON; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(event_to_line(event))
            fh.write("\n")
            count += 1
    return count


def iter_events_jsonl(path, *, strict_ranks: bool = True) -> Iterator[ClickEvent]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                yield event_from_json(obj, strict_ranks=strict_ranks)
            except InvalidArgumentError as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: {exc}") from exc


def read_events_jsonl(path, *, strict_ranks: bool = True) -> list[ClickEvent]:
    return list(iter_events_jsonl(path, strict_ranks=strict_ranks))


def snapshot_to_json(snapshot: SerpSnapshot) -> dict[str, Any]:
    obj: dict[str, Any] = {
        "engine": snapshot.engine.value,
        "pageIndex": snapshot.page_index,
        "elements": [
            {
                "elementId": el.element_id,
                "kind": el.kind.value,
                "column": el.slot.column.value,
                "index": el.slot.index,
            }
            for el in snapshot.elements
        ],
    }
    if snapshot.candidate_count is not None:
        obj["candidateCount"] = snapshot.candidate_count
    return obj


def snapshot_from_json(obj: Any) -> SerpSnapshot:
    try:
        elements = tuple(
            SerpElement(
                element_id=e["elementId"],
                kind=ElementKind(e["kind"]),
                slot=Slot(Column(e["column"]), int(e["index"])),
            )
            for e in obj["elements"]
        )
        return SerpSnapshot(
            engine=Engine(obj["engine"]),
            page_index=int(obj["pageIndex"]),
            elements=elements,
            candidate_count=obj.get("candidateCount"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed snapshot JSON: {exc}") from exc
