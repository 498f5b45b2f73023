"""Event-log preprocessing before estimation.

Two filters, each counted separately in the drop report: a per-user
burn-in window (default four days from the user's first recorded event,
to let participation awareness wear off) and removal of unclassifiable
clicks - generic-result clicks whose ranks could not be identified.
Dropping the latter from every group avoids a selection bias toward the
control group, where classification never fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidArgumentError
from .model import ClickEvent, ElementKind

MS_PER_DAY = 86_400_000


@dataclass(frozen=True)
class PreprocessConfig:
    burn_in_days: int = 4
    drop_invalid_classification: bool = True

    def __post_init__(self) -> None:
        if self.burn_in_days < 0:
            raise InvalidArgumentError("burn_in_days must be >= 0")


@dataclass(frozen=True)
class DropReport:
    input_count: int
    kept_count: int
    dropped_burn_in: int
    dropped_unclassifiable: int

    def as_dict(self) -> dict[str, int]:
        return {
            "input": self.input_count,
            "kept": self.kept_count,
            "droppedBurnIn": self.dropped_burn_in,
            "droppedUnclassifiable": self.dropped_unclassifiable,
        }


def _unclassifiable(event: ClickEvent) -> bool:
    return event.element_kind is ElementKind.GENERIC_RESULT and (
        event.original_rank is None or event.displayed_rank is None
    )


def preprocess(
    events: Sequence[ClickEvent], config: PreprocessConfig = PreprocessConfig()
) -> tuple[list[ClickEvent], DropReport]:
    """Apply burn-in and classification filters; kept + dropped = input.

    An event is dropped for at most one (the first applicable) reason.
    The burn-in clock starts at each user's first event in the input,
    whatever its classification state.
    """
    first_seen: dict[str, int] = {}
    for event in events:
        prior = first_seen.get(event.user_id)
        if prior is None or event.timestamp < prior:
            first_seen[event.user_id] = event.timestamp

    burn_in_ms = config.burn_in_days * MS_PER_DAY
    kept: list[ClickEvent] = []
    dropped_burn_in = 0
    dropped_unclassifiable = 0
    for event in events:
        if event.timestamp < first_seen[event.user_id] + burn_in_ms:
            dropped_burn_in += 1
            continue
        if config.drop_invalid_classification and _unclassifiable(event):
            dropped_unclassifiable += 1
            continue
        kept.append(event)

    report = DropReport(
        input_count=len(events),
        kept_count=len(kept),
        dropped_burn_in=dropped_burn_in,
        dropped_unclassifiable=dropped_unclassifiable,
    )
    return kept, report
