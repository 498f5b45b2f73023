#!/usr/bin/env python3
"""Regenerate tests/fixtures/paper_aggregates.jsonl.

The log holds 500 clicks per rerank group with exact per-rank counts, so
the headline estimates come out at fixed values:

  a1 vs a0 @ c1:  0.43 -> 0.24   gap -0.19, beta 0.19/0.43 = 0.4419
  a2 vs a0 @ c1:  0.43 -> 0.16   gap -0.27
  a3 vs a0 @ c2:  0.20 -> 0.122  gap -0.078, beta 0.39

Deterministic output; run from the repo root.
"""

from pathlib import Path

from serplab.model import ArrangementId, ClickEvent, ElementKind, Engine, write_events_jsonl

# rank -> click count per group; each group sums to 500
RANK_COUNTS = {
    ArrangementId.A0: {1: 215, 2: 100, 3: 70, 4: 50, 5: 35, 6: 30},
    ArrangementId.A1: {1: 120, 2: 170, 3: 80, 4: 55, 5: 40, 6: 35},
    ArrangementId.A2: {1: 80, 2: 105, 3: 150, 4: 70, 5: 50, 6: 45},
    ArrangementId.A3: {1: 215, 2: 61, 3: 120, 4: 45, 5: 35, 6: 24},
}

SWAPS = {
    ArrangementId.A0: {},
    ArrangementId.A1: {1: 2, 2: 1},
    ArrangementId.A2: {1: 3, 3: 1},
    ArrangementId.A3: {2: 3, 3: 2},
}

START_TS = 1_694_000_000_000
N_USERS = 20


def build_events() -> list[ClickEvent]:
    events = []
    serial = 0
    for group, counts in RANK_COUNTS.items():
        for rank, count in counts.items():
            for _ in range(count):
                displayed = SWAPS[group].get(rank, rank)
                events.append(
                    ClickEvent(
                        event_id=f"fx{serial:05d}",
                        user_id=f"u{serial % N_USERS:03d}",
                        timestamp=START_TS + serial * 60_000,
                        engine=Engine.GOOGLE,
                        group=group,
                        element_kind=ElementKind.GENERIC_RESULT,
                        page_index=0,
                        num_results=8,
                        ads_present=False,
                        box_present=False,
                        ssr_positions=(),
                        original_rank=rank,
                        displayed_rank=displayed,
                        candidate_count=1_000_000 + serial,
                    )
                )
                serial += 1
    return events


if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "paper_aggregates.jsonl"
    n = write_events_jsonl(build_events(), out)
    print(f"wrote {n} events to {out}")
