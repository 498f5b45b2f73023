"""Shared builders for snapshots and events, plus a live-server helper."""

from __future__ import annotations

import threading
import time
from contextlib import contextmanager
from pathlib import Path

import pytest
import uvicorn

from serplab.model import (
    ArrangementId,
    ClickEvent,
    Column,
    ElementKind,
    Engine,
    SerpElement,
    SerpSnapshot,
    Slot,
)
from serplab.service import ServiceConfig, create_app

FIXTURES = Path(__file__).parent / "fixtures"

KIND_CODES = {
    "g": ElementKind.GENERIC_RESULT,
    "ad": ElementKind.AD,
    "box": ElementKind.SHOPPING_BOX,
    "ssr": ElementKind.SPECIALIZED_RESULT,
    "other": ElementKind.OTHER,
}


def make_snapshot(
    main,
    sidebar=(),
    engine=Engine.GOOGLE,
    page_index=0,
    candidate_count=None,
) -> SerpSnapshot:
    """Build a snapshot from kind codes, e.g. main=["ad", "g", "g"].

    Elements are named per kind in order of appearance: g1, g2, ad1, ...
    """
    counters: dict[str, int] = {}
    elements: list[SerpElement] = []
    for column, codes in ((Column.MAIN, main), (Column.SIDEBAR, sidebar)):
        for index, code in enumerate(codes):
            counters[code] = counters.get(code, 0) + 1
            elements.append(
                SerpElement(f"{code}{counters[code]}", KIND_CODES[code], Slot(column, index))
            )
    return SerpSnapshot(engine, page_index, tuple(elements), candidate_count)


def main_ids(snapshot: SerpSnapshot) -> list[str]:
    return [el.element_id for el in snapshot.column(Column.MAIN)]


def make_event(**overrides) -> ClickEvent:
    defaults = dict(
        event_id="e1",
        user_id="u1",
        timestamp=1_700_000_000_000,
        engine=Engine.GOOGLE,
        group=ArrangementId.A0,
        element_kind=ElementKind.GENERIC_RESULT,
        page_index=0,
        num_results=10,
        ads_present=False,
        box_present=False,
        ssr_positions=(),
        original_rank=1,
        displayed_rank=1,
    )
    defaults.update(overrides)
    return ClickEvent(**defaults)


def make_clicks(group: ArrangementId, ranks, *, start_id: int = 0, **overrides) -> list[ClickEvent]:
    """One generic click per rank in `ranks` (None means an ad click)."""
    events = []
    for offset, rank in enumerate(ranks):
        fields = dict(
            event_id=f"{group.value}-{start_id + offset}",
            group=group,
            original_rank=rank,
            displayed_rank=rank,
        )
        if rank is None:
            fields["element_kind"] = ElementKind.AD
            fields["displayed_rank"] = None
            fields["ads_present"] = True
        fields.update(overrides)
        events.append(make_event(**fields))
    return events


@pytest.fixture
def paper_fixture_events():
    from serplab.model import read_events_jsonl

    return read_events_jsonl(FIXTURES / "paper_aggregates.jsonl")


@contextmanager
def live_service(store_path, *, api_key="sekrit", rate_per_sec=1e6, burst=10**9):
    """Run the ingest service on an ephemeral localhost port."""
    config = ServiceConfig(
        api_read_key=api_key,
        rate_per_sec=rate_per_sec,
        burst=burst,
        store_path=str(store_path),
    )
    app = create_app(config)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    try:
        yield f"http://127.0.0.1:{port}", app.state.store
    finally:
        server.should_exit = True
        thread.join(timeout=10)
        app.state.store.close()
