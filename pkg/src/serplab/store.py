"""Append-only persistent event store.

File format: a sequence of records, each a 4-byte big-endian length
followed by that many bytes of UTF-8 JSON - the canonical event object
extended with two service-side keys, receivedAt (UTC ms) and
sourceAddrHash (used for rate limiting, never exported). Writes go
through a single lock; a partial record at the tail (crash mid-write) is
discarded on open.
"""

from __future__ import annotations

import json
import os
import struct
import threading
from pathlib import Path
from typing import Any, Iterable

_LEN = struct.Struct(">I")
_FSYNC_EVERY = 64

SERVICE_FIELDS = ("receivedAt", "sourceAddrHash")


class EventStore:
    """Single-writer append log of stored events, indexed by eventId."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.lock = threading.RLock()
        self._records: list[dict[str, Any]] = []
        self._ids: set[str] = set()
        self._writes_since_sync = 0
        self._load()
        self._fh = open(self.path, "ab")

    def _load(self) -> None:
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()
            return
        good_end = 0
        with open(self.path, "rb") as fh:
            data = fh.read()
        offset = 0
        while offset + _LEN.size <= len(data):
            (length,) = _LEN.unpack_from(data, offset)
            end = offset + _LEN.size + length
            if end > len(data):
                break
            try:
                record = json.loads(data[offset + _LEN.size : end])
            except json.JSONDecodeError:
                break
            self._records.append(record)
            self._ids.add(record["eventId"])
            offset = end
            good_end = end
        if good_end != len(data):
            with open(self.path, "r+b") as fh:
                fh.truncate(good_end)

    def append(self, record: dict[str, Any]) -> None:
        """Durably append one record; caller must hold the lock when the
        append needs to be atomic with a contains() check."""
        payload = json.dumps(record, separators=(",", ":")).encode("utf-8")
        with self.lock:
            self._fh.write(_LEN.pack(len(payload)))
            self._fh.write(payload)
            self._fh.flush()
            self._writes_since_sync += 1
            if self._writes_since_sync >= _FSYNC_EVERY:
                os.fsync(self._fh.fileno())
                self._writes_since_sync = 0
            self._records.append(record)
            self._ids.add(record["eventId"])

    def contains(self, event_id: str) -> bool:
        with self.lock:
            return event_id in self._ids

    def count(self) -> int:
        with self.lock:
            return len(self._records)

    def last_received(self) -> int | None:
        with self.lock:
            if not self._records:
                return None
            return self._records[-1].get("receivedAt")

    def records_between(self, since_ms: int, until_ms: int | None) -> list[dict[str, Any]]:
        """Records with receivedAt in [since, until), in arrival order."""
        with self.lock:
            snapshot = list(self._records)
        return [
            r
            for r in snapshot
            if r.get("receivedAt", 0) >= since_ms
            and (until_ms is None or r.get("receivedAt", 0) < until_ms)
        ]

    def sync(self) -> None:
        with self.lock:
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._writes_since_sync = 0

    def close(self) -> None:
        with self.lock:
            if not self._fh.closed:
                self._fh.flush()
                os.fsync(self._fh.fileno())
                self._fh.close()


def strip_service_fields(record: dict[str, Any]) -> dict[str, Any]:
    """Reduce a stored record to the canonical event object."""
    return {k: v for k, v in record.items() if k not in SERVICE_FIELDS}


def to_jsonl(records: Iterable[dict[str, Any]]) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)
