"""Click-event ingestion service.

HTTP/1.1 surface:
  POST /v1/events            one canonical event JSON per request -> 202
  GET  /v1/events?since&until  line-delimited events, X-Api-Key protected
  GET  /healthz              event count and last write time, no key

Invalid or schema-violating events get 400 with a violation list;
per-source token-bucket rate limiting answers 429 before anything is
written; duplicate eventIds are acknowledged without a second write.
The service speaks plain HTTP - TLS is a fronting proxy's job.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .assignment import fnv1a64
from .config import get_float, get_int, load_kv
from .errors import InvalidConfigError
from .model import validate_event_json
from .store import EventStore, strip_service_fields, to_jsonl


@dataclass(frozen=True)
class ServiceConfig:
    listen_address: str = "127.0.0.1:8787"
    api_read_key: str = ""
    rate_per_sec: float = 50.0
    burst: int = 100
    store_path: str = "events.store"

    def __post_init__(self) -> None:
        if self.rate_per_sec <= 0:
            raise InvalidConfigError("service rate limit must be > 0")
        if self.burst < 1:
            raise InvalidConfigError("service burst must be >= 1")
        if not self.api_read_key:
            raise InvalidConfigError("service.apiReadKey must be set")

    @classmethod
    def from_config(cls, kv: Mapping[str, str]) -> "ServiceConfig":
        return cls(
            listen_address=kv.get("service.listenAddress", "127.0.0.1:8787"),
            api_read_key=kv.get("service.apiReadKey", ""),
            rate_per_sec=get_float(kv, "service.rateLimitPerSec", 50.0),
            burst=get_int(kv, "service.rateLimitBurst", 100),
            store_path=kv.get("service.storePath", "events.store"),
        )

    @property
    def host(self) -> str:
        host, _, _ = self.listen_address.rpartition(":")
        return host or "127.0.0.1"

    @property
    def port(self) -> int:
        _, _, port = self.listen_address.rpartition(":")
        try:
            return int(port)
        except ValueError as exc:
            raise InvalidConfigError(f"bad listen address {self.listen_address!r}") from exc


class TokenBucketLimiter:
    """Per-source token bucket; refills rate_per_sec up to burst."""

    def __init__(self, rate_per_sec: float, burst: int, clock=time.monotonic):
        self.rate = rate_per_sec
        self.burst = float(burst)
        self.clock = clock
        self._buckets: dict[int, tuple[float, float]] = {}

    def allow(self, source: int) -> bool:
        now = self.clock()
        tokens, stamp = self._buckets.get(source, (self.burst, now))
        tokens = min(self.burst, tokens + (now - stamp) * self.rate)
        if tokens < 1.0:
            self._buckets[source] = (tokens, now)
            return False
        self._buckets[source] = (tokens - 1.0, now)
        return True


def source_hash(address: str) -> int:
    return fnv1a64(address.encode("utf-8"))


def create_app(config: ServiceConfig, store: EventStore | None = None) -> FastAPI:
    app = FastAPI(title="serplab ingest", docs_url=None, redoc_url=None)
    app.state.store = store if store is not None else EventStore(config.store_path)
    app.state.limiter = TokenBucketLimiter(config.rate_per_sec, config.burst)
    app.state.config = config

    def client_source(request: Request) -> int:
        client = request.client.host if request.client else "unknown"
        return source_hash(client)

    @app.post("/v1/events")
    async def post_event(request: Request):
        if not app.state.limiter.allow(client_source(request)):
            return JSONResponse({"error": "rate limit exceeded"}, status_code=429)
        body = await request.body()
        try:
            obj = json.loads(body)
        except json.JSONDecodeError:
            return JSONResponse({"violations": ["body is not valid JSON"]}, status_code=400)
        violations = validate_event_json(obj)
        if violations:
            return JSONResponse({"violations": violations}, status_code=400)
        record = dict(obj)
        record["receivedAt"] = int(time.time() * 1000)
        record["sourceAddrHash"] = client_source(request)
        store: EventStore = app.state.store
        try:
            with store.lock:
                if store.contains(obj["eventId"]):
                    return JSONResponse({"status": "duplicate"}, status_code=202)
                store.append(record)
        except OSError:
            return JSONResponse({"error": "store unavailable"}, status_code=503)
        return JSONResponse({"status": "stored"}, status_code=202)

    @app.get("/v1/events")
    async def get_events(request: Request, since: int = 0, until: int | None = None):
        key = request.headers.get("X-Api-Key")
        if key != config.api_read_key:
            return JSONResponse({"error": "missing or invalid API key"}, status_code=401)
        if since < 0 or (until is not None and until < since):
            return JSONResponse({"error": "invalid time range"}, status_code=400)
        records = app.state.store.records_between(since, until)
        body = to_jsonl(strip_service_fields(r) for r in records)
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.get("/healthz")
    async def healthz():
        store: EventStore = app.state.store
        try:
            count = store.count()
            last = store.last_received()
        except OSError:
            return JSONResponse({"error": "store unavailable"}, status_code=503)
        return JSONResponse({"events": count, "lastWriteMs": last})

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="serplab-ingestd", description=__doc__)
    parser.add_argument("--config", required=True, help="key-value config file")
    args = parser.parse_args(argv)
    try:
        config = ServiceConfig.from_config(load_kv(args.config))
    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    Path(config.store_path).parent.mkdir(parents=True, exist_ok=True)
    app = create_app(config)

    import uvicorn

    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
