"""Operator command line: simulate, ingest-replay, preprocess, report.

Exit codes: 0 success, 2 configuration error, 3 I/O error (including an
unreachable ingest service).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .clicksim import ClickModelParams, PopulationSpec, generate_population, sample_events
from .config import get_float, get_int, load_kv, salt_from_config, weights_from_config
from .errors import InvalidConfigError, SerplabError
from .model import read_events_jsonl, write_events_jsonl
from .preprocess import PreprocessConfig, preprocess
from .report import build_report, write_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="serplab",
        description="simulate event logs, replay them into the ingest service, "
        "preprocess, and estimate arrangement effects",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="write a synthetic event log")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--output", required=True, help="output directory")
    simulate.add_argument("--seed", type=int, default=None, help="overrides simulate.seed")

    replay = sub.add_parser("ingest-replay", help="post an event log to a running service")
    replay.add_argument("--input", required=True)
    replay.add_argument("--url", required=True, help="service base URL, e.g. http://127.0.0.1:8787")

    prep = sub.add_parser("preprocess", help="apply burn-in and classification filters")
    prep.add_argument("--input", required=True)
    prep.add_argument("--output", required=True, help="output directory")
    prep.add_argument("--burn-in-days", type=int, default=4)

    report = sub.add_parser("report", help="estimate effects and write report files")
    report.add_argument("--input", required=True)
    report.add_argument("--output", required=True, help="output directory")
    report.add_argument("--seed", type=int, default=0)
    report.add_argument("--resamples", type=int, default=200)
    report.add_argument("--bins", type=int, default=4)
    return parser


def cmd_simulate(args) -> int:
    kv = load_kv(args.config)
    spec = PopulationSpec.from_config(kv)
    params = ClickModelParams.from_config(kv)
    weights = weights_from_config(kv)
    n_events = get_int(kv, "simulate.events")
    seed = args.seed if args.seed is not None else get_int(kv, "simulate.seed", 0)

    population = generate_population(spec)
    events = sample_events(
        params,
        population,
        weights,
        n_events,
        seed,
        n_users=get_int(kv, "simulate.users", 32),
        duration_days=get_float(kv, "simulate.durationDays", 28.0),
        salt=salt_from_config(kv),
    )
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "events.jsonl"
    count = write_events_jsonl(events, path)
    print(f"wrote {count} events to {path}")
    return 0


def cmd_ingest_replay(args) -> int:
    lines = [
        line
        for line in Path(args.input).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    base = args.url.rstrip("/")
    stored = duplicates = rejected = 0
    with httpx.Client(timeout=10.0) as client:
        before = client.get(f"{base}/healthz").json()["events"]
        for line in lines:
            response = client.post(
                f"{base}/v1/events",
                content=line.encode("utf-8"),
                headers={"Content-Type": "application/json"},
            )
            if response.status_code == 202:
                if response.json().get("status") == "duplicate":
                    duplicates += 1
                else:
                    stored += 1
            else:
                rejected += 1
        after = client.get(f"{base}/healthz").json()["events"]
    print(
        f"replayed {len(lines)} events: {stored} stored, {duplicates} duplicates, "
        f"{rejected} rejected; service count {before} -> {after}"
    )
    if after - before != stored:
        print("warning: service count does not match stored count", file=sys.stderr)
        return 1
    return 0


def cmd_preprocess(args) -> int:
    events = read_events_jsonl(args.input, strict_ranks=False)
    kept, drop_report = preprocess(events, PreprocessConfig(burn_in_days=args.burn_in_days))
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    kept_path = outdir / "events.jsonl"
    write_events_jsonl(kept, kept_path)
    report_path = outdir / "drop_report.json"
    report_path.write_text(
        json.dumps(drop_report.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"kept {drop_report.kept_count}/{drop_report.input_count} events "
        f"(burn-in {drop_report.dropped_burn_in}, "
        f"unclassifiable {drop_report.dropped_unclassifiable}) -> {kept_path}"
    )
    return 0


def cmd_report(args) -> int:
    events = read_events_jsonl(args.input, strict_ranks=False)
    report = build_report(
        events, seed=args.seed, resamples=args.resamples, n_bins=args.bins
    )
    json_path, csv_path = write_report(report, args.output)
    print(f"wrote {json_path} and {csv_path} ({len(report.estimates)} estimates)")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "ingest-replay": cmd_ingest_replay,
    "preprocess": cmd_preprocess,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except httpx.TransportError as exc:
        print(f"service unreachable: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except SerplabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
