"""Plain-text key-value configuration shared by all components.

Format: one `key = value` pair per line, `#` starts a comment, blank
lines ignored. Keys are dotted, e.g. `google.a1 = 1/7` for treatment
weights or `experiment.salt = epoch-1` for the assignment salt.
"""

from __future__ import annotations

from pathlib import Path

from .assignment import GroupWeights, parse_weight
from .errors import InvalidConfigError
from .model import ArrangementId, Engine


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse config text into a key -> value map; duplicate keys are errors."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise InvalidConfigError(f"line {lineno}: empty key")
        if key in values:
            raise InvalidConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_kv(path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_kv_text(text)


def weights_from_config(kv: dict[str, str]) -> GroupWeights:
    """Extract `<engine>.<arrangementId> = <weight>` lines.

    Engines with no weight lines fall back to the uniform defaults so a
    config may pin only the engine it cares about.
    """
    tables: dict[Engine, list[tuple[ArrangementId, float]]] = {}
    group_values = {a.value for a in ArrangementId}
    for key, value in kv.items():
        head, _, tail = key.partition(".")
        if head not in {e.value for e in Engine} or tail not in group_values:
            continue
        engine = Engine(head)
        tables.setdefault(engine, []).append((ArrangementId(tail), parse_weight(value)))
    defaults = GroupWeights.uniform()
    merged = {
        engine: tuple(tables[engine]) if engine in tables else defaults.for_engine(engine)
        for engine in Engine
    }
    return GroupWeights(merged)


def salt_from_config(kv: dict[str, str]) -> str:
    return kv.get("experiment.salt", "")


def get_int(kv: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in kv:
        if default is None:
            raise InvalidConfigError(f"missing config key {key!r}")
        return default
    try:
        return int(kv[key])
    except ValueError as exc:
        raise InvalidConfigError(f"{key}: expected integer, got {kv[key]!r}") from exc


def get_float(kv: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in kv:
        if default is None:
            raise InvalidConfigError(f"missing config key {key!r}")
        return default
    try:
        return float(kv[key])
    except ValueError as exc:
        raise InvalidConfigError(f"{key}: expected number, got {kv[key]!r}") from exc


def get_floats(kv: dict[str, str], key: str, default: tuple[float, ...] = ()) -> tuple[float, ...]:
    if key not in kv:
        return default
    try:
        return tuple(float(part) for part in kv[key].split(",") if part.strip())
    except ValueError as exc:
        raise InvalidConfigError(f"{key}: expected comma-separated numbers") from exc
