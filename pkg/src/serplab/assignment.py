"""Deterministic randomized treatment assignment.

A (user, query, salt) key is hashed with FNV-1a 64 and the hash, scaled
to [0, 1), picks a treatment group from the configured cumulative weight
intervals. The same key always lands in the same group - reloads, tab
switches and repeated identical queries stay in their arrangement - and
changing the salt starts a fresh experiment epoch.

The hash algorithm, the "userId|normalizedQuery|salt" layout, the weight
order and the cumulative-sum bucketing are a cross-language contract:
every client that assigns groups must reproduce them bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidArgumentError, InvalidConfigError
from .model import ArrangementId, Engine, arrangements_for

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

_WEIGHT_TOLERANCE = 1e-9


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


def mix64(h: int) -> int:
    """splitmix64 finalizer: full-avalanche scrambling of a 64-bit value.

    FNV-1a barely diffuses its final input bytes into the high bits, so
    bucketing raw hashes on [0, 1) would ignore a salt change in the last
    character. Scrambling first makes every input byte flip every output
    bit with probability ~1/2. Like the hash itself, this is part of the
    cross-language assignment contract.
    """
    h &= _MASK64
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & _MASK64
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & _MASK64
    h ^= h >> 31
    return h


def normalize_query(raw: str) -> str:
    """Lowercase, trim, and collapse internal whitespace runs to one space."""
    return " ".join(raw.lower().split())


@dataclass(frozen=True)
class AssignmentKey:
    """Hash input for one assignment decision.

    normalized_query must already be in normalize_query() form; the salt
    identifies the experiment epoch.
    """

    user_id: str
    normalized_query: str
    salt: str

    def __post_init__(self) -> None:
        if self.normalized_query != normalize_query(self.normalized_query):
            raise InvalidArgumentError(
                f"query not normalized: {self.normalized_query!r}"
            )

    @classmethod
    def make(cls, user_id: str, raw_query: str, salt: str) -> "AssignmentKey":
        return cls(user_id, normalize_query(raw_query), salt)


def stable_hash(key: AssignmentKey) -> int:
    """64-bit assignment hash of "userId|normalizedQuery|salt" (UTF-8)."""
    payload = f"{key.user_id}|{key.normalized_query}|{key.salt}"
    return fnv1a64(payload.encode("utf-8"))


def _validate_table(
    engine: Engine, entries: tuple[tuple[ArrangementId, float], ...]
) -> None:
    if not entries:
        raise InvalidConfigError(f"no weights configured for {engine.value}")
    allowed = set(arrangements_for(engine))
    seen: set[ArrangementId] = set()
    total = 0.0
    for group, weight in entries:
        if group not in allowed:
            raise InvalidConfigError(
                f"group {group.value} not allowed on {engine.value}"
            )
        if group in seen:
            raise InvalidConfigError(f"duplicate weight for {engine.value}.{group.value}")
        seen.add(group)
        if weight < 0:
            raise InvalidConfigError(f"negative weight for {engine.value}.{group.value}")
        total += weight
    if abs(total - 1.0) > _WEIGHT_TOLERANCE:
        raise InvalidConfigError(
            f"{engine.value} weights sum to {total!r}, expected 1"
        )


@dataclass(frozen=True)
class GroupWeights:
    """Per-engine treatment weights, in configuration order."""

    tables: Mapping[Engine, tuple[tuple[ArrangementId, float], ...]]

    def __post_init__(self) -> None:
        for engine, entries in self.tables.items():
            _validate_table(engine, entries)

    def for_engine(self, engine: Engine) -> tuple[tuple[ArrangementId, float], ...]:
        try:
            return self.tables[engine]
        except KeyError:
            raise InvalidConfigError(f"no weights configured for {engine.value}") from None

    @classmethod
    def uniform(cls) -> "GroupWeights":
        """Defaults: uniform over the 7 Google groups, uniform over the 2 Bing groups."""
        return cls(
            {
                engine: tuple(
                    (group, 1.0 / len(arrangements_for(engine)))
                    for group in arrangements_for(engine)
                )
                for engine in Engine
            }
        )

    @classmethod
    def single(cls, engine: Engine, group: ArrangementId) -> "GroupWeights":
        return cls({engine: ((group, 1.0),)})

    @classmethod
    def of(
        cls, engine: Engine, weights: Mapping[ArrangementId, float]
    ) -> "GroupWeights":
        return cls({engine: tuple(weights.items())})


def assign(key: AssignmentKey, engine: Engine, weights: GroupWeights) -> ArrangementId:
    """Pick the treatment group whose cumulative-weight interval contains
    u = mix64(stable_hash(key)) / 2^64.

    Stateless and deterministic: the same key, engine and weights always
    produce the same group, in any process on any machine.
    """
    entries = weights.for_engine(engine)
    u = mix64(stable_hash(key)) / 2**64
    cumulative = 0.0
    for group, weight in entries:
        cumulative += weight
        if u < cumulative:
            return group
    # Rounding can leave the total a hair under 1; the tail belongs to the
    # last interval.
    return entries[-1][0]


def parse_weight(text: str) -> float:
    """Parse a config weight: decimal ("0.25") or rational ("1/7")."""
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidConfigError(f"bad weight {text!r}: {exc}") from exc
