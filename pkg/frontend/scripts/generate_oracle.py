#!/usr/bin/env python3
"""Regenerate the extension test fixtures that come from the backend.

Produces, under test/fixtures/:
  *.snapshot.json         hand-labeled ground truth per recorded page
  arrangement-oracle.json backend arrangement engine output per fixture
  assignment-vectors.json expected treatment groups for fixed keys
  hash-vectors.json       copy of the backend's frozen hash vectors

Run from frontend/ with the serplab package installed.
"""

import json
import shutil
from pathlib import Path

from serplab.arrangements import apply
from serplab.assignment import AssignmentKey, GroupWeights, assign
from serplab.model import (
    Column,
    ElementKind,
    Engine,
    SerpElement,
    SerpSnapshot,
    Slot,
    arrangements_for,
    generic_rank,
    snapshot_from_json,
    snapshot_to_json,
)

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "test" / "fixtures"
BACKEND_FIXTURES = HERE.parent.parent / "tests" / "fixtures"

KINDS = {
    "g": ElementKind.GENERIC_RESULT,
    "ad": ElementKind.AD,
    "box": ElementKind.SHOPPING_BOX,
    "ssr": ElementKind.SPECIALIZED_RESULT,
}


def build(engine, main, sidebar=(), candidate_count=None):
    counters = {}
    elements = []
    for column, codes in ((Column.MAIN, main), (Column.SIDEBAR, sidebar)):
        for index, code in enumerate(codes):
            counters[code] = counters.get(code, 0) + 1
            elements.append(
                SerpElement(f"{code}{counters[code]}", KINDS[code], Slot(column, index))
            )
    return SerpSnapshot(Engine(engine), 0, tuple(elements), candidate_count)


GROUND_TRUTH = {
    "g01": build("google", ["ad", "ad"] + ["g"] * 10, candidate_count=323_000_000),
    "g02": build("google", ["g"] * 8 + ["ad"], sidebar=["box"], candidate_count=1_230_000),
    "g03": build(
        "google",
        ["box", "ad", "g", "ssr", "g", "g", "g", "g", "g"],
        candidate_count=42_500,
    ),
    "b01": build("bing", ["ad"] + ["g"] * 5, candidate_count=2_340_000),
}


def oracle_entry(snapshot, arrangement):
    result = apply(arrangement, snapshot)
    arranged = result.snapshot
    return {
        "applied": result.applied,
        "main": [el.element_id for el in arranged.column(Column.MAIN)],
        "sidebar": [el.element_id for el in arranged.column(Column.SIDEBAR)],
        "displayedRanks": {
            el.element_id: generic_rank(arranged, el.element_id)
            for el in arranged.generic_results()
        },
    }


def assignment_vectors():
    weights = GroupWeights.uniform()
    vectors = []
    for engine in Engine:
        for i in range(25):
            user = f"vec-user-{i:02d}"
            query = f"query number {i}"
            salt = "vector-epoch"
            group = assign(AssignmentKey.make(user, query, salt), engine, weights)
            vectors.append(
                {
                    "userId": user,
                    "rawQuery": query,
                    "salt": salt,
                    "engine": engine.value,
                    "group": group.value,
                }
            )
    return vectors


def main():
    for name, snapshot in GROUND_TRUTH.items():
        path = FIXTURES / f"{name}.snapshot.json"
        obj = snapshot_to_json(snapshot)
        assert snapshot_from_json(obj) == snapshot
        path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")

    oracle = {
        name: {
            arrangement.value: oracle_entry(snapshot, arrangement)
            for arrangement in arrangements_for(snapshot.engine)
        }
        for name, snapshot in GROUND_TRUTH.items()
    }
    (FIXTURES / "arrangement-oracle.json").write_text(
        json.dumps(oracle, indent=2) + "\n", encoding="utf-8"
    )

    (FIXTURES / "assignment-vectors.json").write_text(
        json.dumps(assignment_vectors(), indent=2) + "\n", encoding="utf-8"
    )

    shutil.copyfile(BACKEND_FIXTURES / "hash_vectors.json", FIXTURES / "hash-vectors.json")
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
