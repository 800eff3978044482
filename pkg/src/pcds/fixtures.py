"""Golden fixtures: the six-UE example cell and its expected paths and schedule."""

from __future__ import annotations

import json
from pathlib import Path

from .model import Link, RateMatrix
from .paths import PathSet
from .scheduling import Pairing, Schedule

# Rows/columns are UE1..UE6 then the AP; entry (i, j) is packets/slot on link i->j.
EXAMPLE_6UE_RATES = (
    (0, 1, 1, 2, 2, 1, 3),
    (1, 0, 1, 1, 1, 2, 3),
    (1, 1, 0, 1, 1, 1, 2),
    (2, 1, 1, 0, 3, 1, 1),
    (2, 1, 1, 3, 0, 1, 1),
    (1, 2, 1, 1, 1, 0, 1),
    (3, 3, 2, 1, 1, 1, 0),
)
EXAMPLE_6UE_AP = 6
EXAMPLE_6UE_LABELS = ("UE1", "UE2", "UE3", "UE4", "UE5", "UE6", "AP")
EXAMPLE_6UE_DEMAND = 6
EXAMPLE_6UE_HMAX = 3

# AP->UE1->UE4->UE5, AP->UE2->UE6, AP->UE3
EXAMPLE_6UE_PATHS = PathSet(6, ((6, 0, 3, 4), (6, 1, 5), (6, 2)))
EXAMPLE_6UE_SCHEDULE = Schedule((
    Pairing((Link(6, 0),), 2),
    Pairing((Link(0, 3), Link(6, 1)), 3),
    Pairing((Link(6, 2), Link(1, 5), Link(3, 4)), 3),
))


def example_6ue_rates() -> RateMatrix:
    return RateMatrix(EXAMPLE_6UE_RATES)


FIXTURES = ("paper-6ue",)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def export_fixture(name: str, out_dir: str | Path) -> list[Path]:
    """Write the named fixture as JSON golden files; output is byte-stable."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "rates.json": {"ap": EXAMPLE_6UE_AP, "rates": [list(r) for r in EXAMPLE_6UE_RATES]},
        "topology.json": {
            "ap": EXAMPLE_6UE_AP,
            "nodes": [{"id": i, "label": lab, "is_ap": i == EXAMPLE_6UE_AP} for i, lab in enumerate(EXAMPLE_6UE_LABELS)],
        },
        "paths.json": {"h_max": EXAMPLE_6UE_HMAX, **EXAMPLE_6UE_PATHS.to_dict()},
        "schedule.json": {"d": EXAMPLE_6UE_DEMAND, **EXAMPLE_6UE_SCHEDULE.to_dict()},
    }
    written = []
    for fname, payload in files.items():
        path = out / fname
        path.write_text(_dump(payload))
        written.append(path)
    return written
