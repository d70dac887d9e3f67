"""Default hardware tiers and their synthetic performance tables.

Shipped as a versioned JSON fixture next to this module; the values are
synthetic but monotone by construction and shaped so that the
satisfaction-optimal level genuinely varies with user weights.
"""

from __future__ import annotations

import json
from importlib import resources

from ..domain import HardwareSpec, PerformanceEstimate, QuantizationLevel
from ..store import HwPerfRecord, HwPerfStore

FIXTURE_NAME = "perf_tables.json"


def load_default_tiers() -> list[HwPerfRecord]:
    raw = json.loads(resources.files(__package__).joinpath(FIXTURE_NAME).read_text("utf-8"))
    records = []
    for entry in raw["tiers"]:
        records.append(
            HwPerfRecord(
                id=0,
                hardware=HardwareSpec.from_dict(entry["hardware"]),
                table={
                    QuantizationLevel.from_label(k): PerformanceEstimate.from_dict(v)
                    for k, v in entry["table"].items()
                },
            )
        )
    return records


def seed_default_tiers(store: HwPerfStore) -> None:
    """Insert the default tier tables into an empty store."""
    for record in load_default_tiers():
        store.insert(record)
