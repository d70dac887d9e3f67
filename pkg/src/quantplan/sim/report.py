"""Experiment output: the report object, its JSON form, and the CSV series."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..domain import CATEGORIES, TaskCategory, ValidationError

REPORT_FILENAME = "report.json"
METRICS_FILENAME = "metrics.csv"

HISTOGRAM_BINS = 20  # satisfaction in [-1, 1], bin width 0.1

CSV_COLUMNS = (
    "round",
    "mean_satisfaction",
    "mean_relative_energy",
    *(f"accuracy_{c.value}" for c in CATEGORIES),
)


def histogram_bins(samples: Sequence[float]) -> list[tuple[float, int]]:
    """Fixed 20-bin histogram of satisfaction samples over [-1, 1]."""
    counts = [0] * HISTOGRAM_BINS
    for s in samples:
        idx = int((s + 1.0) / 0.1)
        counts[min(HISTOGRAM_BINS - 1, max(0, idx))] += 1
    return [(round(-1.0 + 0.1 * i, 1), counts[i]) for i in range(HISTOGRAM_BINS)]


@dataclass(frozen=True)
class RoundSummary:
    round: int
    mean_satisfaction: float
    mean_relative_energy: float
    accuracy: Mapping[TaskCategory, float]
    utilization: float

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "mean_satisfaction": self.mean_satisfaction,
            "mean_relative_energy": self.mean_relative_energy,
            "accuracy": {c.value: self.accuracy[c] for c in CATEGORIES},
            "utilization": self.utilization,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "RoundSummary":
        return cls(
            round=int(data["round"]),
            mean_satisfaction=float(data["mean_satisfaction"]),
            mean_relative_energy=float(data["mean_relative_energy"]),
            accuracy={TaskCategory.from_label(k): float(v) for k, v in data["accuracy"].items()},
            utilization=float(data["utilization"]),
        )


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated metrics for one experiment run."""

    mean_satisfaction: float
    satisfaction_histogram: list[tuple[float, int]]
    mean_relative_energy: float
    per_class_accuracy: Mapping[TaskCategory, float]
    final_class_mass: Mapping[TaskCategory, float]
    per_round_series: list[RoundSummary] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 0.0 < self.mean_relative_energy <= 1.0:
            raise ValidationError(f"mean_relative_energy must be in (0,1], got {self.mean_relative_energy}")

    def to_dict(self) -> dict:
        return {
            "mean_satisfaction": self.mean_satisfaction,
            "satisfaction_histogram": [[edge, count] for edge, count in self.satisfaction_histogram],
            "mean_relative_energy": self.mean_relative_energy,
            "per_class_accuracy": {c.value: self.per_class_accuracy[c] for c in CATEGORIES},
            "final_class_mass": {c.value: self.final_class_mass[c] for c in CATEGORIES},
            "per_round_series": [r.to_dict() for r in self.per_round_series],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentReport":
        return cls(
            mean_satisfaction=float(data["mean_satisfaction"]),
            satisfaction_histogram=[(float(e), int(n)) for e, n in data["satisfaction_histogram"]],
            mean_relative_energy=float(data["mean_relative_energy"]),
            per_class_accuracy={TaskCategory.from_label(k): float(v) for k, v in data["per_class_accuracy"].items()},
            final_class_mass={TaskCategory.from_label(k): float(v) for k, v in data["final_class_mass"].items()},
            per_round_series=[RoundSummary.from_dict(r) for r in data["per_round_series"]],
        )


def emit_report(report: ExperimentReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Write report.json and metrics.csv; byte-stable for identical reports."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        report_path = out / REPORT_FILENAME
        with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        metrics_path = out / METRICS_FILENAME
        with open(metrics_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in report.per_round_series:
                writer.writerow(
                    [
                        row.round,
                        row.mean_satisfaction,
                        row.mean_relative_energy,
                        *(row.accuracy[c] for c in CATEGORIES),
                    ]
                )
    except OSError as exc:
        raise IOError(f"failed to write report under {out}: {exc}") from exc
    return report_path, metrics_path
