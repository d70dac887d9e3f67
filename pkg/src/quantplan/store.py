"""The two backend knowledge stores.

``CaseStore`` holds historical (context, quantization, feedback) cases and
answers top-k cosine retrieval over a deterministic 13-dim context encoding.
``HwPerfStore`` holds per-tier quantization/performance trade-off tables and
answers exact or nearest-RAM lookups.

Both stores keep everything in memory and optionally append each insert to a
newline-delimited JSON file (``cases.ndjson`` / ``hwperf.ndjson``), which is
replayed on open. Inserts are serialized behind a lock; reads work on
immutable records.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .domain import (
    CATEGORIES,
    DEVICE_LOCATIONS,
    FACTORS,
    INTERACTION_FREQUENCIES,
    INTERACTION_TIMES,
    ContextualFactors,
    FeedbackRecord,
    HardwareSpec,
    PerformanceEstimate,
    QuantizationLevel,
    SensitivityWeights,
    ValidationError,
    validate_weights,
)

CASES_FILENAME = "cases.ndjson"
HWPERF_FILENAME = "hwperf.ndjson"

FEATURE_LENGTH = len(DEVICE_LOCATIONS) + len(INTERACTION_TIMES) + 1 + len(CATEGORIES)


class StoreError(RuntimeError):
    """A store operation could not be completed."""


class NoPriorError(StoreError):
    """No usable retrieved cases; the caller should fall back to interview hints."""


def encode_context(context: ContextualFactors) -> list[float]:
    """Deterministic 13-dim feature vector for a context.

    Layout: one-hot location (5) | one-hot time (3) | frequency ordinal / 2 (1)
    | task_type_mix (4). All entries are in [0, 1], so cosine similarity
    between any two encodings is too.
    """
    vec = [0.0] * FEATURE_LENGTH
    vec[DEVICE_LOCATIONS.index(context.device_location)] = 1.0
    off = len(DEVICE_LOCATIONS)
    vec[off + INTERACTION_TIMES.index(context.interaction_time)] = 1.0
    off += len(INTERACTION_TIMES)
    vec[off] = INTERACTION_FREQUENCIES.index(context.interaction_frequency) / 2.0
    off += 1
    for i, c in enumerate(CATEGORIES):
        vec[off + i] = context.task_type_mix[c]
    return vec


@dataclass(frozen=True)
class CaseRecord:
    """One archived (context, level, feedback) case with its inferred weights."""

    id: int
    context: ContextualFactors
    level: QuantizationLevel
    feedback: FeedbackRecord
    inferred_weights: SensitivityWeights
    feature: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        expected = tuple(encode_context(self.context))
        if self.feature and tuple(self.feature) != expected:
            raise ValidationError("stored feature vector does not match encode_context(context)")
        object.__setattr__(self, "feature", expected)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "context": self.context.to_dict(),
            "level": self.level.name,
            "feedback": self.feedback.to_dict(),
            "inferred_weights": self.inferred_weights.to_dict(),
            "feature": list(self.feature),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CaseRecord":
        return cls(
            id=int(data["id"]),
            context=ContextualFactors.from_dict(data["context"]),
            level=QuantizationLevel.from_label(data["level"]),
            feedback=FeedbackRecord.from_dict(data["feedback"]),
            inferred_weights=SensitivityWeights.from_dict(data["inferred_weights"]),
            feature=tuple(float(x) for x in data.get("feature", ())),
        )


@dataclass(frozen=True)
class HwPerfRecord:
    """Performance table for one hardware tier, covering exactly its levels."""

    id: int
    hardware: HardwareSpec
    table: Mapping[QuantizationLevel, PerformanceEstimate]

    def __post_init__(self) -> None:
        if set(self.table) != set(self.hardware.available_levels):
            raise ValidationError(
                f"performance table must cover exactly {[q.name for q in self.hardware.available_levels]}"
            )
        prev: Optional[PerformanceEstimate] = None
        for q in self.hardware.available_levels:
            est = self.table[q]
            if prev is not None:
                if est.accuracy < prev.accuracy:
                    raise ValidationError(f"accuracy must be non-decreasing in bit width (at {q.name})")
                if est.relative_energy < prev.relative_energy:
                    raise ValidationError(f"relative_energy must be non-decreasing in bit width (at {q.name})")
                if est.latency_norm < prev.latency_norm:
                    raise ValidationError(f"latency_norm must be non-decreasing in bit width (at {q.name})")
            prev = est
        object.__setattr__(self, "table", dict(self.table))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "hardware": self.hardware.to_dict(),
            "table": {q.name: self.table[q].to_dict() for q in self.hardware.available_levels},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HwPerfRecord":
        return cls(
            id=int(data["id"]),
            hardware=HardwareSpec.from_dict(data["hardware"]),
            table={
                QuantizationLevel.from_label(k): PerformanceEstimate.from_dict(v)
                for k, v in data["table"].items()
            },
        )


class _NdjsonLog:
    """Append-only NDJSON file; one canonical record per line."""

    def __init__(self, path: Optional[Path]):
        self.path = path

    def replay(self) -> list[dict]:
        if self.path is None or not self.path.exists():
            return []
        rows = []
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
        return rows

    def append(self, row: dict) -> None:
        if self.path is None:
            return
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(row) + "\n")
                fh.flush()
        except OSError as exc:
            raise StoreError(f"failed to append to {self.path}: {exc}") from exc


class CaseStore:
    """Append-only case archive with top-k cosine retrieval."""

    def __init__(self, path: Optional[Path] = None):
        self._log = _NdjsonLog(Path(path) if path else None)
        self._records: list[CaseRecord] = []
        self._matrix = np.empty((64, FEATURE_LENGTH), dtype=float)
        self._norms = np.empty(64, dtype=float)
        self._lock = threading.Lock()
        for row in self._log.replay():
            self._append(CaseRecord.from_dict(row))

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[CaseRecord, ...]:
        return tuple(self._records)

    def _append(self, record: CaseRecord) -> None:
        n = len(self._records)
        if n == self._matrix.shape[0]:
            self._matrix = np.concatenate([self._matrix, np.empty_like(self._matrix)])
            self._norms = np.concatenate([self._norms, np.empty_like(self._norms)])
        self._matrix[n] = record.feature
        self._norms[n] = np.linalg.norm(self._matrix[n])
        self._records.append(record)

    def insert(self, record: CaseRecord) -> int:
        """Append a case; the store assigns the next id and persists the record."""
        with self._lock:
            next_id = self._records[-1].id + 1 if self._records else 1
            stored = replace(record, id=next_id)
            self._log.append(stored.to_dict())
            self._append(stored)
            return next_id

    def retrieve_similar(self, query: ContextualFactors, k: int) -> list[tuple[CaseRecord, float]]:
        """Top-k cases by cosine similarity to the query context, descending.

        Ties keep insertion order (older first); returns fewer than k when the
        store is smaller.
        """
        if k < 1:
            raise ValidationError(f"k must be >= 1, got {k}")
        n = len(self._records)
        if n == 0:
            return []
        qv = np.asarray(encode_context(query), dtype=float)
        sims = self._matrix[:n] @ qv / (self._norms[:n] * np.linalg.norm(qv))
        order = np.argsort(-sims, kind="stable")[:k]
        return [(self._records[i], float(sims[i])) for i in order]


def estimate_weights_from_cases(
    cases: Sequence[tuple[CaseRecord, float]],
) -> SensitivityWeights:
    """Similarity-weighted mean of the retrieved cases' weights, renormalized.

    Raises ``NoPriorError`` when there is nothing usable (empty list, a
    negative similarity would be a caller bug and is rejected outright).
    """
    if not cases:
        raise NoPriorError("no retrieved cases")
    total_sim = 0.0
    acc = {f: 0.0 for f in FACTORS}
    for rec, sim in cases:
        if sim < 0:
            raise ValidationError(f"similarity must be >= 0, got {sim}")
        total_sim += sim
        for f in FACTORS:
            acc[f] += sim * rec.inferred_weights[f]
    if total_sim <= 0:
        raise NoPriorError("all retrieved similarities are zero")
    return validate_weights({f: v / total_sim for f, v in acc.items()})


class HwPerfStore:
    """Per-tier quantization/performance tables with nearest-RAM fallback."""

    def __init__(self, path: Optional[Path] = None):
        self._log = _NdjsonLog(Path(path) if path else None)
        self._records: list[HwPerfRecord] = []
        self._lock = threading.Lock()
        for row in self._log.replay():
            self._records.append(HwPerfRecord.from_dict(row))

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[HwPerfRecord, ...]:
        return tuple(self._records)

    def insert(self, record: HwPerfRecord) -> int:
        with self._lock:
            next_id = self._records[-1].id + 1 if self._records else 1
            stored = replace(record, id=next_id)
            self._log.append(stored.to_dict())
            self._records.append(stored)
            return next_id

    def lookup_performance(self, hw: HardwareSpec) -> dict[QuantizationLevel, PerformanceEstimate]:
        """Best-matching tier's table, restricted to ``hw.available_levels``.

        Exact processor_class match wins (latest record for that class);
        otherwise the tier nearest in RAM, with exact-distance ties going to
        the lower-RAM tier.
        """
        if not self._records:
            raise StoreError("hardware-performance store is empty")
        exact = [r for r in self._records if r.hardware.processor_class == hw.processor_class]
        if exact:
            chosen = exact[-1]
        else:
            chosen = min(
                self._records,
                key=lambda r: (abs(r.hardware.ram_mb - hw.ram_mb), r.hardware.ram_mb, r.id),
            )
        table = {q: est for q, est in chosen.table.items() if q in hw.available_levels}
        if not table:
            raise StoreError(
                f"no stored table covers any of {[q.name for q in hw.available_levels]} "
                f"(nearest tier {chosen.hardware.processor_class!r})"
            )
        return table
