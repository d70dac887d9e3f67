"""Shared domain types, validation, and the canonical JSON encoding.

Every other module builds on these types. All of them are immutable after
construction and validate their invariants in ``__post_init__``, so a value
that exists is a valid value. ``to_dict``/``from_dict`` define the canonical
JSON forms used by the REST API, the persistence files, and the frontend:
snake_case field names, maps keyed by label strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

WEIGHT_TOLERANCE = 1e-9


class ValidationError(ValueError):
    """A domain value violated one of its invariants."""


class QuantizationLevel(Enum):
    """Precision tier a client can run at, totally ordered by bit width."""

    INT4 = 4
    INT8 = 8
    FP16 = 16
    FP32 = 32

    @property
    def bit_width(self) -> int:
        return self.value

    def __lt__(self, other: "QuantizationLevel") -> bool:
        if not isinstance(other, QuantizationLevel):
            return NotImplemented
        return self.bit_width < other.bit_width

    @classmethod
    def from_label(cls, label: str) -> "QuantizationLevel":
        try:
            return cls[label]
        except KeyError:
            raise ValidationError(f"unknown quantization level {label!r}") from None


#: All levels, lowest bit width first.
LEVELS: tuple[QuantizationLevel, ...] = tuple(sorted(QuantizationLevel, key=lambda q: q.bit_width))


class Factor(str, Enum):
    """The three performance factors users weigh against each other."""

    ACCURACY = "accuracy"
    ENERGY = "energy"
    LATENCY = "latency"

    @classmethod
    def from_label(cls, label: str) -> "Factor":
        try:
            return cls(label)
        except ValueError:
            raise ValidationError(f"unknown factor {label!r}") from None


FACTORS: tuple[Factor, ...] = (Factor.ACCURACY, Factor.ENERGY, Factor.LATENCY)


class TaskCategory(str, Enum):
    """The four voice-assistant workload classes."""

    ENTERTAINMENT = "entertainment"
    SMART_HOME = "smart_home"
    GENERAL_QUERY = "general_query"
    PERSONAL_REQUEST = "personal_request"

    @classmethod
    def from_label(cls, label: str) -> "TaskCategory":
        try:
            return cls(label)
        except ValueError:
            raise ValidationError(f"unknown task category {label!r}") from None


CATEGORIES: tuple[TaskCategory, ...] = (
    TaskCategory.ENTERTAINMENT,
    TaskCategory.SMART_HOME,
    TaskCategory.GENERAL_QUERY,
    TaskCategory.PERSONAL_REQUEST,
)

DEVICE_LOCATIONS = ("bedroom", "living_room", "kitchen", "office", "other")
INTERACTION_TIMES = ("daytime", "nighttime", "mixed")
INTERACTION_FREQUENCIES = ("low", "medium", "high")
POWER_STATES = ("mains", "battery_high", "battery_low")
NOISE_LEVELS = ("low", "high")
DATA_QUANTITIES = ("low", "high")


def _check_label(value: str, allowed: tuple[str, ...], field_name: str) -> None:
    if value not in allowed:
        raise ValidationError(f"{field_name} must be one of {allowed}, got {value!r}")


def validate_weights(raw: Mapping[Factor, float]) -> "SensitivityWeights":
    """Rescale raw per-factor weights so they sum to 1.

    Rejects negative entries and the all-zero map; missing factors count as
    zero. Idempotent: applying it to an already normalized map returns the
    same values.
    """
    values: dict[Factor, float] = {}
    for f in FACTORS:
        v = float(raw.get(f, 0.0))
        if v < 0:
            raise ValidationError(f"weight for {f.value} is negative ({v})")
        values[f] = v
    total = sum(values.values())
    if total <= 0:
        raise ValidationError("all factor weights are zero; at least one must be positive")
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        values = {f: v / total for f, v in values.items()}
    return SensitivityWeights(weights=values)


def validate_distribution(raw: Mapping[TaskCategory, float]) -> dict[TaskCategory, float]:
    """Normalize a task-category distribution; values already summing to 1 pass through unchanged."""
    values: dict[TaskCategory, float] = {}
    for c in CATEGORIES:
        v = float(raw.get(c, 0.0))
        if v < 0:
            raise ValidationError(f"distribution mass for {c.value} is negative ({v})")
        values[c] = v
    total = sum(values.values())
    if total <= 0:
        raise ValidationError("all distribution masses are zero; at least one must be positive")
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        values = {c: v / total for c, v in values.items()}
    return values


@dataclass(frozen=True)
class SensitivityWeights:
    """Per-factor user weights, non-negative and summing to 1."""

    weights: Mapping[Factor, float]

    def __post_init__(self) -> None:
        missing = [f.value for f in FACTORS if f not in self.weights]
        if missing:
            raise ValidationError(f"weights missing factors: {missing}")
        for f, v in self.weights.items():
            if v < 0:
                raise ValidationError(f"weight for {f.value} is negative ({v})")
        total = sum(self.weights.values())
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(f"weights must sum to 1 (got {total})")
        object.__setattr__(self, "weights", dict(self.weights))

    def __getitem__(self, f: Factor) -> float:
        return self.weights[f]

    def to_dict(self) -> dict:
        return {"weights": {f.value: self.weights[f] for f in FACTORS}}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SensitivityWeights":
        return cls(weights={Factor.from_label(k): float(v) for k, v in data["weights"].items()})


@dataclass(frozen=True)
class HardwareSpec:
    """A device's capability tier.

    Support is downward-closed: a device that can run a level can run every
    lower-bit-width level, so ``available_levels`` is always the full ordered
    run from INT4 up to the tier's maximum.
    """

    processor_class: str
    ram_mb: int
    power_state: str
    available_levels: tuple[QuantizationLevel, ...]

    def __post_init__(self) -> None:
        _check_label(self.power_state, POWER_STATES, "power_state")
        if self.ram_mb <= 0:
            raise ValidationError(f"ram_mb must be positive, got {self.ram_mb}")
        levels = tuple(sorted(set(self.available_levels), key=lambda q: q.bit_width))
        if not levels:
            raise ValidationError("available_levels must be non-empty")
        if levels != LEVELS[: len(levels)]:
            raise ValidationError(
                "available_levels must include every level below its maximum "
                f"(got {[q.name for q in levels]})"
            )
        object.__setattr__(self, "available_levels", levels)

    @property
    def max_level(self) -> QuantizationLevel:
        return self.available_levels[-1]

    def to_dict(self) -> dict:
        return {
            "processor_class": self.processor_class,
            "ram_mb": self.ram_mb,
            "power_state": self.power_state,
            "available_levels": [q.name for q in self.available_levels],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HardwareSpec":
        return cls(
            processor_class=data["processor_class"],
            ram_mb=int(data["ram_mb"]),
            power_state=data["power_state"],
            available_levels=tuple(QuantizationLevel.from_label(x) for x in data["available_levels"]),
        )


@dataclass(frozen=True)
class ContextualFactors:
    """Observable usage descriptors gathered from the interview."""

    device_location: str
    interaction_time: str
    interaction_frequency: str
    task_type_mix: Mapping[TaskCategory, float]

    def __post_init__(self) -> None:
        _check_label(self.device_location, DEVICE_LOCATIONS, "device_location")
        _check_label(self.interaction_time, INTERACTION_TIMES, "interaction_time")
        _check_label(self.interaction_frequency, INTERACTION_FREQUENCIES, "interaction_frequency")
        mix = dict(self.task_type_mix)
        for c, v in mix.items():
            if v < 0:
                raise ValidationError(f"task_type_mix mass for {c.value} is negative ({v})")
        total = sum(mix.get(c, 0.0) for c in CATEGORIES)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(f"task_type_mix must sum to 1 (got {total})")
        object.__setattr__(self, "task_type_mix", {c: float(mix.get(c, 0.0)) for c in CATEGORIES})

    def to_dict(self) -> dict:
        return {
            "device_location": self.device_location,
            "interaction_time": self.interaction_time,
            "interaction_frequency": self.interaction_frequency,
            "task_type_mix": {c.value: self.task_type_mix[c] for c in CATEGORIES},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ContextualFactors":
        return cls(
            device_location=data["device_location"],
            interaction_time=data["interaction_time"],
            interaction_frequency=data["interaction_frequency"],
            task_type_mix={TaskCategory.from_label(k): float(v) for k, v in data["task_type_mix"].items()},
        )


@dataclass(frozen=True)
class InferredFactors:
    """Data properties inferred from context (noise, quantity, class distribution)."""

    noise_level: str
    data_quantity: str
    data_distribution: Mapping[TaskCategory, float]

    def __post_init__(self) -> None:
        _check_label(self.noise_level, NOISE_LEVELS, "noise_level")
        _check_label(self.data_quantity, DATA_QUANTITIES, "data_quantity")
        dist = dict(self.data_distribution)
        total = sum(dist.get(c, 0.0) for c in CATEGORIES)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValidationError(f"data_distribution must sum to 1 (got {total})")
        object.__setattr__(self, "data_distribution", {c: float(dist.get(c, 0.0)) for c in CATEGORIES})

    def to_dict(self) -> dict:
        return {
            "noise_level": self.noise_level,
            "data_quantity": self.data_quantity,
            "data_distribution": {c.value: self.data_distribution[c] for c in CATEGORIES},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "InferredFactors":
        return cls(
            noise_level=data["noise_level"],
            data_quantity=data["data_quantity"],
            data_distribution={TaskCategory.from_label(k): float(v) for k, v in data["data_distribution"].items()},
        )


@dataclass(frozen=True)
class PerformanceEstimate:
    """Expected metrics for one (hardware, level) cell.

    ``relative_energy`` and ``latency_norm`` are fractions of the value at the
    tier's highest available level, so both are 1.0 at the top level and all
    three metrics live in (0, 1].
    """

    accuracy: float
    relative_energy: float
    latency_norm: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValidationError(f"accuracy must be in [0,1], got {self.accuracy}")
        if not 0.0 < self.relative_energy <= 1.0:
            raise ValidationError(f"relative_energy must be in (0,1], got {self.relative_energy}")
        if not 0.0 < self.latency_norm <= 1.0:
            raise ValidationError(f"latency_norm must be in (0,1], got {self.latency_norm}")

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "relative_energy": self.relative_energy,
            "latency_norm": self.latency_norm,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PerformanceEstimate":
        return cls(
            accuracy=float(data["accuracy"]),
            relative_energy=float(data["relative_energy"]),
            latency_norm=float(data["latency_norm"]),
        )


@dataclass(frozen=True)
class FeedbackRecord:
    """One user feedback event: per-factor ratings plus verbatim text."""

    client_id: str
    round: int
    level: QuantizationLevel
    ratings: Mapping[Factor, float]
    free_text: str = ""

    def __post_init__(self) -> None:
        if self.round < 0:
            raise ValidationError(f"round must be >= 0, got {self.round}")
        missing = [f.value for f in FACTORS if f not in self.ratings]
        if missing:
            raise ValidationError(f"ratings missing factors: {missing}")
        for f, v in self.ratings.items():
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"rating for {f.value} must be in [0,1], got {v}")
        object.__setattr__(self, "ratings", dict(self.ratings))

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "round": self.round,
            "level": self.level.name,
            "ratings": {f.value: self.ratings[f] for f in FACTORS},
            "free_text": self.free_text,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "FeedbackRecord":
        return cls(
            client_id=data["client_id"],
            round=int(data["round"]),
            level=QuantizationLevel.from_label(data["level"]),
            ratings={Factor.from_label(k): float(v) for k, v in data["ratings"].items()},
            free_text=data.get("free_text", ""),
        )


@dataclass(frozen=True)
class ClientProfile:
    """Everything the planner knows about one client."""

    client_id: str
    hardware: HardwareSpec
    context: ContextualFactors
    inferred: InferredFactors
    estimated_weights: SensitivityWeights
    contribution_estimate: Mapping[QuantizationLevel, float]

    def __post_init__(self) -> None:
        contrib = dict(self.contribution_estimate)
        for q in self.hardware.available_levels:
            if q not in contrib:
                raise ValidationError(f"contribution_estimate missing level {q.name}")
        for q, v in contrib.items():
            if v <= 0:
                raise ValidationError(f"contribution_estimate for {q.name} must be > 0, got {v}")
        object.__setattr__(self, "contribution_estimate", contrib)

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "hardware": self.hardware.to_dict(),
            "context": self.context.to_dict(),
            "inferred": self.inferred.to_dict(),
            "estimated_weights": self.estimated_weights.to_dict(),
            "contribution_estimate": {
                q.name: self.contribution_estimate[q] for q in self.hardware.available_levels
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ClientProfile":
        return cls(
            client_id=data["client_id"],
            hardware=HardwareSpec.from_dict(data["hardware"]),
            context=ContextualFactors.from_dict(data["context"]),
            inferred=InferredFactors.from_dict(data["inferred"]),
            estimated_weights=SensitivityWeights.from_dict(data["estimated_weights"]),
            contribution_estimate={
                QuantizationLevel.from_label(k): float(v) for k, v in data["contribution_estimate"].items()
            },
        )


@dataclass(frozen=True)
class RoundPlan:
    """Per-client precision assignments and slot accounting for one round."""

    round: int
    assignments: Mapping[str, QuantizationLevel]
    slot_usage: Mapping[QuantizationLevel, int]
    utilization: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.utilization <= 1.0:
            raise ValidationError(f"utilization must be in [0,1], got {self.utilization}")
        histogram: dict[QuantizationLevel, int] = {}
        for q in self.assignments.values():
            histogram[q] = histogram.get(q, 0) + 1
        usage = {q: n for q, n in self.slot_usage.items() if n}
        if usage != histogram:
            raise ValidationError("slot_usage does not match the assignment histogram")
        object.__setattr__(self, "assignments", dict(self.assignments))
        object.__setattr__(self, "slot_usage", usage)

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "assignments": {cid: q.name for cid, q in sorted(self.assignments.items())},
            "slot_usage": {q.name: self.slot_usage.get(q, 0) for q in LEVELS},
            "utilization": self.utilization,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "RoundPlan":
        return cls(
            round=int(data["round"]),
            assignments={cid: QuantizationLevel.from_label(v) for cid, v in data["assignments"].items()},
            slot_usage={QuantizationLevel.from_label(k): int(v) for k, v in data["slot_usage"].items()},
            utilization=float(data["utilization"]),
        )


def uniform_weights() -> SensitivityWeights:
    return validate_weights({f: 1.0 for f in FACTORS})


def uniform_mix() -> dict[TaskCategory, float]:
    return {c: 0.25 for c in CATEGORIES}
