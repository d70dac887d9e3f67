"""FL-server planning: client scheduling, merit-filtered slot packing, and
mixed-precision aggregation accounting.

Packing works on each client's "similar merits" candidate set (levels whose
satisfaction is within epsilon of that client's optimum). Clients are placed
greedily in order of their best achievable satisfaction; a client whose
candidates are all full still trains at its optimum but counts against
utilization instead of consuming a slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .accuracy import AccuracyModel, accuracy_proxy
from .domain import (
    CATEGORIES,
    ClientProfile,
    PerformanceEstimate,
    QuantizationLevel,
    RoundPlan,
    TaskCategory,
    ValidationError,
)
from .satisfaction import build_reward_penalty, optimal_level, satisfaction_score

DEFAULT_EPSILON = 0.05


class PlanningError(RuntimeError):
    """Planning or aggregation could not proceed with the given inputs."""


@dataclass(frozen=True)
class SlotConfig:
    """Max clients aggregatable per level per round."""

    capacity: Mapping[QuantizationLevel, int]

    def __post_init__(self) -> None:
        cap = {q: int(n) for q, n in self.capacity.items()}
        if any(n < 0 for n in cap.values()):
            raise ValidationError("slot capacities must be >= 0")
        if not any(n > 0 for n in cap.values()):
            raise ValidationError("at least one slot capacity must be positive")
        object.__setattr__(self, "capacity", cap)

    @property
    def total(self) -> int:
        return sum(self.capacity.values())

    def to_dict(self) -> dict:
        return {"capacity": {q.name: n for q, n in sorted(self.capacity.items(), key=lambda kv: kv[0].bit_width)}}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SlotConfig":
        return cls(capacity={QuantizationLevel.from_label(k): int(v) for k, v in data["capacity"].items()})


@dataclass(frozen=True)
class GlobalModelState:
    """Accumulated per-class contribution mass and the accuracy it implies."""

    round: int
    class_mass: Mapping[TaskCategory, float]
    accuracy: Mapping[TaskCategory, float]

    def __post_init__(self) -> None:
        mass = {c: float(self.class_mass.get(c, 0.0)) for c in CATEGORIES}
        if any(v < 0 for v in mass.values()):
            raise ValidationError("class_mass entries must be >= 0")
        object.__setattr__(self, "class_mass", mass)
        object.__setattr__(self, "accuracy", {c: float(self.accuracy.get(c, 0.0)) for c in CATEGORIES})

    @classmethod
    def initial(cls, model: AccuracyModel) -> "GlobalModelState":
        mass = {c: 0.0 for c in CATEGORIES}
        return cls(round=0, class_mass=mass, accuracy=accuracy_proxy(mass, model))

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "class_mass": {c.value: self.class_mass[c] for c in CATEGORIES},
            "accuracy": {c.value: self.accuracy[c] for c in CATEGORIES},
        }


def precision_factor(q: QuantizationLevel) -> float:
    """Contribution effectiveness of a level, normalized to FP32."""
    return q.bit_width / 32.0


def select_clients(round: int, population: Sequence[str], participation: int) -> list[str]:
    """Deterministic round-robin window over the id-sorted population."""
    if not population:
        raise PlanningError("population is empty")
    ids = sorted(population)
    n = len(ids)
    if not 1 <= participation <= n:
        raise ValidationError(f"participation must be in [1, {n}], got {participation}")
    start = (round * participation) % n
    return [ids[(start + i) % n] for i in range(participation)]


def plan_round(
    profiles: Sequence[ClientProfile],
    perf_tables: Mapping[str, Mapping[QuantizationLevel, PerformanceEstimate]],
    slots: SlotConfig,
    epsilon: float = DEFAULT_EPSILON,
    round: int = 0,
) -> RoundPlan:
    """Assign each client a level from its merit-filtered candidate set.

    Deterministic: clients are packed in descending order of their optimal
    satisfaction (ties by client id), and each takes its best candidate with
    remaining capacity, falling back to its optimum (over capacity) if none.
    """
    if epsilon < 0:
        raise ValidationError(f"epsilon must be >= 0, got {epsilon}")

    scored = []
    for profile in sorted(profiles, key=lambda p: p.client_id):
        if profile.client_id not in perf_tables:
            raise PlanningError(f"no performance table for client {profile.client_id}")
        perf = perf_tables[profile.client_id]
        candidates = [q for q in profile.hardware.available_levels if q in perf]
        if not candidates:
            raise PlanningError(f"no scorable levels for client {profile.client_id}")
        table = build_reward_penalty({q: perf[q] for q in candidates})
        c = profile.contribution_estimate
        scores = {q: satisfaction_score(profile.estimated_weights, table, c, q).satisfaction for q in candidates}
        best = optimal_level(profile.estimated_weights, table, c, candidates)
        merit = [q for q in candidates if scores[q] >= scores[best] - epsilon]
        scored.append((profile.client_id, best, scores, merit))

    scored.sort(key=lambda item: (-item[2][item[1]], item[0]))

    remaining = dict(slots.capacity)
    assignments: dict[str, QuantizationLevel] = {}
    within_capacity = 0
    for client_id, best, scores, merit in scored:
        # Highest-satisfaction candidate with a free slot; satisfaction ties
        # resolve to the lower bit width, same as optimal_level.
        open_slots = [q for q in merit if remaining.get(q, 0) > 0]
        if open_slots:
            choice = max(open_slots, key=lambda q: (scores[q], -q.bit_width))
            remaining[choice] -= 1
            within_capacity += 1
        else:
            choice = best
        assignments[client_id] = choice

    histogram: dict[QuantizationLevel, int] = {}
    for q in assignments.values():
        histogram[q] = histogram.get(q, 0) + 1
    utilization = min(1.0, max(0.0, within_capacity / slots.total)) if slots.total else 0.0
    return RoundPlan(round=round, assignments=assignments, slot_usage=histogram, utilization=utilization)


def aggregate_round(
    plan: RoundPlan,
    profiles: Mapping[str, ClientProfile],
    state: GlobalModelState,
    quantity_map: Mapping[str, float],
    model: AccuracyModel,
) -> GlobalModelState:
    """Fold one round's assignments into the global contribution accounting.

    Each client adds quantity x class-share x precision_factor per class;
    accuracy is recomputed from the new masses and the round advances.
    """
    mass = dict(state.class_mass)
    for client_id, level in sorted(plan.assignments.items()):
        if client_id not in profiles:
            raise PlanningError(f"no profile for assigned client {client_id}")
        if client_id not in quantity_map:
            raise PlanningError(f"no data quantity for assigned client {client_id}")
        quantity = quantity_map[client_id]
        if quantity < 0:
            raise ValidationError(f"data quantity must be >= 0, got {quantity} for {client_id}")
        share = profiles[client_id].inferred.data_distribution
        pf = precision_factor(level)
        for c in CATEGORIES:
            mass[c] += quantity * share[c] * pf
    return GlobalModelState(round=state.round + 1, class_mass=mass, accuracy=accuracy_proxy(mass, model))
