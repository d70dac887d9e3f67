"""The experiment loop: select, profile, plan, feed back, aggregate.

Three planners are compared on the same population:

* ``personalized`` runs the full pipeline (simulated interview, rule-based
  extraction, case retrieval, merit-filtered packing).
* ``unified`` ignores preferences and gives every client one level below its
  tier maximum (the lowest tier stays at its only level).
* ``energy_priority`` is the personalized pipeline with the estimated weights
  overridden to put 0.7 mass on energy before level selection.

The reported satisfaction is always ground truth: the score a client's hidden
weights give the assigned level, with contribution multiplier 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Mapping

from ..accuracy import DEFAULT_ACCURACY_MAX, AccuracyModel
from ..config import DEFAULT_SLOT_CAPACITY, GLOBAL_TASK_DISTRIBUTION
from ..domain import (
    FACTORS,
    ClientProfile,
    ContextualFactors,
    Factor,
    PerformanceEstimate,
    QuantizationLevel,
    RoundPlan,
    SensitivityWeights,
    TaskCategory,
    ValidationError,
    validate_distribution,
    validate_weights,
)
from ..planning import GlobalModelState, SlotConfig, aggregate_round, plan_round, select_clients
from ..profiling.builder import build_profile
from ..profiling.extraction import extract_factors, infer_factors
from ..satisfaction import build_reward_penalty, total_penalty, total_reward
from ..store import CaseRecord, CaseStore, HwPerfStore
from ..domain import FeedbackRecord
from .population import SimClient, simulate_interview, spawn_population
from .report import ExperimentReport, RoundSummary, histogram_bins
from .tiers import load_default_tiers

PLANNERS = ("personalized", "unified", "energy_priority")

ENERGY_PRIORITY_MASS = 0.7
FEEDBACK_NOISE_SIGMA = 0.05
DEFAULT_WEIGHT_MEANS = {Factor.ACCURACY: 0.4, Factor.ENERGY: 0.34, Factor.LATENCY: 0.26}


@dataclass(frozen=True)
class ExperimentConfig:
    num_clients: int = 100
    num_rounds: int = 100
    participation: int = 10
    planner: str = "personalized"
    strategy: str = "fedavg"
    seed: int = 42
    weight_means: Mapping[Factor, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHT_MEANS))
    weight_stddev: float = 0.18
    global_dist: Mapping[TaskCategory, float] = field(default_factory=lambda: dict(GLOBAL_TASK_DISTRIBUTION))
    accuracy_kappa: float = 0.02
    accuracy_max: Mapping[TaskCategory, float] = field(default_factory=lambda: dict(DEFAULT_ACCURACY_MAX))
    # Harness knobs beyond the headline setup. The wide merit window makes
    # slot contention resolve by reassignment rather than over-capacity, so
    # the biased strategies trade precision between cohorts instead of
    # inflating everyone.
    slot_capacity: Mapping[QuantizationLevel, int] = field(default_factory=lambda: dict(DEFAULT_SLOT_CAPACITY))
    epsilon: float = 0.6
    beta: float = 1.0
    retrieval_k: int = 5
    mix_concentration: float = 5.0
    vague_prob: float = 0.1

    def __post_init__(self) -> None:
        if self.planner not in PLANNERS:
            raise ValidationError(f"unknown planner {self.planner!r}; expected one of {PLANNERS}")
        if self.strategy not in ("fedavg", "class_equal", "majority_centric"):
            raise ValidationError(f"unknown strategy {self.strategy!r}")
        if not 1 <= self.participation <= self.num_clients:
            raise ValidationError("participation must be in [1, num_clients]")
        if self.num_rounds < 1:
            raise ValidationError("num_rounds must be >= 1")
        object.__setattr__(self, "global_dist", validate_distribution(self.global_dist))

    @property
    def accuracy_model(self) -> AccuracyModel:
        return AccuracyModel(kappa=self.accuracy_kappa, accuracy_max=dict(self.accuracy_max))

    @property
    def slots(self) -> SlotConfig:
        return SlotConfig(capacity=dict(self.slot_capacity))

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        kwargs: dict = {}
        for key in ("num_clients", "num_rounds", "participation", "planner", "strategy", "seed",
                    "weight_stddev", "accuracy_kappa", "epsilon", "beta", "retrieval_k",
                    "mix_concentration", "vague_prob"):
            if key in data:
                kwargs[key] = data[key]
        if "weight_means" in data:
            kwargs["weight_means"] = {Factor.from_label(k): float(v) for k, v in data["weight_means"].items()}
        if "global_dist" in data:
            kwargs["global_dist"] = {TaskCategory.from_label(k): float(v) for k, v in data["global_dist"].items()}
        if "accuracy_max" in data:
            kwargs["accuracy_max"] = {TaskCategory.from_label(k): float(v) for k, v in data["accuracy_max"].items()}
        if "slot_capacity" in data:
            kwargs["slot_capacity"] = {
                QuantizationLevel.from_label(k): int(v) for k, v in data["slot_capacity"].items()
            }
        return cls(**kwargs)


def ground_truth_satisfaction(
    client: SimClient,
    level: QuantizationLevel,
    perf_table: Mapping[QuantizationLevel, PerformanceEstimate],
) -> float:
    """Satisfaction the client's hidden weights assign to a level (C_q = 1)."""
    table = build_reward_penalty(perf_table)
    reward = total_reward(client.true_weights, table, 1.0, level)
    return reward - total_penalty(client.true_weights, table, level)


def override_weights_for_energy(
    weights: SensitivityWeights, energy_mass: float = ENERGY_PRIORITY_MASS
) -> SensitivityWeights:
    """Force most weight onto energy, splitting the rest proportionally."""
    rest = weights[Factor.ACCURACY] + weights[Factor.LATENCY]
    if rest > 0:
        acc = (1.0 - energy_mass) * weights[Factor.ACCURACY] / rest
        lat = (1.0 - energy_mass) * weights[Factor.LATENCY] / rest
    else:
        acc = lat = (1.0 - energy_mass) / 2.0
    return validate_weights({Factor.ACCURACY: acc, Factor.ENERGY: energy_mass, Factor.LATENCY: lat})


def unified_level(client: SimClient) -> QuantizationLevel:
    """The tier's fixed level: one below its maximum, floored at the lowest."""
    levels = client.hardware.available_levels
    return levels[-2] if len(levels) >= 2 else levels[0]


def _capacity_utilization(assignment_histogram: Mapping[QuantizationLevel, int], slots: SlotConfig) -> float:
    if slots.total == 0:
        return 0.0
    served = sum(min(n, slots.capacity.get(q, 0)) for q, n in assignment_histogram.items())
    return min(1.0, served / slots.total)


class _Harness:
    """Mutable state for one experiment run."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.tiers = load_default_tiers()
        self.hwperf = HwPerfStore()
        for record in self.tiers:
            self.hwperf.insert(record)
        self.cases = CaseStore()
        self.population = spawn_population(
            num_clients=config.num_clients,
            seed=config.seed,
            tiers=self.tiers,
            weight_means=config.weight_means,
            weight_stddev=config.weight_stddev,
            global_dist=config.global_dist,
            mix_concentration=config.mix_concentration,
        )
        self.clients = {c.client_id: c for c in self.population}
        self.feedback_rng = random.Random(f"{config.seed}-feedback")
        self._interviews: dict[str, tuple[ContextualFactors, dict[Factor, float]]] = {}
        self._truth_profiles: dict[str, ClientProfile] = {}
        self._perf: dict[str, dict[QuantizationLevel, PerformanceEstimate]] = {}

    def perf_table(self, client: SimClient) -> dict[QuantizationLevel, PerformanceEstimate]:
        if client.client_id not in self._perf:
            self._perf[client.client_id] = self.hwperf.lookup_performance(client.hardware)
        return self._perf[client.client_id]

    def interview(self, client: SimClient) -> tuple[ContextualFactors, dict[Factor, float]]:
        # The transcript is deterministic per client, so extract once and reuse.
        if client.client_id not in self._interviews:
            session = simulate_interview(client, vague_prob=self.config.vague_prob)
            self._interviews[client.client_id] = extract_factors(session.transcript, session.scenario)
        return self._interviews[client.client_id]

    def truth_profile(self, client: SimClient) -> ClientProfile:
        """Profile carrying the client's actual data distribution, for aggregation."""
        if client.client_id not in self._truth_profiles:
            self._truth_profiles[client.client_id] = ClientProfile(
                client_id=client.client_id,
                hardware=client.hardware,
                context=client.true_context,
                inferred=infer_factors(client.true_context),
                estimated_weights=client.true_weights,
                contribution_estimate={q: 1.0 for q in client.hardware.available_levels},
            )
        return self._truth_profiles[client.client_id]

    def planning_profile(self, client: SimClient) -> ClientProfile:
        context, hints = self.interview(client)
        profile = build_profile(
            client.client_id,
            client.hardware,
            context,
            hints,
            case_store=self.cases,
            hwperf_store=self.hwperf,
            strategy=self.config.strategy,
            global_dist=self.config.global_dist,
            beta=self.config.beta,
            k=self.config.retrieval_k,
        )
        if self.config.planner == "energy_priority":
            profile = replace(profile, estimated_weights=override_weights_for_energy(profile.estimated_weights))
        return profile

    def plan(self, round_no: int, selected: list[str]) -> tuple[RoundPlan, dict[str, ClientProfile]]:
        if self.config.planner == "unified":
            assignments = {cid: unified_level(self.clients[cid]) for cid in selected}
            histogram: dict[QuantizationLevel, int] = {}
            for q in assignments.values():
                histogram[q] = histogram.get(q, 0) + 1
            plan = RoundPlan(
                round=round_no,
                assignments=assignments,
                slot_usage=histogram,
                utilization=_capacity_utilization(histogram, self.config.slots),
            )
            return plan, {}
        profiles = {cid: self.planning_profile(self.clients[cid]) for cid in selected}
        plan = plan_round(
            list(profiles.values()),
            {cid: self.perf_table(self.clients[cid]) for cid in selected},
            self.config.slots,
            epsilon=self.config.epsilon,
            round=round_no,
        )
        return plan, profiles

    def record_feedback(self, round_no: int, plan: RoundPlan, profiles: dict[str, ClientProfile]) -> None:
        for cid in sorted(plan.assignments):
            profile = profiles.get(cid)
            if profile is None:
                continue  # unified baseline collects no feedback cases
            client = self.clients[cid]
            level = plan.assignments[cid]
            table = build_reward_penalty(self.perf_table(client))
            ratings = {}
            for f in FACTORS:
                noisy = table.rewards[level][f] + self.feedback_rng.gauss(0.0, FEEDBACK_NOISE_SIGMA)
                ratings[f] = min(1.0, max(0.0, noisy))
            feedback = FeedbackRecord(client_id=cid, round=round_no, level=level, ratings=ratings)
            self.cases.insert(
                CaseRecord(
                    id=0,
                    context=profile.context,
                    level=level,
                    feedback=feedback,
                    inferred_weights=profile.estimated_weights,
                )
            )


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full loop; a pure function of the config, seed included."""
    harness = _Harness(config)
    model = config.accuracy_model
    state = GlobalModelState.initial(model)
    ids = sorted(harness.clients)

    all_satisfaction: list[float] = []
    all_energy: list[float] = []
    series: list[RoundSummary] = []

    for round_no in range(config.num_rounds):
        selected = select_clients(round_no, ids, config.participation)
        plan, profiles = harness.plan(round_no, selected)

        sats = []
        energies = []
        for cid in sorted(plan.assignments):
            client = harness.clients[cid]
            level = plan.assignments[cid]
            perf = harness.perf_table(client)
            sats.append(ground_truth_satisfaction(client, level, perf))
            energies.append(perf[level].relative_energy)

        harness.record_feedback(round_no, plan, profiles)

        truth = {cid: harness.truth_profile(harness.clients[cid]) for cid in plan.assignments}
        quantities = {cid: harness.clients[cid].data_quantity for cid in plan.assignments}
        state = aggregate_round(plan, truth, state, quantities, model)

        all_satisfaction.extend(sats)
        all_energy.extend(energies)
        series.append(
            RoundSummary(
                round=round_no,
                mean_satisfaction=sum(sats) / len(sats),
                mean_relative_energy=sum(energies) / len(energies),
                accuracy=dict(state.accuracy),
                utilization=plan.utilization,
            )
        )

    return ExperimentReport(
        mean_satisfaction=sum(all_satisfaction) / len(all_satisfaction),
        satisfaction_histogram=histogram_bins(all_satisfaction),
        mean_relative_energy=sum(all_energy) / len(all_energy),
        per_class_accuracy=dict(state.accuracy),
        final_class_mass=dict(state.class_mass),
        per_round_series=series,
    )
