"""Reward-penalty scoring of quantization levels.

Per-level rewards and penalties are built as complements of the normalized
performance metrics, so every cell lives in [0, 1] and the satisfaction score
(total reward minus total penalty) is a signed value in [-1, 1] whenever the
contribution multiplier is 1:

    reward_total(q)  = c_q * sum_f w_f * R_f(q)
    penalty_total(q) = sum_f w_f * P_f(q)
    satisfaction(q)  = reward_total(q) - penalty_total(q)

The planner picks the level with the highest satisfaction, breaking ties
toward the lower bit width (cheaper in energy).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .domain import (
    CATEGORIES,
    FACTORS,
    Factor,
    InferredFactors,
    PerformanceEstimate,
    QuantizationLevel,
    SensitivityWeights,
    TaskCategory,
    ValidationError,
)

STRATEGIES = ("fedavg", "class_equal", "majority_centric")
DEFAULT_BETA = 1.0


@dataclass(frozen=True)
class RewardPenaltyTable:
    """Per (level, factor) reward and penalty cells, each in [0, 1]."""

    rewards: Mapping[QuantizationLevel, Mapping[Factor, float]]
    penalties: Mapping[QuantizationLevel, Mapping[Factor, float]]

    def __post_init__(self) -> None:
        if set(self.rewards) != set(self.penalties):
            raise ValidationError("rewards and penalties must cover the same levels")
        for name, table in (("reward", self.rewards), ("penalty", self.penalties)):
            for q, row in table.items():
                for f in FACTORS:
                    if f not in row:
                        raise ValidationError(f"{name} row for {q.name} missing factor {f.value}")
                    v = row[f]
                    if not 0.0 <= v <= 1.0:
                        raise ValidationError(f"{name}[{q.name}][{f.value}] must be in [0,1], got {v}")
        object.__setattr__(self, "rewards", {q: dict(row) for q, row in self.rewards.items()})
        object.__setattr__(self, "penalties", {q: dict(row) for q, row in self.penalties.items()})

    @property
    def levels(self) -> tuple[QuantizationLevel, ...]:
        return tuple(sorted(self.rewards, key=lambda q: q.bit_width))


@dataclass(frozen=True)
class LevelScore:
    """Scoring breakdown for one level; satisfaction is exactly reward - penalty."""

    level: QuantizationLevel
    reward_total: float
    penalty_total: float
    satisfaction: float

    def __post_init__(self) -> None:
        if self.satisfaction != self.reward_total - self.penalty_total:
            raise ValidationError("satisfaction must equal reward_total - penalty_total")


def build_reward_penalty(
    perf: Mapping[QuantizationLevel, PerformanceEstimate],
) -> RewardPenaltyTable:
    """Turn performance estimates into reward/penalty cells.

    Accuracy is rewarded directly; energy and latency are rewarded by how far
    they sit below the tier maximum. Penalties are the complements, so
    R_f(q) + P_f(q) = 1 for every cell.
    """
    if not perf:
        raise ValidationError("performance table is empty")
    rewards: dict[QuantizationLevel, dict[Factor, float]] = {}
    penalties: dict[QuantizationLevel, dict[Factor, float]] = {}
    for q, est in perf.items():
        row = {
            Factor.ACCURACY: est.accuracy,
            Factor.ENERGY: 1.0 - est.relative_energy,
            Factor.LATENCY: 1.0 - est.latency_norm,
        }
        rewards[q] = row
        penalties[q] = {f: 1.0 - v for f, v in row.items()}
    return RewardPenaltyTable(rewards=rewards, penalties=penalties)


def _require_level(table: Mapping[QuantizationLevel, Mapping[Factor, float]], q: QuantizationLevel) -> None:
    if q not in table:
        raise ValidationError(f"level {q.name} not present in table (has {[x.name for x in table]})")


def total_reward(
    weights: SensitivityWeights,
    table: RewardPenaltyTable,
    c_q: float,
    q: QuantizationLevel,
) -> float:
    """Contribution-scaled weighted reward for level ``q``."""
    if c_q <= 0:
        raise ValidationError(f"contribution multiplier must be > 0, got {c_q}")
    _require_level(table.rewards, q)
    return c_q * sum(weights[f] * table.rewards[q][f] for f in FACTORS)


def total_penalty(
    weights: SensitivityWeights,
    table: RewardPenaltyTable,
    q: QuantizationLevel,
) -> float:
    """Weighted penalty for level ``q`` (no contribution scaling)."""
    _require_level(table.penalties, q)
    return sum(weights[f] * table.penalties[q][f] for f in FACTORS)


def satisfaction_score(
    weights: SensitivityWeights,
    table: RewardPenaltyTable,
    c: Mapping[QuantizationLevel, float],
    q: QuantizationLevel,
) -> LevelScore:
    """Full scoring breakdown for one level."""
    if q not in c:
        raise ValidationError(f"no contribution multiplier for level {q.name}")
    reward = total_reward(weights, table, c[q], q)
    penalty = total_penalty(weights, table, q)
    return LevelScore(level=q, reward_total=reward, penalty_total=penalty, satisfaction=reward - penalty)


def optimal_level(
    weights: SensitivityWeights,
    table: RewardPenaltyTable,
    c: Mapping[QuantizationLevel, float],
    candidates: Iterable[QuantizationLevel],
) -> QuantizationLevel:
    """Candidate with the highest satisfaction; ties go to the lower bit width."""
    ordered = sorted(set(candidates), key=lambda q: q.bit_width)
    if not ordered:
        raise ValidationError("candidate set is empty")
    best = None
    best_score = -float("inf")
    for q in ordered:
        score = satisfaction_score(weights, table, c, q).satisfaction
        if score > best_score:
            best, best_score = q, score
    assert best is not None
    return best


def contribution_multiplier(
    strategy: str,
    inferred: InferredFactors,
    global_dist: Mapping[TaskCategory, float],
    level: QuantizationLevel,
    beta: float = DEFAULT_BETA,
) -> float:
    """Server-side contribution multiplier C_q for one client at one level.

    ``fedavg`` treats every sample equally (always 1.0). The biased strategies
    scale with how much of the client's data falls in globally rare
    (``class_equal``) or globally common (``majority_centric``) classes, and
    grow with bit width so the favored cohort is pulled toward higher
    precision.
    """
    if strategy == "fedavg":
        return 1.0
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    dist = inferred.data_distribution
    if strategy == "class_equal":
        alignment = sum(dist[c] * (1.0 - global_dist[c]) for c in CATEGORIES)
    else:
        alignment = sum(dist[c] * global_dist[c] for c in CATEGORIES)
    return 1.0 + beta * alignment * (level.bit_width / 32.0)
