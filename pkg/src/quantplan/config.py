"""Service configuration: one JSON file configures stores, planning, and the
optional LLM extractor."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .accuracy import DEFAULT_ACCURACY_MAX, DEFAULT_KAPPA, AccuracyModel
from .domain import (
    CATEGORIES,
    QuantizationLevel,
    TaskCategory,
    ValidationError,
    validate_distribution,
)
from .planning import DEFAULT_EPSILON, SlotConfig
from .profiling.llm import LlmClientConfig
from .satisfaction import DEFAULT_BETA, STRATEGIES

#: Global task-class shares used as the default planning prior.
GLOBAL_TASK_DISTRIBUTION: dict[TaskCategory, float] = {
    TaskCategory.ENTERTAINMENT: 0.327,
    TaskCategory.SMART_HOME: 0.160,
    TaskCategory.GENERAL_QUERY: 0.319,
    TaskCategory.PERSONAL_REQUEST: 0.194,
}

# INT4 capacity covers full participation so displaced clients always have a
# slot; the scarce high-precision slots are the contended resource.
DEFAULT_SLOT_CAPACITY: dict[QuantizationLevel, int] = {
    QuantizationLevel.INT4: 10,
    QuantizationLevel.INT8: 2,
    QuantizationLevel.FP16: 1,
    QuantizationLevel.FP32: 1,
}


@dataclass(frozen=True)
class AppConfig:
    """Everything the planning server (and thin CLI) needs."""

    data_dir: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000
    slots: SlotConfig = field(default_factory=lambda: SlotConfig(capacity=dict(DEFAULT_SLOT_CAPACITY)))
    epsilon: float = DEFAULT_EPSILON
    retrieval_k: int = 5
    strategy: str = "fedavg"
    beta: float = DEFAULT_BETA
    participation: int = 10
    global_dist: Mapping[TaskCategory, float] = field(
        default_factory=lambda: dict(GLOBAL_TASK_DISTRIBUTION)
    )
    accuracy_kappa: float = DEFAULT_KAPPA
    accuracy_max: Mapping[TaskCategory, float] = field(
        default_factory=lambda: dict(DEFAULT_ACCURACY_MAX)
    )
    llm: LlmClientConfig = field(default_factory=LlmClientConfig.from_env)
    seed_default_tiers: bool = True

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.retrieval_k < 1:
            raise ValidationError(f"retrieval_k must be >= 1, got {self.retrieval_k}")
        if self.participation < 1:
            raise ValidationError(f"participation must be >= 1, got {self.participation}")
        object.__setattr__(self, "global_dist", validate_distribution(self.global_dist))

    @property
    def accuracy_model(self) -> AccuracyModel:
        return AccuracyModel(kappa=self.accuracy_kappa, accuracy_max=dict(self.accuracy_max))


def _parse_category_map(raw: Mapping[str, float]) -> dict[TaskCategory, float]:
    return {TaskCategory.from_label(k): float(v) for k, v in raw.items()}


def config_from_dict(data: Mapping) -> AppConfig:
    kwargs: dict = {}
    for key in ("data_dir", "host", "port", "epsilon", "retrieval_k", "strategy",
                "beta", "participation", "accuracy_kappa", "seed_default_tiers"):
        if key in data:
            kwargs[key] = data[key]
    if "slot_capacity" in data:
        kwargs["slots"] = SlotConfig(
            capacity={QuantizationLevel.from_label(k): int(v) for k, v in data["slot_capacity"].items()}
        )
    if "global_dist" in data:
        kwargs["global_dist"] = _parse_category_map(data["global_dist"])
    if "accuracy_max" in data:
        kwargs["accuracy_max"] = {
            c: float(data["accuracy_max"].get(c.value, DEFAULT_ACCURACY_MAX[c])) for c in CATEGORIES
        }
    if "llm" in data:
        base = LlmClientConfig.from_env()
        raw = data["llm"]
        kwargs["llm"] = LlmClientConfig(
            endpoint_url=raw.get("endpoint_url", base.endpoint_url),
            model_name=raw.get("model_name", base.model_name),
            timeout_ms=int(raw.get("timeout_ms", base.timeout_ms)),
            max_retries=int(raw.get("max_retries", base.max_retries)),
        )
    return AppConfig(**kwargs)


def load_config(path: str | Path) -> AppConfig:
    """Load an AppConfig from a JSON file; missing keys fall back to defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
