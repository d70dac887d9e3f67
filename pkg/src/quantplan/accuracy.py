"""Saturating per-class accuracy proxy.

Stands in for trained-model accuracy at desk scale: each class's accuracy
rises toward a ceiling as effective contribution mass accumulates,

    accuracy[c] = max[c] * (1 - exp(-kappa * mass[c]))

so doubling mass never hurts and early mass matters most.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .domain import CATEGORIES, TaskCategory, ValidationError

DEFAULT_KAPPA = 0.02
DEFAULT_ACCURACY_MAX = {c: 0.9 for c in CATEGORIES}


@dataclass(frozen=True)
class AccuracyModel:
    kappa: float = DEFAULT_KAPPA
    accuracy_max: Mapping[TaskCategory, float] = field(default_factory=lambda: dict(DEFAULT_ACCURACY_MAX))

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValidationError(f"kappa must be > 0, got {self.kappa}")
        for c in CATEGORIES:
            v = self.accuracy_max.get(c)
            if v is None or not 0.0 <= v <= 1.0:
                raise ValidationError(f"accuracy_max[{c.value}] must be in [0,1], got {v}")
        object.__setattr__(self, "accuracy_max", {c: float(self.accuracy_max[c]) for c in CATEGORIES})


def accuracy_proxy(
    class_mass: Mapping[TaskCategory, float],
    model: AccuracyModel,
) -> dict[TaskCategory, float]:
    """Per-class accuracy for the accumulated contribution mass."""
    out: dict[TaskCategory, float] = {}
    for c in CATEGORIES:
        mass = class_mass.get(c, 0.0)
        if mass < 0:
            raise ValidationError(f"class_mass[{c.value}] must be >= 0, got {mass}")
        out[c] = model.accuracy_max[c] * (1.0 - math.exp(-model.kappa * mass))
    return out
