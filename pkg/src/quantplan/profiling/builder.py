"""Profile assembly: the six-step pipeline from hardware spec to ClientProfile.

Steps: accept the hardware spec, look up its performance table, take the
interview's context and weight hints, retrieve similar historical cases, blend
the hints with the retrieved weight estimates, and attach per-level
contribution multipliers for the configured strategy.
"""

from __future__ import annotations

from typing import Mapping, Optional

from ..domain import (
    FACTORS,
    ClientProfile,
    ContextualFactors,
    Factor,
    HardwareSpec,
    SensitivityWeights,
    TaskCategory,
    ValidationError,
    uniform_weights,
    validate_weights,
)
from ..satisfaction import DEFAULT_BETA, contribution_multiplier
from ..store import CaseStore, HwPerfStore, NoPriorError, estimate_weights_from_cases
from .extraction import infer_factors

DEFAULT_RETRIEVAL_K = 5
HINT_BLEND = 0.5  # share of the final estimate taken from interview hints


def build_profile(
    client_id: str,
    hw: HardwareSpec,
    context: ContextualFactors,
    weight_hints: Optional[Mapping[Factor, float]],
    case_store: CaseStore,
    hwperf_store: HwPerfStore,
    strategy: str = "fedavg",
    global_dist: Optional[Mapping[TaskCategory, float]] = None,
    beta: float = DEFAULT_BETA,
    k: int = DEFAULT_RETRIEVAL_K,
) -> ClientProfile:
    """Assemble a complete ClientProfile.

    Fails if the hardware-performance lookup fails (a profile is unusable
    without it). Falls back from retrieved-case weights to the interview
    hints, and from unusable hints to uniform weights.
    """
    hwperf_store.lookup_performance(hw)  # step 2; raises if no tier matches

    hint_weights = estimated_weights_or_uniform(weight_hints)
    cases = case_store.retrieve_similar(context, k)
    try:
        case_weights = estimate_weights_from_cases(cases)
        blended = {
            f: HINT_BLEND * hint_weights[f] + (1.0 - HINT_BLEND) * case_weights[f] for f in FACTORS
        }
        estimated = validate_weights(blended)
    except NoPriorError:
        estimated = hint_weights

    inferred = infer_factors(context)
    if global_dist is None:
        global_dist = dict(inferred.data_distribution)
    contribution = {
        q: contribution_multiplier(strategy, inferred, global_dist, q, beta)
        for q in hw.available_levels
    }
    return ClientProfile(
        client_id=client_id,
        hardware=hw,
        context=context,
        inferred=inferred,
        estimated_weights=estimated,
        contribution_estimate=contribution,
    )


def estimated_weights_or_uniform(weight_hints: Optional[Mapping[Factor, float]]) -> SensitivityWeights:
    """Normalize hints, tolerating degenerate input."""
    try:
        return validate_weights(weight_hints or {})
    except ValidationError:
        return uniform_weights()
