"""Synthetic client population with hidden ground truth.

Each simulated client gets a hardware tier, Gaussian-drawn sensitivity
weights, and a usage context whose task mix is a Dirichlet perturbation
around the global distribution. The interview simulator answers the scripted
questions with phrases the rule-based extractor maps straight back to the
truth, except for occasional vague replies.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..domain import (
    CATEGORIES,
    FACTORS,
    ContextualFactors,
    Factor,
    HardwareSpec,
    SensitivityWeights,
    TaskCategory,
    validate_weights,
)
from ..profiling.extraction import infer_factors
from ..profiling.interview import InterviewSession, interview_next, new_session
from ..store import HwPerfRecord

WEIGHT_CLIP = (0.01, 1.0)
VAGUE_REPLY = "Not sure, whatever works."

# Categorical priors for the hidden contexts; fixture values, not measured.
LOCATION_PRIOR = (("bedroom", 0.30), ("living_room", 0.30), ("kitchen", 0.15), ("office", 0.15), ("other", 0.10))
TIME_PRIOR = (("daytime", 0.40), ("nighttime", 0.35), ("mixed", 0.25))
FREQUENCY_PRIOR = (("low", 0.30), ("medium", 0.40), ("high", 0.30))
POWER_PRIOR = (("mains", 0.50), ("battery_high", 0.30), ("battery_low", 0.20))

# Inverse of the extractor's keyword tables: each phrase maps back to its label.
LOCATION_PHRASES = {
    "bedroom": "It lives in the bedroom.",
    "living_room": "It's set up in the living room.",
    "kitchen": "We keep it in the kitchen.",
    "office": "It's on my desk in the office.",
    "other": "Somewhere else, out in the hallway.",
}
TIME_PHRASES = {
    "daytime": "Mostly during the day.",
    "nighttime": "Usually in the evening or at night.",
    "mixed": "A mix of daytime and nighttime.",
}
FREQUENCY_PHRASES = {
    "low": "Just a few times a week.",
    "medium": "About daily, a few times a day.",
    "high": "Constantly, many times an hour.",
}
FACTOR_PHRASES = {Factor.ACCURACY: "accuracy", Factor.ENERGY: "battery life", Factor.LATENCY: "speed"}


@dataclass(frozen=True)
class SimClient:
    """One simulated user: observable hardware plus hidden preferences."""

    client_id: str
    hardware: HardwareSpec
    true_context: ContextualFactors
    true_weights: SensitivityWeights
    data_quantity: float
    noise_seed: int


def _draw_categorical(rng: random.Random, prior: Sequence[tuple[str, float]]) -> str:
    roll = rng.random()
    acc = 0.0
    for label, p in prior:
        acc += p
        if roll < acc:
            return label
    return prior[-1][0]


def _draw_weights(rng: random.Random, means: Mapping[Factor, float], stddev: float) -> SensitivityWeights:
    raw = {}
    for f in FACTORS:
        v = rng.gauss(means[f], stddev)
        raw[f] = min(WEIGHT_CLIP[1], max(WEIGHT_CLIP[0], v))
    return validate_weights(raw)


def _draw_task_mix(
    rng: random.Random, global_dist: Mapping[TaskCategory, float], concentration: float
) -> dict[TaskCategory, float]:
    # Dirichlet(concentration * global share) via normalized gamma draws.
    draws = {c: rng.gammavariate(concentration * global_dist[c], 1.0) for c in CATEGORIES}
    total = sum(draws.values())
    return {c: draws[c] / total for c in CATEGORIES}


def spawn_population(
    num_clients: int,
    seed: int,
    tiers: Sequence[HwPerfRecord],
    weight_means: Mapping[Factor, float],
    weight_stddev: float,
    global_dist: Mapping[TaskCategory, float],
    mix_concentration: float = 5.0,
) -> list[SimClient]:
    """Generate the client population deterministically from the seed."""
    rng = random.Random(seed)
    clients = []
    for i in range(num_clients):
        tier = tiers[rng.randrange(len(tiers))]
        context = ContextualFactors(
            device_location=_draw_categorical(rng, LOCATION_PRIOR),
            interaction_time=_draw_categorical(rng, TIME_PRIOR),
            interaction_frequency=_draw_categorical(rng, FREQUENCY_PRIOR),
            task_type_mix=_draw_task_mix(rng, global_dist, mix_concentration),
        )
        hardware = HardwareSpec(
            processor_class=tier.hardware.processor_class,
            ram_mb=tier.hardware.ram_mb,
            power_state=_draw_categorical(rng, POWER_PRIOR),
            available_levels=tier.hardware.available_levels,
        )
        quantity = 2.0 if infer_factors(context).data_quantity == "high" else 1.0
        clients.append(
            SimClient(
                client_id=f"c{i:05d}",
                hardware=hardware,
                true_context=context,
                true_weights=_draw_weights(rng, weight_means, weight_stddev),
                data_quantity=quantity,
                noise_seed=rng.randrange(2**32),
            )
        )
    return clients


def _task_phrase(mix: Mapping[TaskCategory, float]) -> str:
    return (
        f"Mostly entertainment {mix[TaskCategory.ENTERTAINMENT]!r}, "
        f"smart home {mix[TaskCategory.SMART_HOME]!r}, "
        f"general queries {mix[TaskCategory.GENERAL_QUERY]!r}, "
        f"personal requests {mix[TaskCategory.PERSONAL_REQUEST]!r}."
    )


def _ranking_phrase(weights: SensitivityWeights) -> str:
    ordered = sorted(FACTORS, key=lambda f: (-weights[f], FACTORS.index(f)))
    names = [FACTOR_PHRASES[f] for f in ordered]
    return f"{names[0].capitalize()} first, then {names[1]}, and {names[2]} last."


def scripted_replies(client: SimClient) -> dict[str, str]:
    """Canonical per-slot answers that extract back to the client's truth."""
    ctx = client.true_context
    return {
        "location": LOCATION_PHRASES[ctx.device_location],
        "time": TIME_PHRASES[ctx.interaction_time],
        "frequency": FREQUENCY_PHRASES[ctx.interaction_frequency],
        "tasks": _task_phrase(ctx.task_type_mix),
        "ranking": _ranking_phrase(client.true_weights),
    }


def simulate_interview(client: SimClient, vague_prob: float = 0.1) -> InterviewSession:
    """Run a full initialization interview with generated user replies.

    Each slot independently turns vague with probability ``vague_prob`` (the
    extractor then falls back to its default label). Deterministic per client:
    the reply noise is drawn from the client's own seed.
    """
    rng = random.Random(client.noise_seed)
    replies = scripted_replies(client)
    session = new_session(client.client_id, "initialization")
    interview_next(session)
    for slot in ("location", "time", "frequency", "tasks", "ranking"):
        text = VAGUE_REPLY if rng.random() < vague_prob else replies[slot]
        interview_next(session, text)
    assert session.done
    return session
