"""Turning transcripts into contextual factors and preference hints.

The rule-based path maps each answer to a label through keyword tables and is
fully deterministic; it doubles as the fallback when the optional LLM
extractor is configured but returns something that fails validation. Context
inference applies the fixed location/time/frequency rules to derive noise
level and data quantity.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..domain import (
    CATEGORIES,
    FACTORS,
    ContextualFactors,
    Factor,
    InferredFactors,
    TaskCategory,
    ValidationError,
    uniform_mix,
    validate_distribution,
)
from .interview import SCENARIO_SLOTS, _CONTEXT_SLOTS
from .llm import LlmClientConfig, LlmError, llm_complete


class ExtractionError(ValueError):
    """The transcript does not contain the answers extraction needs."""


RANK_WEIGHTS = (0.5, 0.3, 0.2)

# First matching phrase wins; order matters where phrasings overlap
# ("a mix of day and night" must hit the mixed row, not day or night).
LOCATION_KEYWORDS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("bedroom", ("bedroom", "bed room")),
    ("living_room", ("living room", "livingroom", "lounge")),
    ("kitchen", ("kitchen",)),
    ("office", ("office", "study", "workspace")),
    ("other", ("hallway", "garage", "bathroom", "somewhere else")),
)

TIME_KEYWORDS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("mixed", ("mix", "both", "varies", "all times", "throughout the day and night")),
    ("nighttime", ("night", "evening")),
    ("daytime", ("day", "morning", "afternoon")),
)

FREQUENCY_KEYWORDS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("high", ("constantly", "all day", "hourly", "many times", "very often", "heavily")),
    ("low", ("few times a week", "rarely", "occasionally", "once in a while", "not much", "now and then")),
    ("medium", ("few times a day", "daily", "every day", "most days", "moderately")),
)

CATEGORY_KEYWORDS: dict[TaskCategory, tuple[str, ...]] = {
    TaskCategory.ENTERTAINMENT: ("entertainment", "music", "movie"),
    TaskCategory.SMART_HOME: ("smart home", "smart-home", "lights", "thermostat"),
    TaskCategory.GENERAL_QUERY: ("general quer", "general question", "weather", "search"),
    TaskCategory.PERSONAL_REQUEST: ("personal request", "reminder", "calendar"),
}

FACTOR_KEYWORDS: dict[Factor, tuple[str, ...]] = {
    Factor.ACCURACY: ("accura", "precis", "correct"),
    Factor.ENERGY: ("battery", "energy", "power"),
    Factor.LATENCY: ("speed", "fast", "latency", "response time", "quick", "snappy"),
}

_NUMBER_AFTER = re.compile(r"[^0-9]{0,24}?([0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)\s*%?")


@dataclass(frozen=True)
class ExtractionDefaults:
    """Labels used when an answer is too vague to match any keyword."""

    location: str = "other"
    time: str = "mixed"
    frequency: str = "medium"
    task_mix: Mapping[TaskCategory, float] = field(default_factory=uniform_mix)


DEFAULTS = ExtractionDefaults()

EXTRACTION_PROMPT = (
    "You read an interview transcript about how someone uses a voice assistant. "
    "Reply with a single JSON object and nothing else, with keys: "
    '"device_location" (bedroom|living_room|kitchen|office|other), '
    '"interaction_time" (daytime|nighttime|mixed), '
    '"interaction_frequency" (low|medium|high), '
    '"task_type_mix" (object mapping entertainment, smart_home, general_query, '
    "personal_request to non-negative shares), and "
    '"weight_hints" (object mapping accuracy, energy, latency to non-negative numbers).'
)


def _match_label(answer: str, table: Sequence[tuple[str, tuple[str, ...]]], default: str) -> str:
    text = answer.lower()
    for label, keywords in table:
        if any(kw in text for kw in keywords):
            return label
    return default


def _parse_task_mix(answer: str, defaults: ExtractionDefaults) -> dict[TaskCategory, float]:
    text = answer.lower()
    numeric: dict[TaskCategory, float] = {}
    mentioned: list[TaskCategory] = []
    for cat in CATEGORIES:
        for kw in CATEGORY_KEYWORDS[cat]:
            pos = text.find(kw)
            if pos < 0:
                continue
            mentioned.append(cat)
            m = _NUMBER_AFTER.match(text, pos + len(kw))
            if m:
                numeric[cat] = float(m.group(1))
            break
    if numeric and sum(numeric.values()) > 0:
        return validate_distribution({c: numeric.get(c, 0.0) for c in CATEGORIES})
    if mentioned:
        return validate_distribution({c: (1.0 if c in mentioned else 0.0) for c in CATEGORIES})
    return dict(defaults.task_mix)


def _parse_ranking(answer: str) -> dict[Factor, float]:
    text = answer.lower()
    positions: dict[Factor, int] = {}
    for f in FACTORS:
        hits = [text.find(kw) for kw in FACTOR_KEYWORDS[f] if kw in text]
        if hits:
            positions[f] = min(hits)
    ordered = sorted(positions, key=lambda f: positions[f])
    ordered += [f for f in FACTORS if f not in positions]
    if not positions:
        return {f: 1.0 / 3.0 for f in FACTORS}
    return {f: RANK_WEIGHTS[i] for i, f in enumerate(ordered)}


def _rule_based(
    answers: Mapping[str, str], defaults: ExtractionDefaults
) -> tuple[ContextualFactors, dict[Factor, float]]:
    context = ContextualFactors(
        device_location=_match_label(answers["location"], LOCATION_KEYWORDS, defaults.location),
        interaction_time=_match_label(answers["time"], TIME_KEYWORDS, defaults.time),
        interaction_frequency=_match_label(answers["frequency"], FREQUENCY_KEYWORDS, defaults.frequency),
        task_type_mix=_parse_task_mix(answers["tasks"], defaults),
    )
    return context, _parse_ranking(answers["ranking"])


def _llm_extract(
    transcript: Sequence[tuple[str, str]], llm: LlmClientConfig
) -> tuple[ContextualFactors, dict[Factor, float]]:
    convo = "\n".join(f"{role}: {text}" for role, text in transcript)
    attempts = llm.max_retries + 1
    last_error: Exception | None = None
    for _ in range(attempts):
        try:
            raw = llm_complete(llm, EXTRACTION_PROMPT, [{"role": "user", "content": convo}])
            data = json.loads(raw)
            context = ContextualFactors(
                device_location=data["device_location"],
                interaction_time=data["interaction_time"],
                interaction_frequency=data["interaction_frequency"],
                task_type_mix=validate_distribution(
                    {TaskCategory.from_label(k): float(v) for k, v in data["task_type_mix"].items()}
                ),
            )
            hints = {Factor.from_label(k): float(v) for k, v in data["weight_hints"].items()}
            if any(v < 0 for v in hints.values()):
                raise ValidationError("weight hints must be non-negative")
            return context, {f: hints.get(f, 0.0) for f in FACTORS}
        except (LlmError, ValidationError, ValueError, KeyError, TypeError) as exc:
            last_error = exc
    raise ExtractionError(f"LLM extraction failed after {attempts} attempts: {last_error}")


def extract_factors(
    transcript: Sequence[tuple[str, str]],
    scenario: str = "initialization",
    llm: Optional[LlmClientConfig] = None,
    defaults: ExtractionDefaults = DEFAULTS,
) -> tuple[ContextualFactors, dict[Factor, float]]:
    """Extract (context, weight hints) from a completed interview transcript.

    Uses the LLM extractor when one is configured, falling back to the
    rule-based path if its output never validates. Raises ``ExtractionError``
    when the transcript lacks the context answers (for example a
    pre_aggregation transcript, which has none).
    """
    slots = SCENARIO_SLOTS.get(scenario)
    if slots is None:
        raise ValidationError(f"unknown scenario {scenario!r}")
    answers = [text for role, text in transcript if role == "user"]
    by_slot = dict(zip(slots, answers))
    missing = [s for s in _CONTEXT_SLOTS if s not in by_slot]
    if missing:
        raise ExtractionError(f"transcript missing answers for slots: {missing}")

    if llm is not None and llm.endpoint_url:
        try:
            return _llm_extract(transcript, llm)
        except ExtractionError:
            pass  # fall through to the deterministic path

    return _rule_based(by_slot, defaults)


def infer_factors(context: ContextualFactors) -> InferredFactors:
    """Derive data properties from context.

    Noisy rooms (living room, kitchen) and daytime use imply high input noise;
    heavy or daytime use implies high data quantity; the task mix carries over
    as the class distribution.
    """
    noisy_place = context.device_location in ("living_room", "kitchen")
    noise = "high" if noisy_place or context.interaction_time == "daytime" else "low"
    busy = context.interaction_frequency == "high" or context.interaction_time == "daytime"
    quantity = "high" if busy else "low"
    return InferredFactors(
        noise_level=noise,
        data_quantity=quantity,
        data_distribution=dict(context.task_type_mix),
    )
