"""Scripted interview state machines.

Three scenarios, each a fixed question script: ``initialization`` collects
the full usage context and a priority ranking, ``pre_aggregation`` collects
per-factor satisfaction plus any context change, and ``hardware_change``
confirms the new spec and re-collects the context. A session walks its
script one question per user reply and is done right after the final answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..domain import ContextualFactors, Factor, ValidationError


class SessionFinishedError(RuntimeError):
    """A reply arrived for a session that already completed its script."""


# Slot order doubles as the state-machine position sequence.
_CONTEXT_SLOTS = ("location", "time", "frequency", "tasks", "ranking")

SCENARIO_SLOTS: dict[str, tuple[str, ...]] = {
    "initialization": _CONTEXT_SLOTS,
    "pre_aggregation": ("rate_accuracy", "rate_energy", "rate_latency", "context_change"),
    "hardware_change": ("confirm_spec",) + _CONTEXT_SLOTS,
}

SCENARIOS = tuple(SCENARIO_SLOTS)

QUESTIONS: dict[str, str] = {
    "location": (
        "Where does the device live? For example the bedroom, living room, "
        "kitchen, office, or somewhere else."
    ),
    "time": "When do you mostly interact with it: daytime, nighttime, or a mix of both?",
    "frequency": "How often do you expect to use it? A few times a week, daily, or constantly?",
    "tasks": (
        "What will you mostly use it for: entertainment, smart home control, "
        "general questions, or personal requests? Rough shares are welcome."
    ),
    "ranking": (
        "Rank what matters most to you about how it performs: "
        "response accuracy, speed, or battery and energy use."
    ),
    "rate_accuracy": "How happy were you with the accuracy of recent responses, from 0 to 10?",
    "rate_energy": "How happy were you with battery and energy use recently, from 0 to 10?",
    "rate_latency": "How happy were you with the response speed recently, from 0 to 10?",
    "context_change": "Has anything about where or how you use the device changed since last time?",
    "confirm_spec": "Your device hardware looks different. Can you confirm the new processor and memory?",
}

CLOSING_MESSAGE = "Thanks, that's everything I need for now."

RATING_SLOT_FACTORS = {
    "rate_accuracy": Factor.ACCURACY,
    "rate_energy": Factor.ENERGY,
    "rate_latency": Factor.LATENCY,
}


@dataclass
class InterviewSession:
    """One in-flight interview; mutated only through ``interview_next``."""

    client_id: str
    scenario: str
    transcript: list[tuple[str, str]] = field(default_factory=list)
    state: str = "start"
    extracted: Optional[ContextualFactors] = None
    weight_hints: Optional[dict[Factor, float]] = None

    @property
    def done(self) -> bool:
        return self.state == "done"

    def user_answers(self) -> list[str]:
        return [text for role, text in self.transcript if role == "user"]

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "scenario": self.scenario,
            "transcript": [{"role": role, "text": text} for role, text in self.transcript],
            "state": self.state,
        }


def new_session(client_id: str, scenario: str) -> InterviewSession:
    if scenario not in SCENARIO_SLOTS:
        raise ValidationError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    return InterviewSession(client_id=client_id, scenario=scenario)


def interview_next(session: InterviewSession, user_reply: Optional[str] = None) -> tuple[str, bool]:
    """Advance the session by one turn and return (agent message, done).

    The first call (no reply) asks the first question; each later call records
    the reply and asks the next question, closing the script after the final
    answer.
    """
    slots = SCENARIO_SLOTS[session.scenario]
    if session.done:
        raise SessionFinishedError(f"session for {session.client_id} already finished")

    if session.state == "start":
        if user_reply is not None:
            raise ValidationError("first turn takes no user reply")
        question = QUESTIONS[slots[0]]
        session.transcript.append(("agent", question))
        session.state = f"ask_{slots[0]}"
        return question, False

    if user_reply is None:
        raise ValidationError("a user reply is required after the first turn")
    session.transcript.append(("user", user_reply))

    current = session.state.removeprefix("ask_")
    idx = slots.index(current)
    if idx + 1 < len(slots):
        question = QUESTIONS[slots[idx + 1]]
        session.transcript.append(("agent", question))
        session.state = f"ask_{slots[idx + 1]}"
        return question, False

    session.transcript.append(("agent", CLOSING_MESSAGE))
    session.state = "done"
    return CLOSING_MESSAGE, True
