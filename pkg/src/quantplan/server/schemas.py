"""Pydantic request/response models for the REST surface.

Request bodies validate structure here and convert into domain types; domain
payloads (profiles, plans, metrics) go out in their canonical JSON forms.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, field_validator

from ..domain import (
    FACTORS,
    Factor,
    HardwareSpec,
    QuantizationLevel,
    ValidationError,
)
from ..profiling.interview import SCENARIOS


class HardwareSpecModel(BaseModel):
    processor_class: str
    ram_mb: int = Field(gt=0)
    power_state: str
    available_levels: list[str]

    def to_domain(self) -> HardwareSpec:
        return HardwareSpec.from_dict(self.model_dump())


class RegisterRequest(BaseModel):
    hardware: HardwareSpecModel


class RegisterResponse(BaseModel):
    client_id: str


class InterviewStartRequest(BaseModel):
    scenario: str
    hardware: Optional[HardwareSpecModel] = None  # replacement spec for hardware_change

    @field_validator("scenario")
    @classmethod
    def _known_scenario(cls, v: str) -> str:
        if v not in SCENARIOS:
            raise ValueError(f"scenario must be one of {list(SCENARIOS)}")
        return v


class InterviewStartResponse(BaseModel):
    session_id: str
    agent_message: str


class MessageRequest(BaseModel):
    text: str


class MessageResponse(BaseModel):
    agent_message: str
    done: bool


class FeedbackRequest(BaseModel):
    client_id: Optional[str] = None  # defaults to the path client
    round: int = Field(ge=0)
    level: str
    ratings: dict[str, float]
    free_text: str = ""

    @field_validator("level")
    @classmethod
    def _known_level(cls, v: str) -> str:
        try:
            QuantizationLevel.from_label(v)
        except ValidationError as exc:
            raise ValueError(str(exc)) from exc
        return v

    @field_validator("ratings")
    @classmethod
    def _complete_ratings(cls, v: dict[str, float]) -> dict[str, float]:
        labels = {f.value for f in FACTORS}
        if set(v) != labels:
            raise ValueError(f"ratings must contain exactly {sorted(labels)}")
        for name, value in v.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"rating for {name} must be in [0,1]")
        return v

    def to_domain(self, path_client_id: str):
        from ..domain import FeedbackRecord

        return FeedbackRecord(
            client_id=self.client_id or path_client_id,
            round=self.round,
            level=QuantizationLevel.from_label(self.level),
            ratings={Factor.from_label(k): v for k, v in self.ratings.items()},
            free_text=self.free_text,
        )


class FeedbackResponse(BaseModel):
    case_id: int


class PlanRequest(BaseModel):
    round: int = Field(ge=0)
