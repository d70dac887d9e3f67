"""Interview, extraction, and profile-assembly stack."""

from .interview import (
    InterviewSession,
    SCENARIOS,
    SessionFinishedError,
    interview_next,
    new_session,
)
from .extraction import ExtractionError, extract_factors, infer_factors
from .builder import build_profile
from .llm import (
    LlmClientConfig,
    LlmConfigError,
    LlmProtocolError,
    LlmTransportError,
    llm_complete,
)

__all__ = [
    "InterviewSession",
    "SCENARIOS",
    "SessionFinishedError",
    "interview_next",
    "new_session",
    "ExtractionError",
    "extract_factors",
    "infer_factors",
    "build_profile",
    "LlmClientConfig",
    "LlmConfigError",
    "LlmProtocolError",
    "LlmTransportError",
    "llm_complete",
]
