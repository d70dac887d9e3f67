"""Minimal chat-completion HTTP client.

Speaks the common chat-completion wire shape: request ``{model, messages}``,
response ``choices[0].message.content``. Transport failures and non-success
statuses are retried with exponential backoff; a body that does not look like
a chat completion is a protocol error, distinguishable from transport
exhaustion.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import httpx

from ..domain import ValidationError

BACKOFF_BASE_SECONDS = 0.5


class LlmError(RuntimeError):
    """Base class for chat-completion client failures."""


class LlmConfigError(LlmError):
    """The client was invoked without a configured endpoint."""


class LlmTransportError(LlmError):
    """All attempts failed at the transport/status level."""


class LlmProtocolError(LlmError):
    """The endpoint answered, but not with a chat completion."""


@dataclass(frozen=True)
class LlmClientConfig:
    """Connection settings; an empty endpoint_url means the LLM path is disabled."""

    endpoint_url: str = ""
    model_name: str = "default"
    timeout_ms: int = 10_000
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValidationError(f"timeout_ms must be > 0, got {self.timeout_ms}")
        if self.max_retries < 0:
            raise ValidationError(f"max_retries must be >= 0, got {self.max_retries}")

    @classmethod
    def from_env(cls) -> "LlmClientConfig":
        return cls(
            endpoint_url=os.environ.get("LLM_ENDPOINT", ""),
            model_name=os.environ.get("LLM_MODEL", "default"),
        )


def llm_complete(
    config: LlmClientConfig,
    system_prompt: str,
    messages: Sequence[Mapping[str, str]],
    transport: httpx.BaseTransport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    """One chat-completion round trip, returning the assistant text.

    Retries transport errors and non-success statuses up to
    ``config.max_retries`` times with exponential backoff (base 500 ms,
    doubling). ``transport`` and ``sleep`` exist for tests.
    """
    if not config.endpoint_url:
        raise LlmConfigError("no LLM endpoint configured")

    body = {
        "model": config.model_name,
        "messages": [{"role": "system", "content": system_prompt}, *messages],
    }
    timeout = config.timeout_ms / 1000.0
    last_error: Exception | None = None
    with httpx.Client(transport=transport, timeout=timeout) as client:
        for attempt in range(config.max_retries + 1):
            if attempt:
                sleep(BACKOFF_BASE_SECONDS * 2 ** (attempt - 1))
            try:
                response = client.post(config.endpoint_url, json=body)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 400:
                last_error = LlmTransportError(f"endpoint returned status {response.status_code}")
                continue
            try:
                content = response.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise LlmProtocolError(f"malformed chat-completion body: {exc}") from exc
            if not isinstance(content, str):
                raise LlmProtocolError("assistant content is not a string")
            return content
    raise LlmTransportError(f"exhausted {config.max_retries + 1} attempts: {last_error}")
