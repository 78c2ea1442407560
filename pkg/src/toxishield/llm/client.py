"""Chat-completion client contract and the HTTP implementation.

The whole generative side of the pipeline talks to one method:
``complete(prompt, params) -> text``. The HTTP client speaks the common
JSON chat-completions wire format, so any hosted endpoint or local model
server implementing it can act as coach, rewriter, or teacher.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import httpx

from ..errors import ClientError

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_OUTPUT_TOKENS = 256
DEFAULT_RETRIES = 2
DEFAULT_TIMEOUT_S = 30.0


@dataclass(frozen=True)
class GenParams:
    """Decoding and retry parameters for one generative call.

    Defaults are deterministic (temperature 0, fixed output budget) so
    repeated runs are reproducible.
    """

    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    retries: int = DEFAULT_RETRIES
    timeout_s: float = DEFAULT_TIMEOUT_S

    def __post_init__(self) -> None:
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.timeout_s <= 0.0:
            raise ValueError("timeout_s must be > 0")


@runtime_checkable
class ChatClient(Protocol):
    """Anything that can turn a prompt into a completion."""

    def complete(self, prompt: str, params: GenParams) -> str:
        ...


class HttpChatClient:
    """Chat-completions client over HTTP JSON.

    ``endpoint`` is the API base URL (``/chat/completions`` is appended
    unless already present). The API key is read from the environment
    variable named by ``api_key_env`` at call time, never stored in
    config files.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "LLM_API_KEY",
    ):
        if not endpoint:
            raise ValueError("endpoint must be non-empty")
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env

    @property
    def url(self) -> str:
        if self.endpoint.endswith("/chat/completions"):
            return self.endpoint
        return f"{self.endpoint}/chat/completions"

    def complete(self, prompt: str, params: GenParams) -> str:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        try:
            response = httpx.post(
                self.url, json=payload, headers=headers, timeout=params.timeout_s
            )
        except httpx.TimeoutException as exc:
            raise ClientError("timeout", str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ClientError("transport", str(exc)) from exc
        if response.status_code in (401, 403):
            raise ClientError("auth", f"HTTP {response.status_code}")
        if response.status_code != 200:
            raise ClientError("transport", f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise ClientError("protocol", f"unexpected response shape: {exc}") from exc
        if not isinstance(content, str):
            raise ClientError("protocol", "completion content is not text")
        return content
