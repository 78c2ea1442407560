"""LLM-backed stages: prompt construction, chat client, structured parsing."""
from .client import ChatClient, GenParams, HttpChatClient
from .parsing import (
    ClassificationResult,
    DetoxResult,
    parse_coach_response,
    parse_reframe_response,
    render_coach_response,
    render_reframe_response,
)
from .prompts import (
    CoachExample,
    PromptConfig,
    ReframePair,
    Stage,
    build_coach_prompt,
    build_reframe_prompt,
    prompt_sections,
)
from .ops import RETRY_SUFFIX, classify_subcategories, detoxify

__all__ = [
    "ChatClient",
    "GenParams",
    "HttpChatClient",
    "ClassificationResult",
    "DetoxResult",
    "parse_coach_response",
    "parse_reframe_response",
    "render_coach_response",
    "render_reframe_response",
    "CoachExample",
    "PromptConfig",
    "ReframePair",
    "Stage",
    "build_coach_prompt",
    "build_reframe_prompt",
    "prompt_sections",
    "RETRY_SUFFIX",
    "classify_subcategories",
    "detoxify",
]
