"""Coach and rewriter orchestration: prompt, complete, parse, retry.

Transport failures propagate immediately as ClientError. Parse failures
consume the retry budget: the prompt is re-sent with a fixed
format-reminder suffix (the previous completion is never echoed back
into the prompt), and once the budget is spent the last parse error is
wrapped in ExhaustedRetries.
"""
from __future__ import annotations

from typing import Mapping

from ..core import CategoryLabel, TextSample
from ..errors import (
    ConflictingLabels,
    ExhaustedRetries,
    MalformedResponse,
    ToxiShieldError,
    UnknownLabel,
)
from .client import ChatClient, GenParams
from .parsing import (
    ClassificationResult,
    DetoxResult,
    parse_coach_response,
    parse_reframe_response,
)
from .prompts import PromptConfig, ReframePair, build_coach_prompt, build_reframe_prompt

# Fixed reminder appended to the prompt on each retry, for reproducibility.
RETRY_SUFFIX = (
    "Your previous reply was not in the required format. Answer again, "
    "following the required output format exactly."
)

_PARSE_ERRORS = (MalformedResponse, UnknownLabel, ConflictingLabels)


def _complete_with_retries(client: ChatClient, prompt: str, params: GenParams, parse):
    attempts = params.retries + 1
    last_error: "ToxiShieldError | None" = None
    current = prompt
    for attempt in range(attempts):
        raw = client.complete(current, params)
        try:
            return parse(raw), attempt
        except _PARSE_ERRORS as exc:
            last_error = exc
            current = f"{prompt}\n\n{RETRY_SUFFIX}"
    raise ExhaustedRetries(last_error, attempts)


def classify_subcategories(
    sample: TextSample,
    client: ChatClient,
    cfg: PromptConfig,
    params: GenParams = GenParams(),
    alias_table: "Mapping[str, CategoryLabel] | None" = None,
) -> ClassificationResult:
    """Classify one comment into taxonomy subcategories via the chat client.

    Raises:
        ClientError: transport/auth/timeout failure (not retried here).
        ExhaustedRetries: every attempt produced an unparseable reply.
        MissingDefinition: the prompt config lacks a category definition.
    """
    prompt = build_coach_prompt(sample, cfg)

    def parse(raw: str) -> ClassificationResult:
        return parse_coach_response(raw, alias_table)

    result, retries_used = _complete_with_retries(client, prompt, params, parse)
    return ClassificationResult(
        labels=result.labels,
        rationale=result.rationale,
        raw_response=result.raw_response,
        retries_used=retries_used,
    )


def detoxify(
    sample: TextSample,
    client: ChatClient,
    params: GenParams = GenParams(),
    few_shot: "tuple[ReframePair, ...] | None" = None,
) -> DetoxResult:
    """Rewrite one (already flagged) comment via the chat client.

    The caller is responsible for only sending text it judged toxic; this
    operation does not re-check.
    """
    prompt = build_reframe_prompt(sample, few_shot)
    result, retries_used = _complete_with_retries(
        client, prompt, params, parse_reframe_response
    )
    return DetoxResult(
        detoxified=result.detoxified,
        rationale=result.rationale,
        raw_response=result.raw_response,
        retries_used=retries_used,
    )
