"""Shared fixtures: vocabularies, lexicons, and scripted chat clients."""
from __future__ import annotations

import re
import threading

import pytest

from toxishield.core import TextSample
from toxishield.errors import ClientError
from toxishield.filter import ClassifierHandle, Lexicon
from toxishield.llm.client import GenParams
from toxishield.tokenizer import Vocab


@pytest.fixture
def tiny_vocab() -> Vocab:
    return Vocab.from_tokens(
        ["un", "##afford", "##able", "please", "fix", "the", "loop", "bound",
         "this", "is", "slow", "code", ".", "!", "?"]
    )


@pytest.fixture
def small_lexicon() -> Lexicon:
    return Lexicon(frozenset({"damn", "crap", "ass"}))


@pytest.fixture
def lexicon_handle(small_lexicon) -> ClassifierHandle:
    return ClassifierHandle.lexicon_backend(small_lexicon)


@pytest.fixture
def gen_params() -> GenParams:
    return GenParams(retries=2, timeout_s=5.0)


def sample(body: str, id: str = "s1") -> TextSample:
    return TextSample(id=id, body=body)


class ScriptedClient:
    """Replays a fixed transcript; records every prompt it saw."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.prompts: list[str] = []
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, prompt: str, params: GenParams) -> str:
        with self._lock:
            self.calls += 1
            self.prompts.append(prompt)
            if not self.responses:
                raise AssertionError("scripted client ran out of responses")
            item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


_COMMENT_RE = re.compile(r"<comment>\n(.*?)\n</comment>", re.DOTALL)


def comment_of(prompt: str) -> str:
    """Recover the (escaped) comment body embedded in a prompt."""
    match = _COMMENT_RE.search(prompt)
    assert match, "prompt carries no delimited comment"
    text = match.group(1)
    return text.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")


class EchoClient:
    """Well-formed responses derived from the request, for isolation tests.

    Coach prompts (recognized by the XML directive) get a Profanity
    classification; rewrite prompts get a detox response embedding the
    original comment text, so cross-request contamination is detectable.
    """

    def __init__(self, delay_s: float = 0.0):
        self.delay_s = delay_s
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, prompt: str, params: GenParams) -> str:
        import time

        with self._lock:
            self.calls += 1
        if self.delay_s:
            time.sleep(self.delay_s)
        body = comment_of(prompt)
        if "Respond in XML format" in prompt:
            return (
                f"<response>profane wording in: {body}</response>"
                f"<category>Profanity</category>"
            )
        return f"Detoxified: rewrite of [{body}]; Rationale: removed profanity from [{body}]"


class FailingClient:
    """Always raises the given client error."""

    def __init__(self, kind: str = "timeout"):
        self.kind = kind
        self.calls = 0

    def complete(self, prompt: str, params: GenParams) -> str:
        self.calls += 1
        raise ClientError(self.kind, "injected failure")
