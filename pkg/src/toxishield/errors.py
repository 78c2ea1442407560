"""Typed errors shared across the pipeline.

Every failure mode a caller is expected to branch on gets its own class;
catch-all handling can use :class:`ToxiShieldError`.
"""
from __future__ import annotations


class ToxiShieldError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ToxiShieldError):
    """Invalid or unusable configuration (detected at startup)."""


class EmptyInput(ToxiShieldError):
    """Input text trims to the empty string."""


class UnknownLabel(ToxiShieldError):
    """Free-form label text matched no taxonomy member or alias.

    Signals a malformed LLM response; surfaced so callers can count it
    against the retry budget.
    """

    def __init__(self, raw: str):
        super().__init__(f"unrecognized category label: {raw!r}")
        self.raw = raw


class MalformedResponse(ToxiShieldError):
    """LLM completion did not follow the required output schema."""


class ConflictingLabels(ToxiShieldError):
    """A label set mixed the non-toxic class with toxic categories."""


class MissingDefinition(ToxiShieldError):
    """A taxonomy member lacks a definition in the prompt config."""

    def __init__(self, category: str):
        super().__init__(f"no definition configured for category {category}")
        self.category = category


class ClientError(ToxiShieldError):
    """Chat-completion transport failure (network, auth, timeout).

    ``kind`` is one of ``"transport"``, ``"auth"``, ``"timeout"``,
    ``"protocol"``.
    """

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"chat client error ({kind}): {detail}" if detail else f"chat client error ({kind})")
        self.kind = kind
        self.detail = detail


class ExhaustedRetries(ToxiShieldError):
    """All retry attempts produced unparseable completions."""

    def __init__(self, last_error: Exception, attempts: int):
        super().__init__(f"gave up after {attempts} attempt(s); last error: {last_error}")
        self.last_error = last_error
        self.attempts = attempts


class ModelLoadError(ToxiShieldError):
    """Serialized classifier graph is missing, corrupt, or unloadable."""


class ShapeError(ToxiShieldError):
    """Classifier graph output does not have the expected 2-logit shape."""


class LengthMismatch(ToxiShieldError):
    """Paired sequences passed to a metric differ in length."""

    def __init__(self, n_left: int, n_right: int):
        super().__init__(f"length mismatch: {n_left} vs {n_right}")
        self.n_left = n_left
        self.n_right = n_right


class ZeroBaseline(ToxiShieldError):
    """Net-reduction metric is undefined when the original mean score is 0."""


class ScorerError(ToxiShieldError):
    """Injected acceptability scorer failed on one output."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"scorer failed on output #{index}: {cause}")
        self.index = index
        self.cause = cause


class ZeroVector(ToxiShieldError):
    """Embedder returned an all-zero vector; cosine is undefined."""

    def __init__(self, index: int):
        super().__init__(f"zero embedding vector for pair #{index}")
        self.index = index


class DimensionMismatch(ToxiShieldError):
    """Embedder returned vectors of different dimensions for one pair."""


class EmptyDataset(ToxiShieldError):
    """Dataset operation received no records."""


class InternalError(ToxiShieldError):
    """Unrecoverable pipeline failure (filter stage only; downstream
    stages degrade instead of aborting)."""
