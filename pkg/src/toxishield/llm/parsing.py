"""Strict structured-output parsing for the two response schemas.

Coach replies carry ``<response>`` (rationale) and ``<category>`` (label
list) tags; rewriter replies carry ``Detoxified:`` / ``Rationale:``
markers. Parsing is tolerant of cosmetic variation (case, bullets,
markdown emphasis, multi-line bodies) but every structural defect raises
a typed error; nothing ever falls back to a silent default.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from ..core import CategoryLabel, LabelSet, normalize_label
from ..errors import ConflictingLabels, MalformedResponse

_RESPONSE_RE = re.compile(r"<response>\s*(.*?)\s*</response>", re.IGNORECASE | re.DOTALL)
_CATEGORY_RE = re.compile(r"<category>\s*(.*?)\s*</category>", re.IGNORECASE | re.DOTALL)

# Label delimiters inside <category>: comma, semicolon, or the word "and".
_LABEL_SPLIT_RE = re.compile(r",|;|\band\b", re.IGNORECASE)

# "Detoxified:" / "Rationale:" markers, tolerant of leading bullets,
# quoting, and markdown emphasis around the word or the colon.
_DETOX_MARKER_RE = re.compile(
    r"[*_`#>\-•\s]*detoxified[*_`\s]*:[*_`]*[ \t]*", re.IGNORECASE
)
_RATIONALE_MARKER_RE = re.compile(
    r"[*_`#>\-•\s]*rationale[*_`\s]*:[*_`]*[ \t]*", re.IGNORECASE
)


@dataclass(frozen=True)
class ClassificationResult:
    """Validated subcategory labels with the model's rationale."""

    labels: LabelSet
    rationale: str
    raw_response: str
    retries_used: int = 0

    def __post_init__(self) -> None:
        if not self.rationale.strip():
            raise MalformedResponse("rationale must be non-empty")


@dataclass(frozen=True)
class DetoxResult:
    """A rewritten comment with the explanation of the changes."""

    detoxified: str
    rationale: str
    raw_response: str
    retries_used: int = 0

    def __post_init__(self) -> None:
        if not self.detoxified.strip():
            raise MalformedResponse("detoxified text must be non-empty")
        if not self.rationale.strip():
            raise MalformedResponse("rationale must be non-empty")


def parse_coach_response(
    raw: str,
    alias_table: "Mapping[str, CategoryLabel] | None" = None,
) -> ClassificationResult:
    """Extract labels and rationale from a coach completion.

    Takes the first ``<response>`` and ``<category>`` elements, splits the
    category text on commas/semicolons/"and", and normalizes every token
    against the taxonomy.

    Raises:
        MalformedResponse: a tag is missing or empty.
        UnknownLabel: a category token matched nothing in the taxonomy.
        ConflictingLabels: Non-Toxic combined with toxic categories.
    """
    response_match = _RESPONSE_RE.search(raw)
    category_match = _CATEGORY_RE.search(raw)
    if response_match is None or category_match is None:
        missing = []
        if response_match is None:
            missing.append("<response>")
        if category_match is None:
            missing.append("<category>")
        raise MalformedResponse(f"missing {' and '.join(missing)} tag(s)")
    rationale = response_match.group(1).strip()
    if not rationale:
        raise MalformedResponse("<response> is empty")
    category_text = category_match.group(1).strip()
    tokens = [t.strip() for t in _LABEL_SPLIT_RE.split(category_text)]
    tokens = [t for t in tokens if t]
    if not tokens:
        raise MalformedResponse("<category> is empty")
    labels = frozenset(normalize_label(t, alias_table) for t in tokens)
    if CategoryLabel.NON_TOXIC in labels and len(labels) > 1:
        raise ConflictingLabels(
            f"Non-Toxic mixed with {sorted(l.value for l in labels if l.is_toxic)}"
        )
    return ClassificationResult(
        labels=LabelSet(labels), rationale=rationale, raw_response=raw
    )


def render_coach_response(labels: LabelSet, rationale: str) -> str:
    """Render labels + rationale in the coach XML schema.

    The inverse of :func:`parse_coach_response` for well-formed content
    (rationale must not itself contain the schema tags).
    """
    names = ", ".join(label.value for label in labels)
    return f"<response>{rationale}</response>\n<category>{names}</category>"


def parse_reframe_response(raw: str) -> DetoxResult:
    """Extract the rewrite and rationale from a rewriter completion.

    Scans for the first ``Detoxified:`` marker; the rewrite runs from
    there to the ``Rationale:`` marker (multi-line allowed), the rationale
    is everything after it.

    Raises:
        MalformedResponse: a marker is missing, the rationale marker
            precedes the rewrite, or the rewrite trims to empty.
    """
    detox_match = _DETOX_MARKER_RE.search(raw)
    if detox_match is None:
        raise MalformedResponse("missing 'Detoxified:' marker")
    rest = raw[detox_match.end():]
    rationale_match = _RATIONALE_MARKER_RE.search(rest)
    if rationale_match is None:
        raise MalformedResponse("missing 'Rationale:' marker")
    detoxified = rest[: rationale_match.start()].strip()
    # drop the single separator the schema places before "Rationale:"
    if detoxified.endswith(";"):
        detoxified = detoxified[:-1].rstrip()
    rationale = rest[rationale_match.end():].strip()
    if not detoxified:
        raise MalformedResponse("detoxified text is empty")
    if not rationale:
        raise MalformedResponse("rationale is empty")
    return DetoxResult(detoxified=detoxified, rationale=rationale, raw_response=raw)


def render_reframe_response(detoxified: str, rationale: str) -> str:
    """Render a rewrite in the ``Detoxified: ...; Rationale: ...`` schema."""
    return f"Detoxified: {detoxified}; Rationale: {rationale}"
