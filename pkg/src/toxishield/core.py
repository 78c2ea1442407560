"""Shared domain vocabulary: samples, scores, the toxicity taxonomy.

Everything here is an immutable value type, safe to share across threads.
The taxonomy covers 11 toxic subcategories plus the non-toxic class; the
alias table that maps free-form label text onto it ships as a data file
(``data/taxonomy.txt``) so wording tweaks never require a code change.
"""
from __future__ import annotations

import unicodedata
import warnings
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import UnknownLabel


class CategoryLabel(str, Enum):
    """The 12-way toxicity taxonomy (11 toxic subcategories + NonToxic)."""

    PROFANITY = "Profanity"
    TROLLING = "Trolling"
    INSULT = "Insult"
    SELF_DEPRECATION = "SelfDeprecation"
    ENTITLEMENT = "Entitlement"
    IDENTITY_ATTACK = "IdentityAttack"
    THREAT = "Threat"
    OBSCENITY = "Obscenity"
    ARROGANCE = "Arrogance"
    FLIRTATION = "Flirtation"
    OBJECT_DIRECTED_TOXICITY = "ObjectDirectedToxicity"
    NON_TOXIC = "NonToxic"

    @property
    def canonical_name(self) -> str:
        return self.value

    @property
    def is_toxic(self) -> bool:
        return self is not CategoryLabel.NON_TOXIC


TOXIC_CATEGORIES: frozenset[CategoryLabel] = frozenset(
    c for c in CategoryLabel if c.is_toxic
)

# Soft cap on toxic labels per instance; larger sets are flagged, not
# rejected (the annotation schema tops out at triple-labeled instances).
DEFAULT_MAX_TOXIC_LABELS = 3


class SampleSource(str, Enum):
    PULL_REQUEST_COMMENT = "pull_request_comment"
    OTHER = "other"


class BinaryLabel(str, Enum):
    TOXIC = "toxic"
    NON_TOXIC = "non_toxic"


@dataclass(frozen=True)
class TextSample:
    """A code-review comment flowing through the pipeline.

    ``body`` is arbitrary unicode; entry points that require non-empty
    text enforce that themselves (raising ``EmptyInput``).
    """

    id: str
    body: str
    source: SampleSource = SampleSource.PULL_REQUEST_COMMENT
    metadata: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True, order=True)
class ToxicityScore:
    """A probability in [0, 1] that a text is toxic."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"toxicity probability out of range: {self.p}")

    def __float__(self) -> float:
        return self.p


def as_probability(score: "ToxicityScore | float") -> float:
    """Accept either a ToxicityScore or a bare float and validate range."""
    p = float(score)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"toxicity probability out of range: {p}")
    return p


class LabelSetWarning(UserWarning):
    """Raised (as a warning) when a label set exceeds the soft cap."""


@dataclass(frozen=True)
class LabelSet:
    """A non-empty set of category labels for one instance.

    NonToxic is mutually exclusive with every toxic category, so a set
    containing it has cardinality exactly 1. More than
    ``DEFAULT_MAX_TOXIC_LABELS`` toxic labels is unusual enough to warn
    about but is not a validation failure.
    """

    labels: frozenset[CategoryLabel]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("label set must be non-empty")
        if CategoryLabel.NON_TOXIC in self.labels and len(self.labels) > 1:
            from .errors import ConflictingLabels

            raise ConflictingLabels(
                f"NonToxic mixed with toxic labels: {sorted(l.value for l in self.labels)}"
            )
        if len(self.labels) > DEFAULT_MAX_TOXIC_LABELS:
            warnings.warn(
                f"label set has {len(self.labels)} labels (> {DEFAULT_MAX_TOXIC_LABELS})",
                LabelSetWarning,
                stacklevel=2,
            )

    @classmethod
    def of(cls, *labels: CategoryLabel) -> "LabelSet":
        return cls(frozenset(labels))

    @classmethod
    def non_toxic(cls) -> "LabelSet":
        return cls(frozenset({CategoryLabel.NON_TOXIC}))

    @property
    def is_toxic(self) -> bool:
        return CategoryLabel.NON_TOXIC not in self.labels

    def __iter__(self):
        return iter(sorted(self.labels, key=lambda l: l.value))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: CategoryLabel) -> bool:
        return label in self.labels


def _normalize_key(raw: str) -> str:
    """Canonicalize label text: NFC, case-fold, drop space/hyphen/underscore."""
    text = unicodedata.normalize("NFC", raw).casefold().strip()
    return "".join(ch for ch in text if ch not in " \t-_")


def _parse_taxonomy_lines(lines: Iterable[str]) -> dict[str, CategoryLabel]:
    table: dict[str, CategoryLabel] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        names = [part.strip() for part in line.split(",") if part.strip()]
        if not names:
            continue
        try:
            canonical = CategoryLabel(names[0])
        except ValueError as exc:
            raise ValueError(
                f"taxonomy line {lineno}: {names[0]!r} is not a taxonomy member"
            ) from exc
        for name in names:
            key = _normalize_key(name)
            existing = table.get(key)
            if existing is not None and existing is not canonical:
                raise ValueError(
                    f"taxonomy line {lineno}: alias {name!r} already maps to {existing.value}"
                )
            table[key] = canonical
    return table


def load_alias_table(path: "Path | None" = None) -> dict[str, CategoryLabel]:
    """Load the canonical-name/alias table from a file (or the packaged one)."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = (
            resources.files("toxishield").joinpath("data/taxonomy.txt").read_text("utf-8")
        )
    table = _parse_taxonomy_lines(text.splitlines())
    missing = [c.value for c in CategoryLabel if _normalize_key(c.value) not in table]
    if missing:
        raise ValueError(f"taxonomy file missing categories: {missing}")
    return table


_DEFAULT_TABLE: dict[str, CategoryLabel] | None = None


def default_alias_table() -> dict[str, CategoryLabel]:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_alias_table()
    return _DEFAULT_TABLE


def normalize_label(raw: str, table: "Mapping[str, CategoryLabel] | None" = None) -> CategoryLabel:
    """Map free-form label text onto the fixed taxonomy.

    Matching lowercases, trims, and collapses spaces/hyphens/underscores,
    then looks the result up among canonical names and configured aliases.

    Raises:
        UnknownLabel: nothing matched; the caller treats this as a
            malformed LLM response and may retry.
    """
    if table is None:
        table = default_alias_table()
    key = _normalize_key(raw)
    if not key:
        raise UnknownLabel(raw)
    try:
        return table[key]
    except KeyError:
        raise UnknownLabel(raw) from None
