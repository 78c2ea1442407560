"""Binary toxicity scoring with explicit threshold gating.

Two interchangeable backends sit behind one contract:

* ``serialized_model`` — a locally loaded TorchScript graph (full-precision
  or 8-bit-quantized; the loader does not care) taking ``(ids, mask)``
  int64 tensors of shape ``(1, max_len)`` and returning 2 logits where
  class 1 is toxic.
* ``lexicon`` — a deterministic keyword/anger-marker surrogate so the whole
  pipeline and its tests run with zero model weights.

Known limitation: obfuscated profanity ("F U C K") defeats both backends;
the spaces break word-boundary matching exactly as they break subword
tokenization.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from .core import TextSample, ToxicityScore, BinaryLabel, as_probability
from .errors import EmptyInput, ModelLoadError, ShapeError
from .tokenizer import Vocab, tokenize, DEFAULT_MAX_LEN

DEFAULT_THRESHOLD = 0.5

# Surrogate weights: each distinct profanity hit contributes 0.9 of the
# remaining headroom, each distinct anger marker 0.3.
PROFANITY_WEIGHT = 0.9
ANGER_WEIGHT = 0.3

# Named anger-marker patterns, matched against the *original* (uncased)
# text: shouting runs of capitals, and stacked '!'/'?' punctuation.
DEFAULT_ANGER_MARKERS: tuple[tuple[str, str], ...] = (
    ("caps_run", r"\b[A-Z]{3,}\b"),
    ("exclaim_run", r"[!?]{2,}"),
)


class Backend(str, Enum):
    SERIALIZED_MODEL = "serialized_model"
    LEXICON = "lexicon"


@dataclass(frozen=True)
class Lexicon:
    """Case-folded profanity terms plus named anger-marker patterns."""

    terms: frozenset[str]
    anger_markers: tuple[tuple[str, str], ...] = DEFAULT_ANGER_MARKERS

    def __post_init__(self) -> None:
        folded = frozenset(t.casefold() for t in self.terms)
        object.__setattr__(self, "terms", folded)

    @classmethod
    def from_file(cls, path: "Path | str", anger_markers=DEFAULT_ANGER_MARKERS) -> "Lexicon":
        """Load a UTF-8 term list: one term per line, '#' comments."""
        terms = set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line and not line.startswith("#"):
                    terms.add(line)
        return cls(frozenset(terms), anger_markers)

    @classmethod
    def bundled(cls) -> "Lexicon":
        text = resources.files("toxishield").joinpath("data/profanity.txt").read_text("utf-8")
        terms = {
            line.strip()
            for line in text.splitlines()
            if line.strip() and not line.strip().startswith("#")
        }
        return cls(frozenset(terms))

    def profanity_hits(self, text: str) -> set[str]:
        """Distinct terms with at least one word-boundary match."""
        if not self.terms:
            return set()
        pattern = _terms_pattern(tuple(sorted(self.terms)))
        return {m.group(0).casefold() for m in pattern.finditer(text)}

    def anger_hits(self, text: str) -> set[str]:
        """Names of the distinct anger-marker patterns that matched."""
        hits = set()
        for name, pattern in self.anger_markers:
            if re.search(pattern, text):
                hits.add(name)
        return hits


@lru_cache(maxsize=32)
def _terms_pattern(terms: tuple[str, ...]) -> "re.Pattern[str]":
    alternation = "|".join(re.escape(t) for t in terms)
    return re.compile(rf"\b(?:{alternation})\b", re.IGNORECASE)


@dataclass(frozen=True)
class ClassifierHandle:
    """A ready-to-score classifier with exactly one backend active."""

    backend: Backend
    model_id: str
    threshold: float = DEFAULT_THRESHOLD
    lexicon: "Lexicon | None" = None
    session: object = None
    vocab: "Vocab | None" = None
    max_len: int = DEFAULT_MAX_LEN

    def __post_init__(self) -> None:
        if self.backend is Backend.LEXICON:
            if self.lexicon is None or self.session is not None:
                raise ValueError("lexicon backend requires a lexicon and no session")
        else:
            if self.session is None or self.vocab is None:
                raise ValueError("serialized backend requires a loaded graph and vocab")
            if self.lexicon is not None:
                raise ValueError("exactly one backend may be active")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold out of range: {self.threshold}")

    @classmethod
    def lexicon_backend(
        cls,
        lexicon: "Lexicon | None" = None,
        threshold: float = DEFAULT_THRESHOLD,
        model_id: str = "lexicon-surrogate",
    ) -> "ClassifierHandle":
        return cls(
            backend=Backend.LEXICON,
            model_id=model_id,
            threshold=threshold,
            lexicon=lexicon if lexicon is not None else Lexicon.bundled(),
        )

    @classmethod
    def serialized_backend(
        cls,
        model_path: "Path | str",
        vocab_path: "Path | str",
        threshold: float = DEFAULT_THRESHOLD,
        max_len: int = DEFAULT_MAX_LEN,
    ) -> "ClassifierHandle":
        """Load a TorchScript graph plus its matching vocabulary.

        Accepts full-precision and dynamically-quantized graphs alike; both
        deserialize through the same loader and honor the same contract.
        """
        try:
            import torch
        except ImportError as exc:
            raise ModelLoadError(
                "serialized backend requires the optional torch dependency"
            ) from exc
        model_path = Path(model_path)
        if not model_path.exists():
            raise ModelLoadError(f"model file not found: {model_path}")
        try:
            session = torch.jit.load(str(model_path), map_location="cpu")
            session.eval()
        except Exception as exc:
            raise ModelLoadError(f"cannot load serialized graph {model_path}: {exc}") from exc
        try:
            vocab = Vocab.from_file(vocab_path)
        except OSError as exc:
            raise ModelLoadError(f"cannot load vocab {vocab_path}: {exc}") from exc
        return cls(
            backend=Backend.SERIALIZED_MODEL,
            model_id=model_path.name,
            threshold=threshold,
            session=session,
            vocab=vocab,
            max_len=max_len,
        )


def softmax2(logit_a: float, logit_b: float) -> tuple[float, float]:
    """Numerically stable two-way softmax."""
    m = max(logit_a, logit_b)
    ea = math.exp(logit_a - m)
    eb = math.exp(logit_b - m)
    total = ea + eb
    return ea / total, eb / total


def _score_lexicon(body: str, lexicon: Lexicon) -> float:
    h = len(lexicon.profanity_hits(body))
    a = len(lexicon.anger_hits(body))
    p = 1.0 - (1.0 - PROFANITY_WEIGHT) ** h * (1.0 - ANGER_WEIGHT) ** a
    return min(max(p, 0.0), 1.0)


def _score_serialized(body: str, handle: ClassifierHandle) -> float:
    import torch

    seq = tokenize(body, handle.vocab, handle.max_len)
    ids = torch.tensor([seq.ids], dtype=torch.long)
    mask = torch.tensor([seq.attention_mask], dtype=torch.long)
    with torch.inference_mode():
        out = handle.session(ids, mask)
    if isinstance(out, (tuple, list)):
        out = out[0]
    logits = out.detach().reshape(-1).tolist()
    if len(logits) != 2:
        raise ShapeError(f"expected 2 logits, graph returned {len(logits)}")
    _, p_toxic = softmax2(logits[0], logits[1])
    return p_toxic


def score(sample: TextSample, handle: ClassifierHandle) -> ToxicityScore:
    """Probability that the sample is toxic, per the handle's backend."""
    if not sample.body.strip():
        raise EmptyInput(f"sample {sample.id!r} has empty body")
    if handle.backend is Backend.LEXICON:
        p = _score_lexicon(sample.body, handle.lexicon)
    else:
        p = _score_serialized(sample.body, handle)
    return ToxicityScore(p)


def decide(score: "ToxicityScore | float", threshold: float = DEFAULT_THRESHOLD) -> BinaryLabel:
    """Threshold gate: toxic iff p >= threshold (inclusive)."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold out of range: {threshold}")
    p = as_probability(score)
    return BinaryLabel.TOXIC if p >= threshold else BinaryLabel.NON_TOXIC
