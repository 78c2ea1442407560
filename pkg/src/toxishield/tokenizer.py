"""WordPiece-style subword tokenization with a fixed-length output contract.

Every encoded sequence is exactly ``max_len`` ids (default 128): a leading
classifier token, up to ``max_len - 2`` content pieces (tail truncation),
a separator, then padding. Greedy longest-match splitting runs in a
compiled kernel when the build produced one; a pure-Python twin with
identical behavior is used otherwise (or when ``TOXISHIELD_PURE_PYTHON``
is set).
"""
from __future__ import annotations

import os
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyInput

try:  # compiled hot loop is optional
    from . import _wordpiece as _compiled_kernel
except ImportError:  # pragma: no cover - depends on build environment
    _compiled_kernel = None

if os.environ.get("TOXISHIELD_PURE_PYTHON"):
    _compiled_kernel = None

HAVE_COMPILED_KERNEL = _compiled_kernel is not None

CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"
UNK_TOKEN = "[UNK]"
PAD_TOKEN = "[PAD]"
CONTINUATION_PREFIX = "##"

DEFAULT_MAX_LEN = 128

# Words longer than this become a single UNK; guards the quadratic inner
# loop against pathological inputs (matches common BERT tokenizer behavior).
MAX_CHARS_PER_WORD = 100


class VocabError(ValueError):
    """Vocabulary file violates the loader contract."""


@dataclass(frozen=True)
class Vocab:
    """Token-to-id map with the four reserved special tokens."""

    token_ids: dict[str, int]
    cls_token: str = CLS_TOKEN
    sep_token: str = SEP_TOKEN
    unk_token: str = UNK_TOKEN
    pad_token: str = PAD_TOKEN
    continuation_prefix: str = CONTINUATION_PREFIX

    def __post_init__(self) -> None:
        for name, token in (
            ("CLS", self.cls_token),
            ("SEP", self.sep_token),
            ("UNK", self.unk_token),
            ("PAD", self.pad_token),
        ):
            if token not in self.token_ids:
                raise VocabError(f"vocabulary is missing the {name} token {token!r}")
        ids = list(self.token_ids.values())
        if len(set(ids)) != len(ids):
            raise VocabError("vocabulary ids are not unique")
        if sorted(ids) != list(range(len(ids))):
            raise VocabError("vocabulary ids are not dense (0..n-1)")
        if self.unk_id == self.pad_id:
            raise VocabError("UNK and PAD must have distinct ids")
        # prefix-stripped continuation pieces -> stored token, so the
        # greedy loop can match non-initial positions without building
        # prefixed candidate strings
        prefix = self.continuation_prefix
        continuation = {
            token[len(prefix):]: token
            for token in self.token_ids
            if token.startswith(prefix) and len(token) > len(prefix)
        }
        object.__setattr__(self, "_continuation_forms", continuation)

    @property
    def continuation_forms(self) -> dict[str, str]:
        return self._continuation_forms

    @property
    def cls_id(self) -> int:
        return self.token_ids[self.cls_token]

    @property
    def sep_id(self) -> int:
        return self.token_ids[self.sep_token]

    @property
    def unk_id(self) -> int:
        return self.token_ids[self.unk_token]

    @property
    def pad_id(self) -> int:
        return self.token_ids[self.pad_token]

    def __len__(self) -> int:
        return len(self.token_ids)

    def id_of(self, token: str) -> int:
        return self.token_ids.get(token, self.unk_id)

    def tokens_by_id(self) -> list[str]:
        out = [""] * len(self.token_ids)
        for token, i in self.token_ids.items():
            out[i] = token
        return out

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], **kwargs) -> "Vocab":
        """Build a vocab from an ordered token list (index = id).

        Special tokens are prepended automatically when absent, which keeps
        test fixtures down to the content entries that matter.
        """
        specials = [
            kwargs.get("pad_token", PAD_TOKEN),
            kwargs.get("unk_token", UNK_TOKEN),
            kwargs.get("cls_token", CLS_TOKEN),
            kwargs.get("sep_token", SEP_TOKEN),
        ]
        ordered = dict.fromkeys(list(specials) + list(tokens))
        return cls({token: i for i, token in enumerate(ordered)}, **kwargs)

    @classmethod
    def from_file(cls, path: "Path | str", **kwargs) -> "Vocab":
        """Load the de-facto standard format: one token per line, line = id."""
        tokens: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                token = line.rstrip("\n")
                if token in tokens:
                    raise VocabError(f"duplicate token {token!r} at line {i + 1}")
                tokens[token] = i
        return cls(tokens, **kwargs)


@dataclass(frozen=True)
class TokenSequence:
    """Fixed-length encoded input: ids plus its 0/1 attention mask."""

    ids: tuple[int, ...]
    attention_mask: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.attention_mask):
            raise ValueError("ids and attention_mask lengths differ")

    @property
    def length(self) -> int:
        """Number of non-padding positions (content + special tokens)."""
        return sum(self.attention_mask)

    def content_ids(self, vocab: Vocab) -> tuple[int, ...]:
        """The ids between CLS and SEP (the content region)."""
        seq = list(self.ids)
        end = seq.index(vocab.sep_id)
        return tuple(seq[1:end])


def _py_split_word(
    word: str, token_ids: dict, continuation_forms: dict, unk: str, max_chars: int
) -> list[str]:
    n = len(word)
    if n > max_chars:
        return [unk]
    if word in token_ids:
        return [word]
    pieces: list[str] = []
    start = 0
    while start < n:
        end = n
        found = None
        if start == 0:
            while start < end:
                piece = word[:end]
                if piece in token_ids:
                    found = piece
                    break
                end -= 1
        else:
            while start < end:
                stored = continuation_forms.get(word[start:end])
                if stored is not None:
                    found = stored
                    break
                end -= 1
        if found is None:
            return [unk]
        pieces.append(found)
        start = end
    return pieces


def _py_split_words(
    words: list[str], token_ids: dict, continuation_forms: dict, unk: str, max_chars: int
) -> list[str]:
    out: list[str] = []
    for word in words:
        out.extend(_py_split_word(word, token_ids, continuation_forms, unk, max_chars))
    return out


def wordpiece_split(word: str, vocab: Vocab, *, force_python: bool = False) -> list[str]:
    """Greedy longest-prefix split of one pre-tokenized word.

    Non-initial pieces carry the continuation prefix. A word with no match
    at any position collapses to a single UNK token; there is no error path.
    """
    if not word:
        raise ValueError("wordpiece_split requires a non-empty word")
    kernel = None if force_python else _compiled_kernel
    split = kernel.split_word if kernel is not None else _py_split_word
    return split(
        word, vocab.token_ids, vocab.continuation_forms, vocab.unk_token, MAX_CHARS_PER_WORD
    )


def _py_pre_split(text: str) -> list[str]:
    words: list[str] = []
    run_start = -1
    for i, ch in enumerate(text):
        if ch.isspace():
            if run_start >= 0:
                words.append(text[run_start:i])
                run_start = -1
        elif ch.isalnum():
            if run_start < 0:
                run_start = i
        else:
            if run_start >= 0:
                words.append(text[run_start:i])
                run_start = -1
            words.append(ch)
    if run_start >= 0:
        words.append(text[run_start:])
    return words


def pre_split(text: str, *, force_python: bool = False) -> list[str]:
    """Whitespace + punctuation pre-tokenization.

    Every non-alphanumeric, non-whitespace codepoint becomes its own
    pre-token (stock BERT basic-tokenizer behavior). Assumes the text is
    already normalized and lowercased.
    """
    kernel = None if force_python else _compiled_kernel
    if kernel is not None:
        return kernel.pre_split(text)
    return _py_pre_split(text)


def split_text(text: str, vocab: Vocab, *, force_python: bool = False) -> list[str]:
    """Full piece stream for a text: normalize, lowercase, split, WordPiece."""
    normalized = unicodedata.normalize("NFC", text).lower()
    words = pre_split(normalized, force_python=force_python)
    kernel = None if force_python else _compiled_kernel
    split_all = kernel.split_words if kernel is not None else _py_split_words
    return split_all(
        words, vocab.token_ids, vocab.continuation_forms, vocab.unk_token, MAX_CHARS_PER_WORD
    )


def tokenize(
    text: str,
    vocab: Vocab,
    max_len: int = DEFAULT_MAX_LEN,
    *,
    force_python: bool = False,
) -> TokenSequence:
    """Encode text into exactly ``max_len`` ids with attention mask.

    Pipeline: NFC-normalize -> lowercase -> whitespace/punctuation
    pre-split -> WordPiece per word -> CLS + content + SEP -> tail-truncate
    the content region to ``max_len - 2`` -> pad.

    Raises:
        EmptyInput: the text trims to empty.
        ValueError: ``max_len`` leaves no room for CLS + content + SEP.
    """
    if max_len < 3:
        raise ValueError(f"max_len must be >= 3, got {max_len}")
    if not text.strip():
        raise EmptyInput("cannot tokenize empty text")

    pieces = split_text(text, vocab, force_python=force_python)
    pieces = pieces[: max_len - 2]
    token_ids = vocab.token_ids
    unk_id = vocab.unk_id
    ids = [vocab.cls_id]
    ids.extend(token_ids.get(p, unk_id) for p in pieces)
    ids.append(vocab.sep_id)
    content_len = len(ids)
    pad = max_len - content_len
    ids.extend([vocab.pad_id] * pad)
    mask = [1] * content_len + [0] * pad
    return TokenSequence(ids=tuple(ids), attention_mask=tuple(mask))


def detokenize(content_ids: Iterable[int], vocab: Vocab) -> str:
    """Join content pieces back into space-separated words.

    Continuation pieces are glued to the preceding piece with the prefix
    stripped. For text fully covered by the vocabulary (and short enough
    to escape truncation) this reproduces the lowercased pre-split words.
    """
    by_id = vocab.tokens_by_id()
    words: list[str] = []
    prefix = vocab.continuation_prefix
    for i in content_ids:
        token = by_id[i]
        if token.startswith(prefix) and words:
            words[-1] += token[len(prefix):]
        else:
            words.append(token)
    return " ".join(words)
