"""Real-time toxicity moderation for code-review comments.

Three-stage pipeline: a local binary filter gates everything; flagged
text is explained via taxonomy-constrained classification and rewritten
via structured detoxification. Ships with the full evaluation and
dataset-curation machinery.
"""

__version__ = "0.1.0"

from .core import (
    BinaryLabel,
    CategoryLabel,
    LabelSet,
    SampleSource,
    TextSample,
    ToxicityScore,
    normalize_label,
)
from .filter import Backend, ClassifierHandle, Lexicon, decide, score
from .tokenizer import Vocab, TokenSequence, tokenize, wordpiece_split

__all__ = [
    "__version__",
    "BinaryLabel",
    "CategoryLabel",
    "LabelSet",
    "SampleSource",
    "TextSample",
    "ToxicityScore",
    "normalize_label",
    "Backend",
    "ClassifierHandle",
    "Lexicon",
    "decide",
    "score",
    "Vocab",
    "TokenSequence",
    "tokenize",
    "wordpiece_split",
]
