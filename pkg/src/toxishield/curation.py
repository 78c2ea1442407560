"""Dataset-construction tooling.

Score-stratified binning and sampling produce annotation queues; the
lexicon purifier removes explicit profanity from non-toxic candidate
pools; the teacher loop turns toxic samples into (toxic, detoxified,
rationale) parallel pairs; seeded splits produce reproducible partitions.

Datasets travel as JSON lines ({id, body, p?, label?}); parallel corpora
as JSON-lines pair records.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .core import TextSample, ToxicityScore, as_probability
from .errors import ClientError, EmptyDataset, ExhaustedRetries
from .filter import Lexicon
from .llm.client import ChatClient, GenParams
from .llm.ops import detoxify
from .llm.prompts import ReframePair

# Probability bins used for stratified annotation sampling: five
# contiguous intervals from 0.10 up to and including 1.0.
DEFAULT_BIN_BOUNDARIES = (0.10, 0.28, 0.46, 0.64, 0.82, 1.0)
DEFAULT_QUOTA_PER_BIN = 2100


@dataclass(frozen=True)
class BinSpec:
    """Ordered boundaries defining lower-closed/upper-open intervals.

    The final interval is closed at both ends, so the top boundary value
    itself lands in the last bin. Scores below the first boundary fall
    outside every bin (excluded from candidate sampling).
    """

    boundaries: tuple[float, ...] = DEFAULT_BIN_BOUNDARIES

    def __post_init__(self) -> None:
        if len(self.boundaries) < 2:
            raise ValueError("need at least two boundaries for one bin")
        if list(self.boundaries) != sorted(set(self.boundaries)):
            raise ValueError("boundaries must be strictly increasing")

    @property
    def n_bins(self) -> int:
        return len(self.boundaries) - 1

    def interval(self, index: int) -> tuple[float, float]:
        """1-based bin index -> (lower, upper) bounds."""
        return self.boundaries[index - 1], self.boundaries[index]


def assign_bin(p: "ToxicityScore | float", spec: BinSpec = BinSpec()) -> "int | None":
    """Map a probability to its 1-based bin index, or None below the floor."""
    value = as_probability(p)
    bounds = spec.boundaries
    if value < bounds[0] or value > bounds[-1]:
        return None
    if value == bounds[-1]:
        return spec.n_bins
    for i in range(spec.n_bins):
        if bounds[i] <= value < bounds[i + 1]:
            return i + 1
    return None  # unreachable for valid inputs


@dataclass(frozen=True)
class BinnedSample:
    sample: TextSample
    p: float
    bin_index: int


@dataclass(frozen=True)
class StratifiedSample:
    """Sampling result: candidates tagged with their bin, plus warnings
    for bins that could not fill their quota."""

    candidates: tuple[BinnedSample, ...]
    warnings: tuple[str, ...]


def stratified_sample(
    scored: Sequence[tuple[TextSample, "ToxicityScore | float"]],
    quota_per_bin: int = DEFAULT_QUOTA_PER_BIN,
    seed: int = 0,
    spec: BinSpec = BinSpec(),
) -> StratifiedSample:
    """Seeded per-bin sampling for annotation.

    Each bin is shuffled deterministically and up to ``quota_per_bin``
    entries are taken; short bins contribute what they have and add a
    warning record instead of failing.
    """
    if quota_per_bin < 0:
        raise ValueError("quota_per_bin must be >= 0")
    bins: dict[int, list[tuple[TextSample, float]]] = {
        i: [] for i in range(1, spec.n_bins + 1)
    }
    for sample, score in scored:
        p = as_probability(score)
        index = assign_bin(p, spec)
        if index is not None:
            bins[index].append((sample, p))
    rng = random.Random(seed)
    candidates: list[BinnedSample] = []
    warnings: list[str] = []
    for index in range(1, spec.n_bins + 1):
        members = bins[index]
        rng.shuffle(members)
        take = min(quota_per_bin, len(members))
        if take < quota_per_bin:
            lo, hi = spec.interval(index)
            warnings.append(
                f"bin {index} [{lo}, {hi}] has {len(members)} samples, "
                f"short of quota {quota_per_bin}"
            )
        candidates.extend(
            BinnedSample(sample=s, p=p, bin_index=index) for s, p in members[:take]
        )
    return StratifiedSample(candidates=tuple(candidates), warnings=tuple(warnings))


def lexicon_filter(
    samples: Sequence[TextSample],
    lexicon: Lexicon,
) -> tuple[list[TextSample], list[TextSample]]:
    """Exact partition into (kept, removed) by word-boundary lexicon hits."""
    kept: list[TextSample] = []
    removed: list[TextSample] = []
    for sample in samples:
        if lexicon.profanity_hits(sample.body):
            removed.append(sample)
        else:
            kept.append(sample)
    return kept, removed


@dataclass(frozen=True)
class ParallelPair:
    """A (toxic, detoxified) training pair with provenance."""

    id: str
    toxic_text: str
    detoxified_text: str
    rationale: str
    teacher_model: str
    created_at: str

    def __post_init__(self) -> None:
        if not self.detoxified_text.strip():
            raise ValueError("detoxified_text must be non-empty")


@dataclass(frozen=True)
class FailureRecord:
    id: str
    error_kind: str
    detail: str


@dataclass(frozen=True)
class CorpusResult:
    pairs: tuple[ParallelPair, ...]
    failures: tuple[FailureRecord, ...]


def build_parallel_corpus(
    toxic: Sequence[TextSample],
    client: ChatClient,
    params: GenParams = GenParams(),
    teacher_model: str = "",
    few_shot: "tuple[ReframePair, ...] | None" = None,
    concurrency: int = 1,
) -> CorpusResult:
    """Teacher loop: detoxify every sample, keeping failures as data.

    Per-sample transport or parse failures (after retries) become failure
    records with the original sample id; they are never silently dropped.
    Output order matches input order regardless of ``concurrency``.
    """
    if concurrency < 1:
        raise ValueError("concurrency must be >= 1")
    teacher = teacher_model or getattr(client, "model", "") or "unknown"

    def run_one(sample: TextSample):
        try:
            result = detoxify(sample, client, params, few_shot)
        except (ClientError, ExhaustedRetries) as exc:
            kind = "client" if isinstance(exc, ClientError) else "exhausted_retries"
            return FailureRecord(id=sample.id, error_kind=kind, detail=str(exc))
        return ParallelPair(
            id=sample.id,
            toxic_text=sample.body,
            detoxified_text=result.detoxified,
            rationale=result.rationale,
            teacher_model=teacher,
            created_at=datetime.now(timezone.utc).isoformat(),
        )

    if concurrency == 1:
        outcomes = [run_one(s) for s in toxic]
    else:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            outcomes = list(pool.map(run_one, toxic))

    pairs = tuple(o for o in outcomes if isinstance(o, ParallelPair))
    failures = tuple(o for o in outcomes if isinstance(o, FailureRecord))
    return CorpusResult(pairs=pairs, failures=failures)


class StratifyKey(str, Enum):
    NONE = "none"
    BINARY_LABEL = "binary_label"


@dataclass(frozen=True)
class SplitSpec:
    """Ratios (percent, summing to 100), seed, and stratification mode."""

    ratios: tuple[int, ...]
    seed: int = 0
    stratify_key: StratifyKey = StratifyKey.NONE
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if sum(self.ratios) != 100:
            raise ValueError(f"ratios must sum to 100, got {sum(self.ratios)}")
        if any(r < 0 for r in self.ratios):
            raise ValueError("ratios must be non-negative")
        if not self.names:
            defaults = {
                2: ("train", "test"),
                3: ("train", "validation", "test"),
            }
            names = defaults.get(
                len(self.ratios),
                tuple(f"part{i + 1}" for i in range(len(self.ratios))),
            )
            object.__setattr__(self, "names", names)
        if len(self.names) != len(self.ratios):
            raise ValueError("names and ratios must have the same length")


def _split_indices(n: int, ratios: Sequence[int], rng: random.Random) -> list[list[int]]:
    order = list(range(n))
    rng.shuffle(order)
    sizes = [n * r // 100 for r in ratios]
    sizes[0] += n - sum(sizes)  # remainder goes to the training partition
    parts: list[list[int]] = []
    start = 0
    for size in sizes:
        parts.append(order[start : start + size])
        start += size
    return parts


def split(
    dataset: Sequence,
    spec: SplitSpec,
    label_of: "Callable | None" = None,
) -> dict[str, list]:
    """Seeded, optionally label-stratified partitioning.

    Partitions are disjoint and exhaustive. With stratification, each
    label's items are split at the given ratios independently and merged,
    preserving per-label proportions within one item per partition.
    """
    if not dataset:
        raise EmptyDataset("cannot split an empty dataset")
    rng = random.Random(spec.seed)
    items = list(dataset)

    if spec.stratify_key is StratifyKey.NONE:
        groups = {"": items}
    else:
        if label_of is None:
            label_of = lambda record: str(record["label"])
        groups = {}
        for item in items:
            groups.setdefault(str(label_of(item)), []).append(item)

    partitions: dict[str, list] = {name: [] for name in spec.names}
    for label in sorted(groups):
        members = groups[label]
        index_parts = _split_indices(len(members), spec.ratios, rng)
        for name, indices in zip(spec.names, index_parts):
            partitions[name].extend(members[i] for i in sorted(indices))
    return partitions


# ---------------------------------------------------------------------------
# JSON-lines dataset I/O


def read_dataset(path: "Path | str") -> list[dict]:
    """Read {id, body, ...} records from a JSON-lines file."""
    records: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if "id" not in record or "body" not in record:
                raise ValueError(f"{path}:{lineno}: record needs 'id' and 'body'")
            records.append(record)
    return records


def write_jsonl(records: Iterable[Mapping], path: "Path | str") -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(dict(record), ensure_ascii=False) + "\n")
            count += 1
    return count


def write_annotation_queue(result: StratifiedSample, path: "Path | str") -> int:
    """Emit bin-tagged candidates for external annotation tools."""
    return write_jsonl(
        (
            {"id": c.sample.id, "body": c.sample.body, "p": c.p, "bin": c.bin_index}
            for c in result.candidates
        ),
        path,
    )


def write_pairs(result: CorpusResult, path: "Path | str") -> int:
    return write_jsonl((asdict(pair) for pair in result.pairs), path)


def samples_from_records(records: Iterable[Mapping]) -> list[TextSample]:
    return [TextSample(id=str(r["id"]), body=str(r["body"])) for r in records]
