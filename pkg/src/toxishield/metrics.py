"""Classification, detoxification, and agreement metrics.

Covers binary precision/recall/F1/accuracy, multi-label exact match with
one-vs-rest per-class metrics under two aggregations (micro-style "avg"
and unweighted "macro"), Matthews correlation, the three text-style-transfer
components (style accuracy, fluency, content preservation) with their
harmonic-mean summary score, and weighted Cohen's kappa.

Zero-denominator convention: precision, recall, F1, and MCC report 0.0
(never NaN) and the affected metric names are flagged on the per-class row.
All computations are pure; scorer/embedder dependencies are injected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Sequence

from .core import BinaryLabel, CategoryLabel, LabelSet, ToxicityScore, as_probability
from .errors import (
    DimensionMismatch,
    EmptyInput,
    LengthMismatch,
    ScorerError,
    ZeroBaseline,
    ZeroVector,
)

Scorer = Callable[[str], float]
Embedder = Callable[[str], Sequence[float]]


# ---------------------------------------------------------------------------
# confusion matrices and MCC


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K count matrix; ``counts[i][j]`` = gold class i predicted as j."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.labels)
        if len(self.counts) != k or any(len(row) != k for row in self.counts):
            raise ValueError("counts must be square over the label list")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    @classmethod
    def from_pairs(
        cls,
        golds: Sequence[str],
        preds: Sequence[str],
        labels: Sequence[str],
    ) -> "ConfusionMatrix":
        if len(golds) != len(preds):
            raise LengthMismatch(len(golds), len(preds))
        index = {label: i for i, label in enumerate(labels)}
        counts = [[0] * len(labels) for _ in labels]
        for g, p in zip(golds, preds):
            counts[index[g]][index[p]] += 1
        return cls(tuple(labels), tuple(tuple(row) for row in counts))

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def one_vs_rest(self, label: str) -> tuple[int, int, int, int]:
        """(tp, fp, fn, tn) treating ``label`` as the positive class."""
        i = self.labels.index(label)
        tp = self.counts[i][i]
        fn = sum(self.counts[i]) - tp
        fp = sum(self.counts[g][i] for g in range(len(self.labels))) - tp
        tn = self.total - tp - fn - fp
        return tp, fp, fn, tn


def binary_mcc_counts(tp: int, fp: int, fn: int, tn: int) -> float:
    """Closed-form binary MCC; any zero denominator factor yields 0.0."""
    denominator_sq = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denominator_sq == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denominator_sq)


def mcc(cm: ConfusionMatrix, positive_label: "str | None" = None) -> float:
    """Matthews correlation for a confusion matrix.

    Binary matrices use the closed form directly (the result is symmetric
    in the class order). Larger matrices require ``positive_label`` and
    reduce one-vs-rest to the binary case.
    """
    if len(cm.labels) == 2 and positive_label is None:
        positive_label = cm.labels[1]
    if positive_label is None:
        raise ValueError("multi-class MCC is per-class; pass positive_label")
    return binary_mcc_counts(*cm.one_vs_rest(positive_label))


def per_class_mcc(cm: ConfusionMatrix) -> dict[str, float]:
    """One-vs-rest MCC for every class in the matrix."""
    return {label: binary_mcc_counts(*cm.one_vs_rest(label)) for label in cm.labels}


# ---------------------------------------------------------------------------
# classification reports


@dataclass(frozen=True)
class ClassMetrics:
    """Per-class one-vs-rest counts and derived metrics."""

    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    mcc: float
    support: int
    zero_division: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Aggregate:
    precision: float
    recall: float
    f1: float
    mcc: float


@dataclass(frozen=True)
class MetricsReport:
    """Per-class metrics plus the two aggregate rows.

    ``avg`` pools tp/fp/fn over classes for precision/recall/F1 (the
    aggregate-over-instances convention) and support-weights MCC;
    ``macro`` is the unweighted mean over all classes. ``pooled_mcc`` is
    the alternative "avg" MCC convention (closed form over the pooled
    one-vs-rest counts), reported alongside the default.
    """

    per_class: Mapping[str, ClassMetrics]
    avg: Aggregate
    macro: Aggregate
    accuracy: "float | None" = None
    em: "float | None" = None
    n_instances: int = 0
    pooled_mcc: float = 0.0


def _prf(tp: int, fp: int, fn: int, tn: int) -> tuple[float, float, float, float, set[str]]:
    flags: set[str] = set()
    if tp + fp == 0:
        precision = 0.0
        flags.add("precision")
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 0.0
        flags.add("recall")
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0.0:
        f1 = 0.0
        flags.add("f1")
    else:
        f1 = 2 * precision * recall / (precision + recall)
    mcc_value = binary_mcc_counts(tp, fp, fn, tn)
    if (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn) == 0:
        flags.add("mcc")
    return precision, recall, f1, mcc_value, flags


def _class_metrics(tp: int, fp: int, fn: int, tn: int) -> ClassMetrics:
    precision, recall, f1, mcc_value, flags = _prf(tp, fp, fn, tn)
    return ClassMetrics(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        f1=f1,
        mcc=mcc_value,
        support=tp + fn,
        zero_division=frozenset(flags),
    )


def pooled_counts(rows: Mapping[str, ClassMetrics]) -> tuple[int, int, int, int]:
    classes = list(rows.values())
    return (
        sum(c.tp for c in classes),
        sum(c.fp for c in classes),
        sum(c.fn for c in classes),
        sum(c.tn for c in classes),
    )


def _aggregates(rows: Mapping[str, ClassMetrics]) -> tuple[Aggregate, Aggregate]:
    classes = list(rows.values())
    k = len(classes)
    pooled_tp, pooled_fp, pooled_fn, pooled_tn = pooled_counts(rows)
    micro_p, micro_r, micro_f1, _, _ = _prf(pooled_tp, pooled_fp, pooled_fn, pooled_tn)
    total_support = sum(c.support for c in classes)
    if total_support:
        weighted_mcc = sum(c.mcc * c.support for c in classes) / total_support
    else:
        weighted_mcc = 0.0
    avg = Aggregate(precision=micro_p, recall=micro_r, f1=micro_f1, mcc=weighted_mcc)
    macro = Aggregate(
        precision=sum(c.precision for c in classes) / k,
        recall=sum(c.recall for c in classes) / k,
        f1=sum(c.f1 for c in classes) / k,
        mcc=sum(c.mcc for c in classes) / k,
    )
    return avg, macro


def binary_report(
    preds: Sequence[BinaryLabel],
    golds: Sequence[BinaryLabel],
) -> MetricsReport:
    """Two-class report: per-class P/R/F1 (+MCC) and overall accuracy.

    Class rows are keyed ``non_toxic`` then ``toxic``, mirroring the usual
    P0/R0/F1_0 | P1/R1/F1_1 | Accuracy presentation.
    """
    if len(preds) != len(golds):
        raise LengthMismatch(len(preds), len(golds))
    if not preds:
        raise EmptyInput("binary_report requires at least one instance")
    rows: dict[str, ClassMetrics] = {}
    for cls in (BinaryLabel.NON_TOXIC, BinaryLabel.TOXIC):
        tp = sum(1 for p, g in zip(preds, golds) if p is cls and g is cls)
        fp = sum(1 for p, g in zip(preds, golds) if p is cls and g is not cls)
        fn = sum(1 for p, g in zip(preds, golds) if p is not cls and g is cls)
        tn = len(preds) - tp - fp - fn
        rows[cls.value] = _class_metrics(tp, fp, fn, tn)
    accuracy = sum(1 for p, g in zip(preds, golds) if p is g) / len(preds)
    avg, macro = _aggregates(rows)
    return MetricsReport(
        per_class=rows,
        avg=avg,
        macro=macro,
        accuracy=accuracy,
        n_instances=len(preds),
        pooled_mcc=binary_mcc_counts(*pooled_counts(rows)),
    )


def multilabel_report(
    pred_sets: Sequence[LabelSet],
    gold_sets: Sequence[LabelSet],
    labels: Sequence[CategoryLabel] = tuple(CategoryLabel),
    skip_empty: bool = False,
) -> MetricsReport:
    """Multi-label report over the taxonomy.

    Exact match is the fraction of instances whose predicted set equals the
    gold set. Per-class metrics come from one-vs-rest membership
    indicators. ``skip_empty`` drops zero-support classes from the macro
    average (default keeps them, contributing 0 under the zero-denominator
    convention).
    """
    if len(pred_sets) != len(gold_sets):
        raise LengthMismatch(len(pred_sets), len(gold_sets))
    if not pred_sets:
        raise EmptyInput("multilabel_report requires at least one instance")
    n = len(pred_sets)
    rows: dict[str, ClassMetrics] = {}
    for label in labels:
        tp = fp = fn = tn = 0
        for pred, gold in zip(pred_sets, gold_sets):
            in_pred = label in pred
            in_gold = label in gold
            if in_pred and in_gold:
                tp += 1
            elif in_pred:
                fp += 1
            elif in_gold:
                fn += 1
            else:
                tn += 1
        rows[label.value] = _class_metrics(tp, fp, fn, tn)
    em = sum(1 for p, g in zip(pred_sets, gold_sets) if p.labels == g.labels) / n
    macro_rows = (
        {k: v for k, v in rows.items() if v.support > 0} if skip_empty else rows
    )
    avg, _ = _aggregates(rows)
    _, macro = _aggregates(macro_rows) if macro_rows else (avg, Aggregate(0, 0, 0, 0))
    return MetricsReport(
        per_class=rows,
        avg=avg,
        macro=macro,
        em=em,
        n_instances=n,
        pooled_mcc=binary_mcc_counts(*pooled_counts(rows)),
    )


# ---------------------------------------------------------------------------
# detoxification (text style transfer) metrics


class ReductionMode(str, Enum):
    NET_REDUCTION = "net_reduction"
    STYLE_ACCURACY = "style_accuracy"


def detox_reduction(
    orig: Sequence["ToxicityScore | float"],
    detoxed: Sequence["ToxicityScore | float"],
    mode: ReductionMode = ReductionMode.NET_REDUCTION,
    threshold: float = 0.5,
) -> float:
    """Style-transfer accuracy as a percent in [0, 100].

    ``net_reduction``: relative drop in mean toxicity probability.
    ``style_accuracy``: share of rewrites scoring below the threshold.
    """
    if len(orig) != len(detoxed):
        raise LengthMismatch(len(orig), len(detoxed))
    if not orig:
        raise EmptyInput("detox_reduction requires at least one pair")
    orig_p = [as_probability(s) for s in orig]
    detox_p = [as_probability(s) for s in detoxed]
    if mode is ReductionMode.STYLE_ACCURACY:
        return 100.0 * sum(1 for p in detox_p if p < threshold) / len(detox_p)
    mean_orig = sum(orig_p) / len(orig_p)
    mean_detox = sum(detox_p) / len(detox_p)
    if mean_orig == 0.0:
        raise ZeroBaseline("net reduction undefined: mean original score is 0")
    reduction = 100.0 * (mean_orig - mean_detox) / mean_orig
    return min(max(reduction, 0.0), 100.0)


def fluency(outputs: Sequence[str], scorer: Scorer) -> float:
    """Mean acceptability of the outputs, as a percent.

    The scorer is any callable returning a 0/1 judgment or probability per
    text (a linguistic-acceptability classifier in production, a stub in
    tests). Scorer exceptions surface as ScorerError with the failing index.
    """
    if not outputs:
        raise EmptyInput("fluency requires at least one output")
    total = 0.0
    for i, text in enumerate(outputs):
        try:
            value = float(scorer(text))
        except Exception as exc:
            raise ScorerError(i, exc) from exc
        if not 0.0 <= value <= 1.0:
            raise ScorerError(i, ValueError(f"acceptability {value} outside [0,1]"))
        total += value
    return 100.0 * total / len(outputs)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v):
        raise DimensionMismatch(f"vector dimensions differ: {len(u)} vs {len(v)}")
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroDivisionError("zero vector")
    return dot / (nu * nv)


def pair_similarities(
    pairs: Sequence[tuple[str, str]],
    embedder: Embedder,
) -> list[float]:
    """Raw (unclipped) cosine similarity per (original, rewrite) pair."""
    sims: list[float] = []
    for i, (a, b) in enumerate(pairs):
        try:
            sim = cosine(embedder(a), embedder(b))
        except ZeroDivisionError:
            raise ZeroVector(i) from None
        sims.append(sim)
    return sims


def preservation(pairs: Sequence[tuple[str, str]], embedder: Embedder) -> float:
    """Mean embedding cosine similarity as a percent in [0, 100].

    Negative similarities floor at 0 for the percent report; use
    ``pair_similarities`` for the raw values.
    """
    if not pairs:
        raise EmptyInput("preservation requires at least one pair")
    sims = pair_similarities(pairs, embedder)
    clipped = [min(max(s, 0.0), 1.0) for s in sims]
    return 100.0 * sum(clipped) / len(clipped)


def j_score(detox: float, fl: float, preserve: float) -> float:
    """Harmonic mean of the three style-transfer components (each 0..100).

    Any zero component makes the whole score 0.
    """
    for name, value in (("detox", detox), ("fl", fl), ("preserve", preserve)):
        if not 0.0 <= value <= 100.0:
            raise ValueError(f"{name} must be in [0, 100], got {value}")
    if detox == 0.0 or fl == 0.0 or preserve == 0.0:
        return 0.0
    return 3.0 / (1.0 / detox + 1.0 / fl + 1.0 / preserve)


@dataclass(frozen=True)
class PairScore:
    """One row of the per-pair score table."""

    id: str
    orig_p: float
    detox_p: float
    fluent: float
    sim: float  # raw cosine, may be negative


@dataclass(frozen=True)
class TstReport:
    """The four detoxification numbers plus the per-pair table."""

    detox: float
    fluency: float
    preserve: float
    j_score: float
    pairs: tuple[PairScore, ...] = ()

    def __post_init__(self) -> None:
        for name in ("detox", "fluency", "preserve", "j_score"):
            value = getattr(self, name)
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"{name} out of [0,100]: {value}")


def evaluate_tst(
    pairs: Sequence[tuple[str, str]],
    orig_scores: Sequence["ToxicityScore | float"],
    detox_scores: Sequence["ToxicityScore | float"],
    scorer: Scorer,
    embedder: Embedder,
    mode: ReductionMode = ReductionMode.NET_REDUCTION,
    threshold: float = 0.5,
    ids: "Sequence[str] | None" = None,
) -> TstReport:
    """Full detoxification evaluation for (original, rewrite) text pairs."""
    if not (len(pairs) == len(orig_scores) == len(detox_scores)):
        raise LengthMismatch(len(pairs), min(len(orig_scores), len(detox_scores)))
    detox = detox_reduction(orig_scores, detox_scores, mode=mode, threshold=threshold)
    rewrites = [b for _, b in pairs]
    fluent_values = []
    for i, text in enumerate(rewrites):
        try:
            fluent_values.append(float(scorer(text)))
        except Exception as exc:
            raise ScorerError(i, exc) from exc
    fl = 100.0 * sum(fluent_values) / len(fluent_values)
    sims = pair_similarities(pairs, embedder)
    clipped = [min(max(s, 0.0), 1.0) for s in sims]
    preserve = 100.0 * sum(clipped) / len(clipped)
    row_ids = list(ids) if ids is not None else [str(i) for i in range(len(pairs))]
    table = tuple(
        PairScore(
            id=row_ids[i],
            orig_p=as_probability(orig_scores[i]),
            detox_p=as_probability(detox_scores[i]),
            fluent=fluent_values[i],
            sim=sims[i],
        )
        for i in range(len(pairs))
    )
    return TstReport(
        detox=detox,
        fluency=fl,
        preserve=preserve,
        j_score=j_score(detox, fl, preserve),
        pairs=table,
    )


# ---------------------------------------------------------------------------
# inter-rater agreement


class Weighting(str, Enum):
    UNWEIGHTED = "unweighted"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    weighting: Weighting
    scale_size: int


def weighted_kappa(
    a: Sequence[int],
    b: Sequence[int],
    scale_size: int,
    weighting: Weighting = Weighting.QUADRATIC,
) -> AgreementReport:
    """Cohen's kappa over ordinal ratings in 1..scale_size.

    Quadratic weighting penalizes disagreement by squared distance:
    w_ij = (i-j)^2 / (K-1)^2; the unweighted variant scores any
    disagreement as 1. Two identical constant raters agree perfectly
    (kappa = 1) even though chance agreement is degenerate there.
    """
    if len(a) != len(b):
        raise LengthMismatch(len(a), len(b))
    if not a:
        raise EmptyInput("weighted_kappa requires at least one rating pair")
    if scale_size < 1:
        raise ValueError("scale_size must be >= 1")
    for rating in list(a) + list(b):
        if not 1 <= rating <= scale_size:
            raise ValueError(f"rating {rating} outside 1..{scale_size}")
    if scale_size == 1:
        return AgreementReport(kappa=1.0, weighting=weighting, scale_size=1)

    k = scale_size
    n = len(a)
    observed = [[0.0] * k for _ in range(k)]
    for x, y in zip(a, b):
        observed[x - 1][y - 1] += 1.0 / n
    pa = [sum(1 for x in a if x == i + 1) / n for i in range(k)]
    pb = [sum(1 for y in b if y == i + 1) / n for i in range(k)]

    if weighting is Weighting.QUADRATIC:
        weight = lambda i, j: (i - j) ** 2 / (k - 1) ** 2
    else:
        weight = lambda i, j: 0.0 if i == j else 1.0

    num = sum(weight(i, j) * observed[i][j] for i in range(k) for j in range(k))
    den = sum(weight(i, j) * pa[i] * pb[j] for i in range(k) for j in range(k))
    if den == 0.0:
        # both raters constant; identical ratings mean perfect agreement
        kappa = 1.0 if num == 0.0 else 0.0
    else:
        kappa = 1.0 - num / den
    return AgreementReport(kappa=kappa, weighting=weighting, scale_size=scale_size)
