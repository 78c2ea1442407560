"""Metric arithmetic against hand-computed values and brute-force oracles."""
import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toxishield.core import BinaryLabel, CategoryLabel, LabelSet
from toxishield.errors import (
    EmptyInput,
    LengthMismatch,
    ScorerError,
    ZeroBaseline,
    ZeroVector,
)
from toxishield.metrics import (
    ConfusionMatrix,
    ReductionMode,
    Weighting,
    binary_mcc_counts,
    binary_report,
    detox_reduction,
    evaluate_tst,
    fluency,
    j_score,
    mcc,
    multilabel_report,
    per_class_mcc,
    preservation,
    weighted_kappa,
)

import oracles

T = BinaryLabel.TOXIC
N = BinaryLabel.NON_TOXIC


def labels_from_bits(bits):
    return [T if b else N for b in bits]


class TestBinaryReport:
    def test_perfect_prediction(self):
        golds = [T, N, T, N, N]
        report = binary_report(golds, golds)
        for row in report.per_class.values():
            assert row.precision == row.recall == row.f1 == 1.0
        assert report.accuracy == 1.0

    def test_frozen_example_p_two_thirds_r_half(self):
        # 10-instance set with toxic counts TP=2, FP=1, FN=2, TN=5;
        # oracle: P = 2/3, R = 1/2, F1 = 2PR/(P+R) = 4/7
        golds = labels_from_bits([1, 1, 1, 1, 0, 0, 0, 0, 0, 0])
        preds = labels_from_bits([1, 1, 0, 0, 1, 0, 0, 0, 0, 0])
        report = binary_report(preds, golds)
        toxic = report.per_class["toxic"]
        assert (toxic.tp, toxic.fp, toxic.fn, toxic.tn) == (2, 1, 2, 5)
        assert toxic.precision == pytest.approx(float(Fraction(2, 3)))
        assert toxic.recall == pytest.approx(0.5)
        assert toxic.f1 == pytest.approx(float(Fraction(4, 7)))

    def test_frozen_example_tp2_fp1_fn1_tn6(self):
        # oracle on these exact counts: P = 2/3, R = 2/3, F1 = 2/3
        golds = labels_from_bits([1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
        preds = labels_from_bits([1, 1, 0, 1, 0, 0, 0, 0, 0, 0])
        report = binary_report(preds, golds)
        toxic = report.per_class["toxic"]
        assert (toxic.tp, toxic.fp, toxic.fn, toxic.tn) == (2, 1, 1, 6)
        P, R, F = oracles.prf_from_counts(2, 1, 1)
        assert (P, R, F) == (Fraction(2, 3), Fraction(2, 3), Fraction(2, 3))
        assert toxic.precision == pytest.approx(float(P))
        assert toxic.recall == pytest.approx(float(R))
        assert toxic.f1 == pytest.approx(float(F))

    def test_degenerate_predictor_zero_division(self):
        golds = [T, N, T, N]
        preds = [N, N, N, N]
        report = binary_report(preds, golds)
        toxic = report.per_class["toxic"]
        assert toxic.recall == 0.0
        assert toxic.precision == 0.0
        assert "precision" in toxic.zero_division

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            binary_report([T], [T, N])

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            binary_report([], [])

    def test_order_invariance(self):
        golds = labels_from_bits([1, 0, 1, 1, 0, 0, 1, 0])
        preds = labels_from_bits([1, 1, 0, 1, 0, 0, 0, 1])
        base = binary_report(preds, golds)
        rng = random.Random(7)
        order = list(range(len(golds)))
        rng.shuffle(order)
        shuffled = binary_report([preds[i] for i in order], [golds[i] for i in order])
        assert shuffled == base

    def test_f1_recomputable_from_p_and_r(self):
        golds = labels_from_bits([1, 0, 1, 1, 0, 0, 1, 0, 1, 1])
        preds = labels_from_bits([1, 1, 0, 1, 0, 1, 0, 0, 1, 1])
        report = binary_report(preds, golds)
        for row in report.per_class.values():
            if row.precision + row.recall:
                expected = 2 * row.precision * row.recall / (row.precision + row.recall)
                assert row.f1 == pytest.approx(expected, abs=1e-9)

    def test_exhaustive_oracle_equivalence_small(self):
        # all (pred, gold) assignments for n <= 4 against the counting oracle
        for n in range(1, 5):
            for pred_bits in itertools.product([0, 1], repeat=n):
                for gold_bits in itertools.product([0, 1], repeat=n):
                    report = binary_report(
                        labels_from_bits(pred_bits), labels_from_bits(gold_bits)
                    )
                    tp, fp, fn, tn = oracles.binary_counts(pred_bits, gold_bits, 1)
                    P, R, F = oracles.prf_from_counts(tp, fp, fn)
                    toxic = report.per_class["toxic"]
                    assert toxic.precision == pytest.approx(float(P), abs=1e-12)
                    assert toxic.recall == pytest.approx(float(R), abs=1e-12)
                    assert toxic.f1 == pytest.approx(float(F), abs=1e-12)
                    assert toxic.mcc == pytest.approx(
                        oracles.mcc_from_counts(tp, fp, fn, tn), abs=1e-12
                    )


class TestMcc:
    def test_perfect_diagonal(self):
        cm = ConfusionMatrix(("a", "b"), ((3, 0), (0, 5)))
        assert mcc(cm) == pytest.approx(1.0)

    def test_symmetry_all_ones(self):
        cm = ConfusionMatrix(("a", "b"), ((1, 1), (1, 1)))
        assert mcc(cm) == 0.0

    def test_frozen_value_tp6_tn2_fp1_fn1(self):
        # exact rational oracle: (6*2-1*1)/sqrt(7*7*3*3) = 11/21
        assert binary_mcc_counts(tp=6, fp=1, fn=1, tn=2) == pytest.approx(11 / 21)

    def test_frozen_value_tp4_tn2_fp1_fn1(self):
        # nearby matrix hitting ~0.467: (4*2-1)/sqrt(5*5*3*3) = 7/15
        assert binary_mcc_counts(tp=4, fp=1, fn=1, tn=2) == pytest.approx(7 / 15)

    def test_zero_denominator_convention(self):
        assert binary_mcc_counts(tp=0, fp=0, fn=2, tn=3) == 0.0

    def test_multiclass_requires_positive_label(self):
        cm = ConfusionMatrix(("a", "b", "c"), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
        with pytest.raises(ValueError):
            mcc(cm)
        assert mcc(cm, positive_label="a") == pytest.approx(1.0)

    def test_per_class_reduces_to_binary_when_k2(self):
        cm = ConfusionMatrix(("neg", "pos"), ((6, 2), (1, 4)))
        per_class = per_class_mcc(cm)
        assert per_class["pos"] == pytest.approx(mcc(cm))
        assert per_class["neg"] == pytest.approx(mcc(cm))

    def test_one_vs_rest_counts(self):
        cm = ConfusionMatrix(("a", "b", "c"), ((2, 1, 0), (0, 3, 1), (1, 0, 2)))
        tp, fp, fn, tn = cm.one_vs_rest("b")
        assert (tp, fp, fn, tn) == (3, 1, 1, 5)
        assert cm.total == 10


def ls(*labels):
    return LabelSet(frozenset(labels))


class TestMultilabelReport:
    def test_perfect_prediction(self):
        sets = [ls(CategoryLabel.PROFANITY, CategoryLabel.INSULT), ls(CategoryLabel.NON_TOXIC)]
        report = multilabel_report(sets, sets)
        assert report.em == 1.0
        assert report.per_class["Profanity"].f1 == 1.0
        # zero-support classes contribute 0 to macro by default
        assert report.per_class["Threat"].f1 == 0.0
        assert report.macro.f1 < 1.0

    def test_skip_empty_macro(self):
        sets = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.NON_TOXIC)]
        report = multilabel_report(sets, sets, skip_empty=True)
        assert report.macro.f1 == pytest.approx(1.0)

    def test_frozen_two_instance_example(self):
        preds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.NON_TOXIC)]
        golds = [ls(CategoryLabel.PROFANITY, CategoryLabel.INSULT), ls(CategoryLabel.NON_TOXIC)]
        report = multilabel_report(preds, golds)
        assert report.em == 0.5
        assert report.per_class["Insult"].recall == 0.0
        assert report.per_class["Profanity"].f1 == 1.0

    def test_single_instance_disjoint_em_zero(self):
        report = multilabel_report([ls(CategoryLabel.THREAT)], [ls(CategoryLabel.INSULT)])
        assert report.em == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            multilabel_report([ls(CategoryLabel.THREAT)], [])

    def test_avg_is_micro_pooled(self):
        preds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.INSULT), ls(CategoryLabel.NON_TOXIC)]
        golds = [ls(CategoryLabel.PROFANITY, CategoryLabel.INSULT), ls(CategoryLabel.INSULT), ls(CategoryLabel.THREAT)]
        report = multilabel_report(preds, golds)
        rows = [
            oracles.multilabel_counts(
                [p.labels for p in preds], [g.labels for g in golds], label
            )
            for label in CategoryLabel
        ]
        P, R, F = oracles.micro_prf(rows)
        assert report.avg.precision == pytest.approx(float(P), abs=1e-12)
        assert report.avg.recall == pytest.approx(float(R), abs=1e-12)
        assert report.avg.f1 == pytest.approx(float(F), abs=1e-12)

    def test_avg_mcc_support_weighted(self):
        preds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.INSULT)]
        golds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.PROFANITY)]
        report = multilabel_report(preds, golds)
        supports = {name: row.support for name, row in report.per_class.items()}
        total = sum(supports.values())
        expected = (
            sum(row.mcc * row.support for row in report.per_class.values()) / total
        )
        assert report.avg.mcc == pytest.approx(expected)

    def test_pooled_mcc_alternative_convention(self):
        preds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.INSULT)]
        golds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.PROFANITY)]
        report = multilabel_report(preds, golds)
        tp = sum(r.tp for r in report.per_class.values())
        fp = sum(r.fp for r in report.per_class.values())
        fn = sum(r.fn for r in report.per_class.values())
        tn = sum(r.tn for r in report.per_class.values())
        assert report.pooled_mcc == pytest.approx(
            oracles.mcc_from_counts(tp, fp, fn, tn)
        )
        assert report.pooled_mcc != report.avg.mcc  # distinct conventions here

    def test_macro_is_unweighted_mean(self):
        preds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.INSULT)]
        golds = [ls(CategoryLabel.PROFANITY, CategoryLabel.INSULT), ls(CategoryLabel.INSULT)]
        report = multilabel_report(preds, golds)
        k = len(report.per_class)
        assert report.macro.f1 == pytest.approx(
            sum(r.f1 for r in report.per_class.values()) / k
        )

    def test_micro_sensitive_to_support_macro_not(self):
        # duplicate instances of one class shift micro but leave per-class
        # values (hence macro over fixed values) unchanged
        base_preds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.INSULT)]
        base_golds = [ls(CategoryLabel.PROFANITY), ls(CategoryLabel.THREAT)]
        grown_preds = base_preds + [ls(CategoryLabel.PROFANITY)] * 3
        grown_golds = base_golds + [ls(CategoryLabel.PROFANITY)] * 3
        base = multilabel_report(base_preds, base_golds)
        grown = multilabel_report(grown_preds, grown_golds)
        assert base.per_class["Threat"].recall == grown.per_class["Threat"].recall
        assert base.avg.f1 != grown.avg.f1


class TestDetoxReduction:
    def test_full_reduction_both_modes(self):
        assert detox_reduction([1.0, 1.0], [0.0, 0.0]) == 100.0
        assert detox_reduction([1.0, 1.0], [0.0, 0.0], ReductionMode.STYLE_ACCURACY, 0.5) == 100.0

    def test_identity_zero_reduction(self):
        assert detox_reduction([0.4, 0.6], [0.4, 0.6]) == 0.0

    def test_frozen_75_percent(self):
        # means 0.8 -> 0.2: 100 * (0.8 - 0.2) / 0.8 = 75
        assert detox_reduction([0.9, 0.7], [0.3, 0.1]) == pytest.approx(75.0)

    def test_zero_baseline(self):
        with pytest.raises(ZeroBaseline):
            detox_reduction([0.0, 0.0], [0.0, 0.0])

    def test_negative_clipped_to_zero(self):
        assert detox_reduction([0.2], [0.9]) == 0.0

    def test_style_accuracy_counts_threshold(self):
        got = detox_reduction([1.0] * 4, [0.1, 0.6, 0.4, 0.9], ReductionMode.STYLE_ACCURACY, 0.5)
        assert got == pytest.approx(50.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            detox_reduction([0.5], [0.5, 0.5])


class TestFluency:
    def test_accept_all(self):
        assert fluency(["a", "b"], lambda t: 1) == 100.0

    def test_reject_all(self):
        assert fluency(["a", "b"], lambda t: 0) == 0.0

    def test_three_of_four(self):
        outputs = ["a", "b", "c", "d"]
        assert fluency(outputs, lambda t: 0 if t == "d" else 1) == 75.0

    def test_scorer_error_carries_index(self):
        def bad(text):
            if text == "b":
                raise RuntimeError("boom")
            return 1

        with pytest.raises(ScorerError) as info:
            fluency(["a", "b"], bad)
        assert info.value.index == 1

    def test_out_of_range_score_rejected(self):
        with pytest.raises(ScorerError):
            fluency(["a"], lambda t: 1.5)


class TestPreservation:
    def test_identical_texts(self):
        embed = lambda t: [1.0, 2.0, 3.0]
        assert preservation([("x", "x")], embed) == pytest.approx(100.0)

    def test_orthogonal_vectors(self):
        embed = lambda t: [1.0, 0.0] if t == "a" else [0.0, 1.0]
        assert preservation([("a", "b")], embed) == pytest.approx(0.0)

    def test_frozen_cosine_7071(self):
        embed = lambda t: [1.0, 0.0] if t == "a" else [1.0, 1.0]
        assert preservation([("a", "b")], embed) == pytest.approx(100 / math.sqrt(2), abs=1e-9)

    def test_zero_vector_error(self):
        embed = lambda t: [0.0, 0.0]
        with pytest.raises(ZeroVector) as info:
            preservation([("a", "b")], embed)
        assert info.value.index == 0

    def test_negative_similarity_floors_at_zero(self):
        embed = lambda t: [1.0] if t == "a" else [-1.0]
        assert preservation([("a", "b")], embed) == 0.0

    def test_dimension_mismatch(self):
        from toxishield.errors import DimensionMismatch

        embed = lambda t: [1.0] if t == "a" else [1.0, 2.0]
        with pytest.raises(DimensionMismatch):
            preservation([("a", "b")], embed)


class TestJScore:
    def test_table_gpt4o_row(self):
        assert j_score(96.17, 99.01, 73.86) == pytest.approx(88.14, abs=0.01)

    def test_table_llama32_row(self):
        assert j_score(95.27, 97.03, 67.07) == pytest.approx(84.00, abs=0.01)

    @given(x=st.floats(min_value=0.001, max_value=100))
    def test_identity_on_equal_components(self, x):
        assert j_score(x, x, x) == pytest.approx(x, rel=1e-12)

    @given(
        a=st.floats(min_value=0.001, max_value=100),
        b=st.floats(min_value=0.001, max_value=100),
        c=st.floats(min_value=0.001, max_value=100),
    )
    def test_true_harmonic_bounds(self, a, b, c):
        # a harmonic mean is bracketed by its smallest component below
        # and three times it above (n = 3 components)
        score = j_score(a, b, c)
        smallest = min(a, b, c)
        assert smallest - 1e-9 <= score <= 3 * smallest + 1e-9

    def test_zero_component_zeroes_score(self):
        assert j_score(0.0, 99.0, 73.0) == 0.0
        assert j_score(96.0, 0.0, 73.0) == 0.0
        assert j_score(96.0, 99.0, 0.0) == 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            j_score(101.0, 50.0, 50.0)

    @given(
        a=st.floats(min_value=0.1, max_value=100),
        b=st.floats(min_value=0.1, max_value=100),
        c=st.floats(min_value=0.1, max_value=100),
    )
    def test_matches_harmonic_oracle(self, a, b, c):
        assert j_score(a, b, c) == pytest.approx(oracles.harmonic3(a, b, c), rel=1e-12)


class TestEvaluateTst:
    def test_fully_populated_report(self):
        pairs = [("you idiot fix this", "please fix this"), ("damn slow", "quite slow")]
        report = evaluate_tst(
            pairs,
            orig_scores=[0.9, 0.8],
            detox_scores=[0.1, 0.0],
            scorer=lambda t: 1,
            embedder=lambda t: [1.0, float(len(t))],
            ids=["a", "b"],
        )
        assert len(report.pairs) == 2
        assert report.fluency == 100.0
        assert report.detox == pytest.approx(100 * (0.85 - 0.05) / 0.85)
        assert report.j_score == pytest.approx(
            oracles.harmonic3(report.detox, report.fluency, report.preserve)
        )
        assert report.pairs[0].id == "a"


class TestWeightedKappa:
    def test_perfect_agreement(self):
        for k in (2, 3, 5):
            ratings = [1 + i % k for i in range(20)]
            assert weighted_kappa(ratings, ratings, k).kappa == pytest.approx(1.0)

    def test_frozen_exact_example(self):
        # exact-arithmetic oracle gives 16/17 for this 5-point case
        report = weighted_kappa([1, 2, 3, 4, 5], [1, 2, 3, 4, 4], 5)
        expected = oracles.quadratic_kappa([1, 2, 3, 4, 5], [1, 2, 3, 4, 4], 5)
        assert expected == Fraction(16, 17)
        assert report.kappa == pytest.approx(float(expected), abs=1e-12)

    def test_monte_carlo_independent_raters(self):
        rng = random.Random(42)
        n = 10_000
        a = [rng.randint(1, 5) for _ in range(n)]
        b = [rng.randint(1, 5) for _ in range(n)]
        report = weighted_kappa(a, b, 5)
        assert abs(report.kappa) < 0.05

    def test_unweighted_variant(self):
        a = [1, 1, 2, 2]
        b = [1, 2, 2, 1]
        report = weighted_kappa(a, b, 2, Weighting.UNWEIGHTED)
        # observed agreement 0.5, chance 0.5 -> kappa 0
        assert report.kappa == pytest.approx(0.0)

    def test_identical_constant_raters(self):
        report = weighted_kappa([3, 3, 3], [3, 3, 3], 5)
        assert report.kappa == 1.0

    def test_constant_but_different_raters(self):
        report = weighted_kappa([1, 1, 1], [2, 2, 2], 5)
        assert report.kappa == pytest.approx(0.0)

    def test_rating_out_of_scale(self):
        with pytest.raises(ValueError):
            weighted_kappa([1, 6], [1, 2], 5)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            weighted_kappa([1], [1, 2], 5)

    @given(st.lists(st.integers(min_value=1, max_value=4), min_size=2, max_size=30))
    @settings(max_examples=100)
    def test_matches_exact_oracle(self, ratings):
        rng = random.Random(sum(ratings))
        other = [min(4, max(1, r + rng.choice([-1, 0, 1]))) for r in ratings]
        report = weighted_kappa(ratings, other, 4)
        expected = oracles.quadratic_kappa(ratings, other, 4)
        assert report.kappa == pytest.approx(float(expected), abs=1e-9)

    def test_kappa_never_exceeds_one(self):
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randint(1, 12)
            a = [rng.randint(1, 3) for _ in range(n)]
            b = [rng.randint(1, 3) for _ in range(n)]
            assert weighted_kappa(a, b, 3).kappa <= 1.0 + 1e-12
