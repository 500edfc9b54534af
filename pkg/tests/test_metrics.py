import numpy as np
import pytest

from admitnet.metrics import (
    ConfusionMatrix,
    MetricsReport,
    auroc,
    classification_metrics,
    confusion_matrix,
    evaluate,
    format_confusion,
    format_report,
)
from oracles import brute_force_auroc


class TestConfusion:
    def test_hand_count(self):
        assert confusion_matrix([1, 1, 0, 0], [1, 0, 0, 1]) == ConfusionMatrix(tp=1, fp=1, tn=1, fn=1)

    def test_perfect(self):
        cm = confusion_matrix([1, 0, 1], [1, 0, 1])
        assert cm.fp == cm.fn == 0 and cm.total == 3

    def test_all_missed(self):
        assert confusion_matrix([0] * 4, [1] * 4).fn == 4

    def test_errors(self):
        with pytest.raises(ValueError):
            confusion_matrix([1], [1, 0])
        with pytest.raises(ValueError):
            confusion_matrix([], [])
        with pytest.raises(ValueError):
            confusion_matrix([2], [1])


class TestClassification:
    def test_uniform(self):
        assert classification_metrics(ConfusionMatrix(1, 1, 1, 1)) == (0.5, 0.5, 0.5, 0.5)

    def test_zero_denominator(self):
        acc, prec, rec, f1 = classification_metrics(ConfusionMatrix(0, 0, 3, 2))
        assert (prec, rec, f1) == (0.0, 0.0, 0.0) and acc == 0.6

    def test_perfect(self):
        assert classification_metrics(ConfusionMatrix(4, 0, 3, 0)) == (1.0, 1.0, 1.0, 1.0)

    def test_empty(self):
        with pytest.raises(ValueError):
            classification_metrics(ConfusionMatrix(0, 0, 0, 0))

    def test_accuracy_is_mean_agreement(self, rng):
        for _ in range(50):
            p, a = rng.integers(0, 2, 37), rng.integers(0, 2, 37)
            acc = classification_metrics(confusion_matrix(p, a))[0]
            assert abs(acc - np.mean(p == a)) <= 1e-15

    def test_permutation_invariant(self, rng):
        p, a = rng.integers(0, 2, 50), rng.integers(0, 2, 50)
        perm = rng.permutation(50)
        assert classification_metrics(confusion_matrix(p, a)) == classification_metrics(confusion_matrix(p[perm], a[perm]))

    def test_f1_harmonic(self):
        _, prec, rec, f1 = classification_metrics(ConfusionMatrix(6, 2, 5, 3))
        assert f1 == pytest.approx(2 / (1 / prec + 1 / rec))


class TestAuroc:
    def test_examples(self):
        assert auroc([0.9, 0.1], [1, 0]) == 1.0
        assert auroc([0.9, 0.8, 0.3], [1, 0, 1]) == 0.5
        assert auroc([0.4] * 6, [1, 0, 1, 0, 0, 1]) == 0.5

    def test_brute_force_oracle(self, rng):
        worst = 0.0
        for _ in range(200):
            n = int(rng.integers(2, 51))
            labels = rng.integers(0, 2, n)
            labels[:2] = [0, 1]
            # coarse grid forces ties
            scores = rng.integers(0, 8, n) / 7.0
            worst = max(worst, abs(auroc(scores, labels) - brute_force_auroc(scores, labels)))
        assert worst <= 1e-12

    def test_complement(self, rng):
        for _ in range(20):
            scores = rng.random(30)
            labels = np.r_[0, 1, rng.integers(0, 2, 28)]
            assert auroc(scores, labels) + auroc(-scores, labels) == pytest.approx(1.0, abs=1e-12)

    def test_single_class(self):
        with pytest.raises(ValueError):
            auroc([0.1, 0.2], [1, 1])


def test_evaluate_and_format():
    report, cm = evaluate([0.9, 0.2, 0.7, 0.4], [1, 0, 1, 0], [1, 0, 0, 1])
    assert cm == ConfusionMatrix(1, 1, 1, 1)
    assert report == MetricsReport(0.5, 0.5, 0.5, 0.5, 0.75)
    table = format_report({"FF": report})
    assert "AU-ROC" in table.splitlines()[0] and "0.5000" in table
    assert format_confusion(cm).count("\n") == 2
