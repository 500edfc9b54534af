"""Binary classification metrics. Class 1 is the positive class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def as_array(self) -> np.ndarray:
        """Rows = actual (0, 1), columns = predicted (0, 1)."""
        return np.array([[self.tn, self.fp], [self.fn, self.tp]])


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auroc: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _binary(v, name):
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all((v == 0) | (v == 1)):
        raise ValueError(f"{name} must contain only 0 and 1")
    return v.astype(np.int64)


def confusion_matrix(predicted, actual) -> ConfusionMatrix:
    predicted = _binary(predicted, "predicted")
    actual = _binary(actual, "actual")
    if len(predicted) != len(actual):
        raise ValueError(f"length mismatch: {len(predicted)} predictions, {len(actual)} labels")
    if len(actual) == 0:
        raise ValueError("empty input")
    return ConfusionMatrix(
        tp=int(np.sum((predicted == 1) & (actual == 1))),
        fp=int(np.sum((predicted == 1) & (actual == 0))),
        tn=int(np.sum((predicted == 0) & (actual == 0))),
        fn=int(np.sum((predicted == 0) & (actual == 1))),
    )


def classification_metrics(cm: ConfusionMatrix):
    """(accuracy, precision, recall, f1); zero denominators give 0 rather than NaN."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return accuracy, precision, recall, f1


def auroc(scores, actual) -> float:
    """Probability that a random positive outscores a random negative (ties count 1/2).

    Computed from average ranks (Mann-Whitney U).
    """
    scores = np.asarray(scores, dtype=np.float64)
    actual = _binary(actual, "actual")
    if len(scores) != len(actual):
        raise ValueError("scores and labels differ in length")
    n_pos = int(actual.sum())
    n_neg = len(actual) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs at least one positive and one negative label")
    ranks = rankdata(scores)
    u = ranks[actual == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def evaluate(probs_class1, predicted, actual) -> tuple[MetricsReport, ConfusionMatrix]:
    cm = confusion_matrix(predicted, actual)
    acc, prec, rec, f1 = classification_metrics(cm)
    return MetricsReport(acc, prec, rec, f1, auroc(probs_class1, actual)), cm


def format_report(rows: dict[str, MetricsReport]) -> str:
    """Aligned text table: one row per model, columns Accuracy .. AU-ROC."""
    heads = ["Model", "Accuracy", "Precision", "Recall", "F1-Score", "AU-ROC"]
    width = max([len(heads[0])] + [len(k) for k in rows])
    lines = [f"{heads[0]:<{width}}  " + "  ".join(f"{h:>9}" for h in heads[1:])]
    for name, r in rows.items():
        vals = (r.accuracy, r.precision, r.recall, r.f1, r.auroc)
        lines.append(f"{name:<{width}}  " + "  ".join(f"{v:>9.4f}" for v in vals))
    return "\n".join(lines)


def format_confusion(cm: ConfusionMatrix) -> str:
    return (
        "               pred 0   pred 1\n"
        f"actual 0   {cm.tn:>8} {cm.fp:>8}\n"
        f"actual 1   {cm.fn:>8} {cm.tp:>8}"
    )
