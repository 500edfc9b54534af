"""Gradient saliency feature selection, tabular LIME and global aggregation.

A "model" here is anything with ``predict_proba(X) -> (n, 2)`` and, for
saliency, ``input_gradient(X) -> (n, d)`` (gradient of the class-1 logit).
``NetworkParams`` and ``ModelFile`` both qualify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg


@dataclass(frozen=True, eq=False)
class SaliencyRanking:
    scores: np.ndarray
    selected: tuple[int, ...]


@dataclass(frozen=True)
class LimeConfig:
    n_samples: int = 5000
    kernel_width: float | None = None  # None -> 0.75 * sqrt(number of explained features)
    ridge_alpha: float = 1.0
    seed: int = 0
    target_class: int = 1

    def __post_init__(self):
        if self.n_samples < 10:
            raise ValueError(f"n_samples must be at least 10, got {self.n_samples}")
        if self.kernel_width is not None and self.kernel_width <= 0:
            raise ValueError("kernel_width must be positive")
        if self.ridge_alpha < 0:
            raise ValueError("ridge_alpha must be non-negative")
        if self.target_class not in (0, 1):
            raise ValueError("target_class must be 0 or 1")

    def width_for(self, n_features: int) -> float:
        return self.kernel_width if self.kernel_width is not None else 0.75 * np.sqrt(n_features)


@dataclass(frozen=True, eq=False)
class LocalExplanation:
    instance_id: int
    features: tuple[int, ...]
    weights: np.ndarray
    intercept: float
    fidelity_r2: float


@dataclass(frozen=True, eq=False)
class GlobalExplanation:
    features: tuple[int, ...]
    mean_weight: np.ndarray
    importance: np.ndarray
    ranking: tuple[int, ...]  # feature indices, most important first

    def rows(self, names: Sequence[str] | None = None):
        """(name, mean signed weight, importance) in ranking order."""
        pos = {f: i for i, f in enumerate(self.features)}
        for f in self.ranking:
            i = pos[f]
            yield (names[f] if names is not None else str(f)), float(self.mean_weight[i]), float(self.importance[i])


def _ordered(scores: np.ndarray) -> np.ndarray:
    # descending score, ascending index on ties
    return np.lexsort((np.arange(len(scores)), -scores))


def saliency_ranking(model, data, k: int) -> SaliencyRanking:
    """Top-k features by mean absolute input gradient of the class-1 logit."""
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if len(data) == 0:
        raise ValueError("saliency needs at least one row")
    d = data.shape[1]
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in [1, {d}], got {k}")
    scores = np.abs(model.input_gradient(data)).mean(axis=0)
    return SaliencyRanking(scores=scores, selected=tuple(int(i) for i in _ordered(scores)[:k]))


def sample_perturbations(instance, n_samples: int, seed, feature_std) -> np.ndarray:
    """Row 0 is ``instance``; the rest add N(0, std_j) noise per feature, clamped to [0, 1].

    ``seed`` may be an int, a seed sequence or a ``numpy.random.Generator``.
    """
    instance = np.asarray(instance, dtype=np.float64)
    std = np.asarray(feature_std, dtype=np.float64)
    if std.shape != instance.shape:
        raise ValueError("feature_std must have one entry per feature")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noise = rng.standard_normal((n_samples - 1, len(instance))) * std
    out = np.empty((n_samples, len(instance)))
    out[0] = instance
    out[1:] = np.clip(instance + noise, 0.0, 1.0)
    # zero-std features stay exactly at the instance value
    frozen = std == 0
    out[1:, frozen] = instance[frozen]
    return out


def proximity_weight(distance, kernel_width: float):
    distance = np.asarray(distance, dtype=np.float64)
    if np.any(distance < 0):
        raise ValueError("distances must be non-negative")
    w = np.exp(-(distance**2) / kernel_width**2)
    return float(w) if w.ndim == 0 else w


class SingularSystemError(np.linalg.LinAlgError):
    pass


def weighted_ridge_fit(x, y, w, alpha: float, fit_intercept: bool = True):
    """Minimise ``sum w_i (y_i - b.x_i - b0)^2 + alpha ||b||^2`` (b0 unpenalised).

    Returns ``(coefficients, intercept, weighted_r2)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n, k = x.shape
    if len(y) != n or len(w) != n:
        raise ValueError("x, y and w disagree in length")
    if n < k + 1:
        raise ValueError(f"need at least {k + 1} rows for {k} features, got {n}")
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be non-negative with at least one positive")

    if fit_intercept:
        x_mean = w @ x / w.sum()
        y_mean = w @ y / w.sum()
    else:
        x_mean, y_mean = np.zeros(k), 0.0
    xc, yc = x - x_mean, y - y_mean
    gram = xc.T @ (w[:, None] * xc) + alpha * np.eye(k)
    rhs = xc.T @ (w * yc)
    if alpha == 0 and np.linalg.cond(gram) > 1e12:
        raise SingularSystemError("normal equations are singular; use ridge_alpha > 0")
    try:
        coef = linalg.cho_solve(linalg.cho_factor(gram), rhs)
    except np.linalg.LinAlgError:
        raise SingularSystemError("normal equations are singular; use ridge_alpha > 0") from None
    intercept = float(y_mean - x_mean @ coef)

    if np.ptp(y) == 0:
        return coef, intercept, 1.0
    resid = y - x @ coef - intercept
    y_bar = w @ y / w.sum()
    ss_res = w @ resid**2
    ss_tot = w @ (y - y_bar) ** 2
    return coef, intercept, float(1.0 - ss_res / ss_tot)


def lime_explain(model, instance, selected_features, config: LimeConfig, feature_std, instance_id: int = 0) -> LocalExplanation:
    """Weighted-ridge surrogate of the target-class probability around ``instance``.

    Only ``selected_features`` are perturbed; the rest stay at the instance
    values. The random stream depends on ``(config.seed, instance_id)`` only.
    """
    instance = np.asarray(instance, dtype=np.float64)
    sel = np.asarray(selected_features, dtype=np.intp)
    if sel.size == 0:
        raise ValueError("no features selected")
    std = np.asarray(feature_std, dtype=np.float64)
    active_std = np.zeros_like(instance)
    active_std[sel] = std[sel]

    rng = np.random.default_rng([config.seed, instance_id])
    samples = sample_perturbations(instance, config.n_samples, rng, active_std)
    y = model.predict_proba(samples)[:, config.target_class]

    scale = np.where(std[sel] > 0, std[sel], 1.0)
    dist = np.sqrt((((samples[:, sel] - instance[sel]) / scale) ** 2).sum(axis=1))
    weights = proximity_weight(dist, config.width_for(len(sel)))
    coef, intercept, r2 = weighted_ridge_fit(samples[:, sel], y, weights, config.ridge_alpha)
    return LocalExplanation(instance_id, tuple(int(i) for i in sel), coef, intercept, r2)


def global_aggregate(explanations: Sequence[LocalExplanation]) -> GlobalExplanation:
    """Mean signed weight and mean absolute weight per feature across instances."""
    if not explanations:
        raise ValueError("no explanations to aggregate")
    features = explanations[0].features
    for e in explanations[1:]:
        if e.features != features:
            raise ValueError("explanations cover different feature sets")
    weights = np.array([e.weights for e in explanations])
    mean_weight = weights.mean(axis=0)
    importance = np.abs(weights).mean(axis=0)
    order = np.lexsort((np.array(features), -importance))
    return GlobalExplanation(features, mean_weight, importance, tuple(features[i] for i in order))


def explain_rows(model, data, config: LimeConfig, feature_std, k: int | None = 20, selected=None, row_ids=None):
    """Saliency selection (unless ``selected`` is given), LIME per row, then aggregation.

    Returns ``(saliency or None, local explanations, global explanation)``.
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    saliency = None
    if selected is None:
        saliency = saliency_ranking(model, data, k)
        selected = saliency.selected
    row_ids = range(len(data)) if row_ids is None else row_ids
    local = [lime_explain(model, data[i], selected, config, feature_std, instance_id=int(rid))
             for i, rid in enumerate(row_ids)]
    return saliency, local, global_aggregate(local)
