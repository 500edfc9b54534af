"""Persisted models and the train/evaluate workflow.

A model file is versioned JSON holding the fitted preprocessing stats, the
optional PCA, the network weights and the training config. Floats are
written with ``repr`` (shortest round-trip form), so loading gives back the
exact same values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics, nn
from .pca import PcaModel, fit_pca, project
from .tabular import PipelineConfig, PipelineStats, TabularDataset, apply_pipeline, fit_pipeline, split

FORMAT_VERSION = 1
TRAIN_FRACTION = 0.8


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ModelFile:
    params: nn.NetworkParams
    pipeline_stats: PipelineStats
    train_config: nn.TrainConfig
    feature_names: tuple[str, ...]
    feature_std: np.ndarray  # per-feature std of the training split, after preprocessing
    created_seed: int
    train_fraction: float = TRAIN_FRACTION
    pca_model: PcaModel | None = None
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        expected = self.pca_model.input_dim if self.pca_model else self.params.spec.input_dim
        if len(self.feature_names) != expected:
            raise ModelFormatError(f"{len(self.feature_names)} feature names but model expects {expected} inputs")
        if self.pca_model and self.pca_model.n_components != self.params.spec.input_dim:
            raise ModelFormatError("PCA output size does not match the network input size")

    @property
    def architecture(self) -> nn.ArchitectureSpec:
        return self.params.spec

    def network_input(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return project(self.pca_model, x) if self.pca_model else x

    def predict_proba(self, x) -> np.ndarray:
        """Class probabilities for preprocessed (pre-PCA) feature rows."""
        return nn.forward(self.params, self.network_input(x))[1]

    def predict(self, x):
        return nn.predict(self.params, self.network_input(x))

    def input_gradient(self, x) -> np.ndarray:
        """Class-1 logit gradient w.r.t. preprocessed features (chained through PCA)."""
        g = nn.input_gradient(self.params, self.network_input(x))
        return g @ self.pca_model.components if self.pca_model else g

    def transform(self, data: TabularDataset) -> TabularDataset:
        return apply_pipeline(data, self.pipeline_stats)

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "architecture": self.params.spec.to_dict(),
            "params": {k: v.tolist() for k, v in self.params.arrays.items()},
            "pipeline_stats": self.pipeline_stats.to_dict(),
            "pca_model": None if self.pca_model is None else self.pca_model.to_dict(),
            "train_config": self.train_config.to_dict(),
            "feature_names": list(self.feature_names),
            "feature_std": self.feature_std.tolist(),
            "created_seed": self.created_seed,
            "train_fraction": self.train_fraction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelFile":
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model format version {version!r}")
        try:
            params = nn.NetworkParams.from_dict({"spec": d["architecture"], "arrays": d["params"]})
            return cls(
                params=params,
                pipeline_stats=PipelineStats.from_dict(d["pipeline_stats"]),
                train_config=nn.TrainConfig.from_dict(d["train_config"]),
                feature_names=tuple(d["feature_names"]),
                feature_std=np.asarray(d["feature_std"], dtype=np.float64),
                created_seed=int(d["created_seed"]),
                train_fraction=float(d["train_fraction"]),
                pca_model=None if d["pca_model"] is None else PcaModel.from_dict(d["pca_model"]),
                format_version=version,
            )
        except (KeyError, TypeError) as exc:
            raise ModelFormatError(f"malformed model file: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "ModelFile":
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
        return cls.from_dict(d)


@dataclass
class TrainOutcome:
    model: ModelFile
    train: TabularDataset
    test: TabularDataset
    report: metrics.MetricsReport
    confusion: metrics.ConfusionMatrix
    losses: list = field(default_factory=list)


def architecture_for(kind: str, input_dim: int, **overrides) -> nn.ArchitectureSpec:
    if kind == nn.FF:
        return nn.ArchitectureSpec.feed_forward(input_dim, **overrides)
    if kind == nn.FICNN:
        return nn.ArchitectureSpec.ficnn(input_dim, **overrides)
    raise ValueError(f"unknown model kind {kind!r}")


def train_model(
    data: TabularDataset,
    config: PipelineConfig,
    kind: str,
    seed: int = 0,
    pca_retain: int | float | None = None,
    train_fraction: float = TRAIN_FRACTION,
    train_overrides: dict | None = None,
    arch_overrides: dict | None = None,
) -> TrainOutcome:
    """fit pipeline -> seeded split -> optional PCA on train -> train -> test metrics."""
    features, stats = fit_pipeline(data, config)
    train, test = split(features, train_fraction, seed)
    x_train = train.to_matrix()
    pca_model = fit_pca(x_train, pca_retain) if pca_retain is not None else None
    net_in = project(pca_model, x_train) if pca_model else x_train

    spec = architecture_for(kind, net_in.shape[1], **(arch_overrides or {}))
    train_config = nn.TrainConfig.for_kind(kind, **{"seed": seed, **(train_overrides or {})})
    result = nn.train(spec, train_config, net_in, train.target)

    model = ModelFile(
        params=result.params,
        pipeline_stats=stats,
        train_config=train_config,
        feature_names=features.column_names,
        feature_std=x_train.std(axis=0),
        created_seed=seed,
        train_fraction=train_fraction,
        pca_model=pca_model,
    )
    report, cm = evaluate_matrix(model, test.to_matrix(), test.target)
    return TrainOutcome(model, train, test, report, cm, result.losses)


def evaluate_matrix(model: ModelFile, x, labels):
    probs, pred = model.predict(x)
    return metrics.evaluate(probs[:, 1], pred, labels)


def evaluate(model: ModelFile, data: TabularDataset):
    """Metrics of ``model`` on raw (un-preprocessed) labelled data."""
    features = model.transform(data)
    if features.target is None:
        raise ValueError("evaluation data has no target column")
    return evaluate_matrix(model, features.to_matrix(), features.target)


def held_out_split(model: ModelFile, features: TabularDataset) -> TabularDataset:
    """Re-create the held-out split used at training time from preprocessed features."""
    return split(features, model.train_fraction, model.created_seed)[1]


def with_params(model: ModelFile, params: nn.NetworkParams) -> ModelFile:
    return replace(model, params=params)
