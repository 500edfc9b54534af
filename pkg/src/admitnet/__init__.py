"""Interpretable admission prediction: essay features, preprocessing,
feed-forward and input-convex classifiers, PCA, saliency and LIME."""

from .explain import LimeConfig, global_aggregate, lime_explain, saliency_ranking
from .metrics import auroc, classification_metrics, confusion_matrix
from .model import ModelFile, train_model
from .nn import ArchitectureSpec, NetworkParams, TrainConfig, init_params, predict, train
from .pca import PcaModel, fit_pca, project
from .tabular import FilterRules, PipelineConfig, PipelineStats, TabularDataset, apply_pipeline, fit_pipeline, split
from .textfeat import SentimentLexicon, default_lexicon, extract_piq_features

__version__ = "0.1.0"
