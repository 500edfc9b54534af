"""Synthetic applicant-like data with a known ground truth.

The label comes from thresholding a sparse linear + quadratic score over the
numeric features (on their unit-interval scale) plus Gaussian noise. The
threshold is the sample median, so classes are balanced by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .tabular import FilterRules, PipelineConfig, TabularDataset

TOP_SCORE = 5.0
TARGET = "final_read_score"
CATEGORIES = ("CS", "CSE", "DS", "GameDesign", "BIM")
# magnitudes of the hidden linear coefficients, largest first
SIGNAL_MAGNITUDES = (3.0, 2.6, 2.2, 1.8, 1.5, 0.9, 0.6, 0.4)
QUADRATIC_MAGNITUDE = 1.0

_SHORT = {
    "subj": ["I", "We", "My team", "My friend and I"],
    "verb": ["built", "led", "learned", "found", "made", "taught", "ran", "fixed"],
    "adj": ["good", "new", "small", "hard", "great", "strong", "clear", "bad"],
    "noun": ["club", "team", "game", "class", "tool", "plan", "school", "town"],
}
_LONG = {
    "subj": ["Our organization", "My community", "Everybody involved"],
    "verb": ["organized", "developed", "facilitated", "investigated", "collaborated on", "implemented"],
    "adj": ["meaningful", "challenging", "innovative", "beautiful", "difficult", "remarkable", "frustrating"],
    "noun": ["community initiative", "educational program", "technology", "laboratory", "opportunity", "curriculum"],
}


@dataclass(frozen=True)
class SynthConfig:
    n_rows: int = 4000
    n_numeric_features: int = 25
    n_categorical: int = 2
    n_text_columns: int = 4
    noise_std: float = 0.1
    missing_rate: float = 0.005
    seed: int = 7

    def __post_init__(self):
        if self.n_rows < 10:
            raise ValueError("n_rows must be at least 10")
        if self.n_numeric_features < len(SIGNAL_MAGNITUDES) + 1:
            raise ValueError(f"need at least {len(SIGNAL_MAGNITUDES) + 1} numeric features")
        if self.noise_std < 0 or not 0 <= self.missing_rate < 1:
            raise ValueError("noise_std must be >= 0 and missing_rate in [0, 1)")


def numeric_names(cfg: SynthConfig) -> list[str]:
    return [f"num_{i:02d}" for i in range(cfg.n_numeric_features)]


def text_names(cfg: SynthConfig) -> list[str]:
    return [f"piq_{i + 1}" for i in range(cfg.n_text_columns)]


def pipeline_config(cfg: SynthConfig) -> PipelineConfig:
    """Preprocessing config matching the generated schema."""
    return PipelineConfig(
        target_column=TARGET,
        top_score=TOP_SCORE,
        categorical_columns=tuple(f"cat_{i}" for i in range(cfg.n_categorical)),
        filter_rules=FilterRules(
            require_nonmissing=(TARGET,),
            drop_columns=("gender",),
            special_impute=(("elc", 10.0),),
        ),
    )


def _essay(rng: np.random.Generator, complexity: float) -> str:
    sentences = []
    for _ in range(int(rng.integers(3, 9))):
        words = []
        for slot in ("subj", "verb", "adj", "noun"):
            pool = _LONG[slot] if rng.random() < complexity else _SHORT[slot]
            words.append(pool[int(rng.integers(len(pool)))])
        subj, verb, adj, noun = words
        end = "!" if rng.random() < 0.1 else "."
        sentences.append(f"{subj} {verb} a {adj} {noun}{end}")
    return " ".join(sentences)


def generate(cfg: SynthConfig = SynthConfig()):
    """Returns ``(dataset, truth)``; ``truth`` is the JSON-ready ground truth."""
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.n_rows, cfg.n_numeric_features
    names = numeric_names(cfg)

    unit = rng.random((n, d))
    lo = np.round(rng.uniform(0.0, 5.0, d), 2)
    width = np.round(rng.uniform(1.0, 10.0, d), 2)
    raw = lo + width * unit

    signal = rng.permutation(d)[: len(SIGNAL_MAGNITUDES) + 1]
    signs = rng.choice([-1.0, 1.0], size=len(SIGNAL_MAGNITUDES))
    coef = np.zeros(d)
    coef[signal[:-1]] = signs * np.array(SIGNAL_MAGNITUDES)
    quad_idx = int(signal[-1])
    score = (unit - 0.5) @ coef + QUADRATIC_MAGNITUDE * (unit[:, quad_idx] - 0.5) ** 2
    score = score + rng.normal(0.0, cfg.noise_std, n)
    label = (score > np.median(score)).astype(np.int64)

    raw[rng.random((n, d)) < cfg.missing_rate] = np.nan
    columns = {name: raw[:, j] for j, name in enumerate(names)}

    elc = rng.integers(1, 10, n).astype(np.float64)
    elc[rng.random(n) < 0.4] = np.nan
    columns["elc"] = elc
    for c in range(cfg.n_categorical):
        columns[f"cat_{c}"] = np.array([CATEGORIES[i] for i in rng.integers(0, len(CATEGORIES), n)], dtype=object)
    columns["gender"] = np.array([("F", "M", "X")[i] for i in rng.integers(0, 3, n)], dtype=object)

    complexity = rng.random(n)
    for col in text_names(cfg):
        columns[col] = np.array([_essay(rng, c) for c in complexity], dtype=object)

    lower = rng.integers(1, int(TOP_SCORE), n).astype(np.float64)
    columns[TARGET] = np.where(label == 1, TOP_SCORE, lower)

    truth = {
        "seed": cfg.seed,
        "target_column": TARGET,
        "top_score": TOP_SCORE,
        "noise_std": cfg.noise_std,
        "linear": {names[j]: float(coef[j]) for j in range(d) if coef[j] != 0},
        "quadratic": {names[quad_idx]: QUADRATIC_MAGNITUDE},
        "ranges": {names[j]: [float(lo[j]), float(lo[j] + width[j])] for j in range(d)},
    }
    return TabularDataset(columns, n_rows=n), truth


def top_features(truth: dict, n: int = 5) -> list[str]:
    """Names of the ``n`` largest-|coefficient| linear ground-truth features."""
    items = sorted(truth["linear"].items(), key=lambda kv: (-abs(kv[1]), kv[0]))
    return [name for name, _ in items[:n]]


def write(cfg: SynthConfig, out_path) -> str:
    """Write the CSV plus a ``<out>.truth.json`` sidecar; returns the sidecar path."""
    data, truth = generate(cfg)
    data.to_csv(out_path)
    sidecar = f"{out_path}.truth.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2)
        fh.write("\n")
    return sidecar
