"""
Tabular preprocessing
=====================

Filter, binarize the target, one-hot encode, impute, standardize and
min-max scale. The fitted statistics replay exactly on new data.
"""

import numpy as np

from admitnet.tabular import FilterRules, PipelineConfig, TabularDataset, apply_pipeline, fit_pipeline

nan = np.nan
raw = TabularDataset({
    "score": [5, 3, nan, 5, 4, 1],
    "gpa": [3.9, 3.1, 3.5, nan, 3.7, 2.8],
    "elc": [1, nan, 3, nan, 9, 2],
    "gender": ["F", "M", "F", "M", "X", "F"],
    "major": ["CS", "CSE", "CS", "CS", None, "DS"],
})

config = PipelineConfig(
    target_column="score",
    top_score=5,
    categorical_columns=("major",),
    filter_rules=FilterRules(
        require_nonmissing=("score",),  # unlabeled rows are dropped
        drop_columns=("gender",),
        special_impute=(("elc", 10),),  # missing ELC means "no ELC" -> 10
    ),
)

features, stats = fit_pipeline(raw, config)
print(features.column_names)
print(features.to_matrix().round(3))
print("target:", features.target)

# applying the fitted stats to the same rows reproduces the fit output
again = apply_pipeline(raw, stats)
print("max |fit - apply| =", np.abs(again.to_matrix() - features.to_matrix()).max())

# a row with an unseen category gets an all-zero indicator block
row = {k: raw[k][:1] for k in raw.column_names}
new = TabularDataset({**row, "major": ["GameDesign"]})
print(apply_pipeline(new, stats).to_matrix().round(3))
