"""
Training both classifiers on synthetic applicants
================================================

Generate a balanced synthetic cohort, extract essay features, then train
the feed-forward net and the input-convex net with default hyperparameters.
"""

from admitnet import model, nn, synth, textfeat
from admitnet.metrics import format_confusion, format_report

cfg = synth.SynthConfig(n_rows=2000)
data, truth = synth.generate(cfg)
data = textfeat.extract_columns(data, synth.text_names(cfg), textfeat.default_lexicon())
print(f"{data.n_rows} rows, {len(data.column_names)} columns after extraction")

reports = {}
for kind, pca in [(nn.FF, None), (nn.FF, 0.95), (nn.FICNN, None)]:
    outcome = model.train_model(data, synth.pipeline_config(cfg), kind, seed=cfg.seed, pca_retain=pca,
                                train_overrides={"epochs": 40})
    name = kind + (" + PCA" if pca else "")
    reports[name] = outcome.report
    print(name, "final loss", round(outcome.losses[-1], 4))

print(format_report(reports))
print(format_confusion(outcome.confusion))

# the convex net keeps its pass-through weights nonnegative after every step
params = outcome.model.params
print("min U entry:", min(params[k].min() for k in params.arrays if k.startswith("U")))
