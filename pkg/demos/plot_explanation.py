"""
Which features drive admission?
===============================

Select the 20 most salient inputs by gradient magnitude, fit a LIME
surrogate around each held-out applicant, and average the weights.
The synthetic generator knows the true coefficients, so we can check.
"""

from admitnet import explain, model, nn, synth, textfeat
from admitnet.svg import attribution_bars

cfg = synth.SynthConfig(n_rows=2000)
data, truth = synth.generate(cfg)
data = textfeat.extract_columns(data, synth.text_names(cfg), textfeat.default_lexicon())
outcome = model.train_model(data, synth.pipeline_config(cfg), nn.FF, seed=cfg.seed)
m = outcome.model

x_test = outcome.test.to_matrix()[:200]
saliency, local, glob = explain.explain_rows(m, x_test, explain.LimeConfig(n_samples=2000), m.feature_std, k=20)

print("mean surrogate R^2:", sum(e.fidelity_r2 for e in local) / len(local))
for rank, (name, weight, importance) in enumerate(glob.rows(m.feature_names), start=1):
    if rank <= 10:
        print(f"{rank:>2}  {name:<28} {weight:+.4f}  {importance:.4f}")

print("true top 5:", synth.top_features(truth, 5))

# green bars push toward admission, red bars away
with open("attribution.svg", "w") as fh:
    fh.write(attribution_bars([(n, w) for n, w, _ in glob.rows(m.feature_names)][:20]))
