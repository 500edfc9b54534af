import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from admitnet import model, nn, synth
from admitnet.cli import main
from admitnet.model import ModelFile, ModelFormatError
from admitnet.tabular import TabularDataset

SMALL = synth.SynthConfig(n_rows=300, n_numeric_features=10, n_categorical=1, n_text_columns=2, seed=3)


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    """Small generated dataset, extracted features, a config and an FF model file."""
    d = tmp_path_factory.mktemp("cli")
    raw, feats, cfg, ff = d / "raw.csv", d / "feats.csv", d / "cfg.json", d / "ff.json"
    assert run("gensynth", "--rows", 300, "--numeric", 10, "--categorical", 1, "--text", 2,
               "--seed", 3, "--out", raw) == 0
    assert run("extract", raw, "--text-columns", "piq_1", "piq_2", "--out", feats) == 0
    config = synth.pipeline_config(SMALL).to_dict()
    config.update(train={"epochs": 3}, seed=5)
    cfg.write_text(json.dumps(config))
    assert run("train", feats, "--config", cfg, "--model", "ff", "--out", ff) == 0
    return d


def header(path):
    with open(path, newline="") as fh:
        return next(csv.reader(fh))


class TestModelFile:
    def test_round_trip(self, work):
        m = ModelFile.load(work / "ff.json")
        again = ModelFile.from_dict(json.loads(m.dumps()))
        assert again.dumps() == m.dumps()
        assert again.to_dict() == m.to_dict()
        x = np.random.default_rng(0).random((20, len(m.feature_names)))
        assert np.abs(again.predict_proba(x) - m.predict_proba(x)).max() <= 1e-15

    def test_saved_file_matches_memory(self, tmp_path):
        data, _ = synth.generate(SMALL)
        data = data.drop(synth.text_names(SMALL))
        outcome = model.train_model(data, synth.pipeline_config(SMALL), nn.FICNN, seed=2,
                                    pca_retain=3, train_overrides={"epochs": 2})
        outcome.model.save(tmp_path / "m.json")
        loaded = ModelFile.load(tmp_path / "m.json")
        x = outcome.test.to_matrix()
        assert np.abs(loaded.predict_proba(x) - outcome.model.predict_proba(x)).max() <= 1e-15
        assert loaded.pca_model.n_components == 3

    def test_bad_version(self, work):
        d = json.loads((work / "ff.json").read_text())
        d["format_version"] = 99
        with pytest.raises(ModelFormatError):
            ModelFile.from_dict(d)
        del d["format_version"]
        with pytest.raises(ModelFormatError):
            ModelFile.from_dict(d)

    def test_holds_table_defaults(self, work):
        m = ModelFile.load(work / "ff.json")
        assert (m.train_config.batch_size, m.train_config.learning_rate, m.train_config.l2_lambda) == (64, 0.001, 0.01)
        assert m.architecture.hidden_sizes == (256, 32)


class TestExtract:
    def test_column_count(self, work):
        n_in, n_out = len(header(work / "raw.csv")), len(header(work / "feats.csv"))
        assert n_out == n_in - 2 + 8 * 2
        assert "piq_1_flesch_reading_ease" in header(work / "feats.csv")

    def test_missing_text_column(self, work, capsys):
        assert run("extract", work / "raw.csv", "--text-columns", "nope", "--out", work / "x.csv") == 2
        assert "nope" in capsys.readouterr().err

    def test_missing_file(self, work):
        assert run("extract", work / "absent.csv", "--text-columns", "piq_1", "--out", work / "x.csv") == 1


class TestTrainEvaluate:
    def test_report_printed(self, work, capsys):
        assert run("evaluate", work / "ff.json", work / "feats.csv", "--svg", work / "cm.svg") == 0
        out = capsys.readouterr().out
        for head in ("Accuracy", "Precision", "Recall", "F1-Score", "AU-ROC"):
            assert head in out
        assert (work / "cm.svg").read_text().startswith("<svg")

    def test_pca_flag(self, work):
        out = work / "pca.json"
        assert run("train", work / "feats.csv", "--config", work / "cfg.json", "--model", "icnn",
                   "--pca", "--pca-retain", 0.9, "--out", out) == 0
        m = ModelFile.load(out)
        assert m.pca_model is not None and m.architecture.kind == nn.FICNN
        assert m.train_config.l2_lambda == 0.001 and m.architecture.dropout_prob == 0.3

    def test_reordered_columns(self, work):
        data = TabularDataset.from_csv(work / "feats.csv")
        names = list(data.column_names)
        names[0], names[1] = names[1], names[0]
        TabularDataset({n: data[n] for n in names}).to_csv(work / "swapped.csv")
        assert run("evaluate", work / "ff.json", work / "swapped.csv") == 2

    def test_bad_config(self, work):
        (work / "bad.json").write_text('{"target_column": "x", "bogus": 1}')
        assert run("train", work / "feats.csv", "--config", work / "bad.json", "--out", work / "m.json") == 2
        (work / "bad2.json").write_text("not json")
        assert run("train", work / "feats.csv", "--config", work / "bad2.json", "--out", work / "m.json") == 2

    def test_usage_error(self):
        assert run("train") == 2

    def test_separable_run(self, tmp_path):
        rng = np.random.default_rng(0)
        x = rng.random((200, 5))
        margin = x @ np.array([1.0, -2.0, 1.5, 0.5, -1.0])
        score = np.where(margin > np.median(margin), 5.0, 1.0)
        TabularDataset({**{f"f{j}": x[:, j] for j in range(5)}, "score": score}).to_csv(tmp_path / "sep.csv")
        (tmp_path / "cfg.json").write_text(json.dumps({"target_column": "score", "top_score": 5}))
        assert run("train", tmp_path / "sep.csv", "--config", tmp_path / "cfg.json", "--out", tmp_path / "m.json") == 0
        report, _ = model.evaluate(ModelFile.load(tmp_path / "m.json"), TabularDataset.from_csv(tmp_path / "sep.csv"))
        assert report.accuracy >= 0.95


class TestExplain:
    def test_table_and_svg(self, work, capsys):
        out, svg = work / "expl.csv", work / "expl.svg"
        assert run("explain", work / "ff.json", work / "feats.csv", "--top-k", 5, "--n-samples", 200,
                   "--out", out, "--out-svg", svg) == 0
        rows = list(csv.reader(open(out)))
        assert rows[0] == ["feature", "mean_weight", "importance"] and len(rows) == 6
        importance = [float(r[2]) for r in rows[1:]]
        assert importance == sorted(importance, reverse=True)
        text = svg.read_text()
        assert 'width="900"' in text
        signs = {float(r[1]) > 0 for r in rows[1:]}
        if True in signs:
            assert "#2e9e44" in text
        if False in signs:
            assert "#d62728" in text

    def test_k_too_large(self, work):
        assert run("explain", work / "ff.json", work / "feats.csv", "--top-k", 1000) == 2

    def test_icnn_needs_skip(self, work):
        icnn = work / "icnn.json"
        assert run("train", work / "feats.csv", "--config", work / "cfg.json", "--model", "icnn", "--out", icnn) == 0
        args = ("explain", icnn, work / "feats.csv", "--n-samples", 50)
        assert run(*args) == 2
        assert run(*args, "--skip-saliency") == 0


class TestGensynth:
    def test_sidecar_and_balance(self, work):
        truth = json.loads((work / "raw.csv.truth.json").read_text())
        assert len(truth["linear"]) == len(synth.SIGNAL_MAGNITUDES) and truth["target_column"] == synth.TARGET
        data = TabularDataset.from_csv(work / "raw.csv")
        share = np.mean(data[synth.TARGET] == synth.TOP_SCORE)
        assert 0.45 <= share <= 0.55

    def test_default_balance(self, synthetic, synth_cfg):
        data, truth, _ = synthetic
        assert data.n_rows == 4000
        assert 0.45 <= np.mean(data[synth.TARGET] == synth.TOP_SCORE) <= 0.55


def _bytes_of_two_runs(tmp_path, make_argv):
    outputs = []
    for i in range(2):
        paths = make_argv(tmp_path / f"run{i}")
        outputs.append([p.read_bytes() for p in paths])
    return outputs


class TestDeterminism:
    def test_every_command(self, work, tmp_path):
        def once(d):
            d.mkdir()
            raw, feats, m = d / "raw.csv", d / "feats.csv", d / "m.json"
            expl, svg, cm = d / "e.csv", d / "e.svg", d / "cm.svg"
            assert run("gensynth", "--rows", 120, "--numeric", 9, "--categorical", 1, "--text", 1, "--seed", 9, "--out", raw) == 0
            assert run("extract", raw, "--text-columns", "piq_1", "--out", feats) == 0
            assert run("train", feats, "--config", work / "cfg.json", "--seed", 4, "--epochs", 2, "--pca",
                       "--out", m) == 0
            assert run("evaluate", m, feats, "--svg", cm) == 0
            assert run("explain", m, feats, "--top-k", 3, "--n-samples", 100, "--seed", 1,
                       "--out", expl, "--out-svg", svg) == 0
            return [raw, d / "raw.csv.truth.json", feats, m, cm, expl, svg]

        first, second = _bytes_of_two_runs(tmp_path, once)
        assert first == second

    def test_seed_changes_model(self, work, tmp_path):
        for seed in (1, 2):
            assert run("train", work / "feats.csv", "--config", work / "cfg.json", "--seed", seed, "--epochs", 1,
                       "--out", tmp_path / f"{seed}.json") == 0
        assert (tmp_path / "1.json").read_bytes() != (tmp_path / "2.json").read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "admitnet", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("extract", "train", "evaluate", "explain", "gensynth"):
        assert name in res.stdout
