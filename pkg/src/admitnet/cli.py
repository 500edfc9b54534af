"""Command-line front end.

Subcommands: ``extract``, ``train``, ``evaluate``, ``explain``, ``gensynth``.
Exit codes: 0 success, 1 I/O failure, 2 usage / schema / config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import explain, model, nn, synth, textfeat
from .metrics import format_confusion, format_report
from .svg import attribution_bars, confusion_matrix_svg
from .tabular import PipelineConfig, TabularDataset

EXIT_IO = 1
EXIT_USAGE = 2

_CONFIG_KEYS = {
    "target_column", "top_score", "categorical_columns", "filter_rules",
    "train", "architecture", "pca_retain", "train_fraction", "seed",
}


class UsageError(ValueError):
    pass


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_extract(args) -> int:
    data = TabularDataset.from_csv(args.input)
    lexicon = textfeat.SentimentLexicon.from_file(args.lexicon) if args.lexicon else textfeat.default_lexicon()
    out = textfeat.extract_columns(data, args.text_columns, lexicon)
    out.to_csv(args.out)
    print(f"wrote {out.n_rows} rows x {len(out.column_names)} columns to {args.out}", file=sys.stderr)
    return 0


def _parse_retain(value: str):
    v = float(value)
    return int(v) if v >= 1 and v.is_integer() else v


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    pipeline = PipelineConfig.from_dict(cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    kind = {"ff": nn.FF, "icnn": nn.FICNN}[args.model]
    overrides = dict(cfg.get("train", {}))
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    pca_retain = None
    if args.pca:
        pca_retain = args.pca_retain if args.pca_retain is not None else cfg.get("pca_retain", 0.95)

    data = TabularDataset.from_csv(args.input)
    outcome = model.train_model(
        data, pipeline, kind, seed=seed, pca_retain=pca_retain,
        train_fraction=float(cfg.get("train_fraction", model.TRAIN_FRACTION)),
        train_overrides=overrides, arch_overrides=cfg.get("architecture", {}).get(args.model),
    )
    outcome.model.save(args.out)
    name = {"ff": "Feed-Forward", "icnn": "ICNN"}[args.model] + (" with PCA" if args.pca else "")
    print(format_report({name: outcome.report}))
    print()
    print(format_confusion(outcome.confusion))
    return 0


def cmd_evaluate(args) -> int:
    m = model.ModelFile.load(args.model)
    data = TabularDataset.from_csv(args.input)
    report, cm = model.evaluate(m, data)
    print(format_report({m.architecture.kind: report}))
    print()
    print(format_confusion(cm))
    if args.svg:
        _write_text(args.svg, confusion_matrix_svg(cm, f"Confusion matrix ({m.architecture.kind})"))
    return 0


def cmd_explain(args) -> int:
    m = model.ModelFile.load(args.model)
    d = len(m.feature_names)
    if not args.skip_saliency:
        if m.architecture.kind != nn.FF:
            raise UsageError("gradient saliency runs on feed-forward models; pass --skip-saliency for others")
        if not 1 <= args.top_k <= d:
            raise UsageError(f"--top-k must lie in [1, {d}], got {args.top_k}")

    features = m.transform(TabularDataset.from_csv(args.input))
    rows = model.held_out_split(m, features) if args.rows == "test" else features
    x = rows.to_matrix()
    config = explain.LimeConfig(n_samples=args.n_samples, seed=args.seed)
    selected = tuple(range(d)) if args.skip_saliency else None
    _, _, glob = explain.explain_rows(m, x, config, m.feature_std, k=args.top_k, selected=selected)

    table = list(glob.rows(m.feature_names))
    width = max(len(r[0]) for r in table)
    print(f"{'rank':>4}  {'feature':<{width}}  {'mean_weight':>12}  {'importance':>12}")
    for rank, (name, w, imp) in enumerate(table, start=1):
        print(f"{rank:>4}  {name:<{width}}  {w:>12.6f}  {imp:>12.6f}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["feature", "mean_weight", "importance"])
            writer.writerows([n, repr(w), repr(i)] for n, w, i in table)
    if args.out_svg:
        _write_text(args.out_svg, attribution_bars([(n, w) for n, w, _ in table]))
    return 0


def cmd_gensynth(args) -> int:
    cfg = synth.SynthConfig(
        n_rows=args.rows, n_numeric_features=args.numeric, n_categorical=args.categorical,
        n_text_columns=args.text, noise_std=args.noise, missing_rate=args.missing_rate, seed=args.seed,
    )
    sidecar = synth.write(cfg, args.out)
    print(f"wrote {cfg.n_rows} rows to {args.out} (ground truth in {sidecar})", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="admitnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="replace essay text columns by numeric features")
    p.add_argument("input")
    p.add_argument("--text-columns", nargs="+", required=True)
    p.add_argument("--lexicon", help="word<TAB>polarity<TAB>subjectivity file (default: bundled)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="fit preprocessing and a classifier, report test metrics")
    p.add_argument("input")
    p.add_argument("--config", required=True)
    p.add_argument("--model", choices=("ff", "icnn"), default="ff")
    p.add_argument("--pca", action="store_true", help="reduce dimension with PCA fitted on the train split")
    p.add_argument("--pca-retain", type=_parse_retain, help="component count or variance fraction (default 0.95)")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="metrics of a saved model on labelled data")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("--svg", help="write a confusion-matrix SVG here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("explain", help="saliency selection + LIME, aggregated over rows")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--n-samples", type=int, default=5000)
    p.add_argument("--rows", choices=("test", "all"), default="test",
                   help="explain the held-out split of the training run, or every row")
    p.add_argument("--skip-saliency", action="store_true", help="explain all features, no gradient selection")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the ranked table as CSV")
    p.add_argument("--out-svg")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("gensynth", help="generate a synthetic dataset with known ground truth")
    defaults = synth.SynthConfig()
    p.add_argument("--rows", type=int, default=defaults.n_rows)
    p.add_argument("--numeric", type=int, default=defaults.n_numeric_features)
    p.add_argument("--categorical", type=int, default=defaults.n_categorical)
    p.add_argument("--text", type=int, default=defaults.n_text_columns)
    p.add_argument("--noise", type=float, default=defaults.noise_std)
    p.add_argument("--missing-rate", type=float, default=defaults.missing_rate)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gensynth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"admitnet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        print(f"admitnet: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
