"""Dataset container and the preprocessing pipeline.

Order of the fitted pipeline is fixed: filter -> binarize target -> one-hot ->
median impute -> standardize -> min-max scale. Missing values are NaN in
numeric columns and ``None`` in string columns; empty CSV cells parse to them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MISSING = np.nan
TARGET_TOL = 1e-12


class SchemaError(ValueError):
    """Columns do not match what an operation or fitted pipeline expects."""


class UnknownColumnError(SchemaError):
    pass


class MissingValueError(ValueError):
    pass


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_column(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind in "biuf":
        return np.array(arr, dtype=np.float64)
    out = np.empty(len(arr), dtype=object)
    for i, v in enumerate(arr):
        out[i] = None if v is None or (isinstance(v, float) and math.isnan(v)) else str(v)
    return out


def format_value(v) -> str:
    """Deterministic CSV rendering of one cell; missing -> empty string."""
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return ""
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True, eq=False)
class TabularDataset:
    """Named columns of equal length plus an optional binary target.

    Numeric columns are float64 with NaN as the missing marker; string
    columns are object arrays with ``None`` as the missing marker.
    """

    columns: dict
    target: np.ndarray | None = None
    n_rows: int | None = None

    def __post_init__(self):
        cols = {}
        for name, values in self.columns.items():
            if not isinstance(name, str):
                raise SchemaError(f"column names must be strings, got {name!r}")
            cols[name] = _freeze(_as_column(values))
        lengths = {len(v) for v in cols.values()}
        if self.target is not None:
            target = np.asarray(self.target)
            if target.ndim != 1:
                raise ValueError("target must be one-dimensional")
            if not np.all((target == 0) | (target == 1)):
                raise ValueError("target must contain only 0 and 1")
            lengths.add(len(target))
            object.__setattr__(self, "target", _freeze(target.astype(np.int64)))
        if self.n_rows is not None:
            lengths.add(int(self.n_rows))
        if len(lengths) > 1:
            raise SchemaError(f"columns have inconsistent lengths {sorted(lengths)}")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "n_rows", lengths.pop() if lengths else 0)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownColumnError(f"unknown column {name!r}") from None

    def __contains__(self, name):
        return name in self.columns

    def is_numeric(self, name: str) -> bool:
        return self[name].dtype != object

    def to_matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.column_names if names is None else names
        if not names:
            return np.zeros((self.n_rows, 0))
        for n in names:
            if not self.is_numeric(n):
                raise SchemaError(f"column {n!r} is not numeric")
        return np.column_stack([self[n] for n in names]).astype(np.float64)

    def take(self, rows) -> "TabularDataset":
        rows = np.asarray(rows, dtype=np.intp)
        target = None if self.target is None else self.target[rows]
        return TabularDataset({k: v[rows] for k, v in self.columns.items()}, target, len(rows))

    def drop(self, names: Iterable[str]) -> "TabularDataset":
        names = set(names)
        return TabularDataset(
            {k: v for k, v in self.columns.items() if k not in names}, self.target, self.n_rows
        )

    def with_columns(self, columns: dict) -> "TabularDataset":
        return TabularDataset(columns, self.target, self.n_rows)

    def with_target(self, target) -> "TabularDataset":
        return TabularDataset(self.columns, target, self.n_rows)

    @classmethod
    def from_matrix(cls, matrix, names: Sequence[str], target=None) -> "TabularDataset":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != len(names):
            raise SchemaError(f"matrix shape {matrix.shape} does not match {len(names)} names")
        return cls({n: matrix[:, j] for j, n in enumerate(names)}, target, matrix.shape[0])

    @classmethod
    def from_csv(cls, path) -> "TabularDataset":
        with open(path, newline="", encoding="utf-8") as fh:
            return cls.from_records(csv.reader(fh))

    @classmethod
    def from_records(cls, rows: Iterable[Sequence[str]]) -> "TabularDataset":
        """Build from a header row followed by string cells (numeric-vs-string inferred)."""
        rows = iter(rows)
        try:
            header = next(rows)
        except StopIteration:
            raise SchemaError("CSV has no header row") from None
        if len(set(header)) != len(header):
            raise SchemaError(f"duplicate column names in header {header}")
        cells = [[] for _ in header]
        for lineno, row in enumerate(rows, start=2):
            if len(row) != len(header):
                raise SchemaError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            for j, v in enumerate(row):
                cells[j].append(v)
        columns = {}
        for name, values in zip(header, cells):
            columns[name] = _parse_column(values)
        return cls(columns, n_rows=len(cells[0]) if cells else 0)

    def to_csv(self, path, target_name: str | None = None):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh, target_name)

    def write_csv(self, fh, target_name: str | None = None):
        writer = csv.writer(fh, lineterminator="\n")
        names = list(self.column_names)
        cols = [self.columns[n] for n in names]
        if target_name is not None and self.target is not None:
            names.append(target_name)
            cols.append(self.target)
        writer.writerow(names)
        for i in range(self.n_rows):
            writer.writerow([format_value(c[i]) for c in cols])


def _parse_column(values: list[str]) -> np.ndarray:
    out = np.empty(len(values), dtype=np.float64)
    for i, v in enumerate(values):
        v = v.strip()
        if v == "":
            out[i] = MISSING
            continue
        try:
            out[i] = float(v)
        except ValueError:
            return _as_column([s if s.strip() != "" else None for s in values])
    return out


def _missing_mask(col: np.ndarray) -> np.ndarray:
    if col.dtype == object:
        return np.array([v is None for v in col], dtype=bool)
    return np.isnan(col)


@dataclass(frozen=True)
class FilterRules:
    require_nonmissing: tuple[str, ...] = ()
    drop_columns: tuple[str, ...] = ()
    keep_where_equal: tuple[tuple[str, object], ...] = ()
    special_impute: tuple[tuple[str, float], ...] = ()

    def referenced(self):
        yield from (("require_nonmissing", c) for c in self.require_nonmissing)
        yield from (("drop_columns", c) for c in self.drop_columns)
        yield from (("keep_where_equal", c) for c, _ in self.keep_where_equal)
        yield from (("special_impute", c) for c, _ in self.special_impute)

    def to_dict(self) -> dict:
        return {
            "require_nonmissing": list(self.require_nonmissing),
            "drop_columns": list(self.drop_columns),
            "keep_where_equal": [[c, v] for c, v in self.keep_where_equal],
            "special_impute": [[c, v] for c, v in self.special_impute],
        }

    @classmethod
    def from_dict(cls, d: dict | None) -> "FilterRules":
        d = d or {}
        unknown = set(d) - {"require_nonmissing", "drop_columns", "keep_where_equal", "special_impute"}
        if unknown:
            raise ValueError(f"unknown filter rule keys {sorted(unknown)}")
        return cls(
            require_nonmissing=tuple(d.get("require_nonmissing", ())),
            drop_columns=tuple(d.get("drop_columns", ())),
            keep_where_equal=tuple((c, v) for c, v in d.get("keep_where_equal", ())),
            special_impute=tuple((c, float(v)) for c, v in d.get("special_impute", ())),
        )


def _equal_mask(col: np.ndarray, value) -> np.ndarray:
    if col.dtype == object:
        return np.array([v is not None and v == str(value) for v in col], dtype=bool)
    try:
        return col == float(value)
    except (TypeError, ValueError):
        return np.zeros(len(col), dtype=bool)


def filter_records(data: TabularDataset, rules: FilterRules, skip_absent: Iterable[str] = ()) -> TabularDataset:
    """Apply record filters; ``special_impute`` fills happen before any row removal.

    Columns named in ``skip_absent`` may be missing from ``data``; rules on them
    are then ignored (used when scoring unlabeled data).
    """
    skip_absent = set(skip_absent)
    for rule, col in rules.referenced():
        if col not in data and col not in skip_absent:
            raise UnknownColumnError(f"filter rule {rule} references unknown column {col!r}")

    columns = dict(data.columns)
    for col, fill in rules.special_impute:
        if col not in columns:
            continue
        values = np.array(columns[col], dtype=np.float64)
        values[np.isnan(values)] = fill
        columns[col] = values

    keep = np.ones(data.n_rows, dtype=bool)
    for col in rules.require_nonmissing:
        if col in columns:
            keep &= ~_missing_mask(columns[col])
    for col, value in rules.keep_where_equal:
        if col in columns:
            keep &= _equal_mask(columns[col], value)

    rows = np.flatnonzero(keep)
    dropped = set(rules.drop_columns)
    out = {k: v[rows] for k, v in columns.items() if k not in dropped}
    target = None if data.target is None else data.target[rows]
    return TabularDataset(out, target, len(rows))


def binarize_target(scores, top_score: float) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    if np.isnan(scores).any():
        raise MissingValueError("target scores contain missing values; filter those rows first")
    return (np.abs(scores - top_score) <= TARGET_TOL).astype(np.int64)


def one_hot_encode(data: TabularDataset, column: str, vocab: Sequence[str] | None = None):
    """Replace ``column`` with ``<column>=<value>`` indicator columns.

    With ``vocab=None`` the vocabulary is fitted in first-appearance order.
    Values outside the vocabulary (and missing values) get all-zero indicators.
    Returns ``(dataset, vocab)``.
    """
    col = data[column]
    if col.dtype == object:
        values = list(col)
    else:
        values = [None if math.isnan(v) else format_value(v) for v in col]
    if vocab is None:
        vocab = list(dict.fromkeys(v for v in values if v is not None))
    vocab = list(vocab)
    out = {}
    for name, arr in data.columns.items():
        if name != column:
            out[name] = arr
            continue
        for cat in vocab:
            out[f"{column}={cat}"] = np.array([v == cat for v in values], dtype=np.float64)
    return data.with_columns(out), vocab


def median_impute(column, fitted_median: float | None = None):
    """Fill NaNs with the median of the observed entries (or a fitted median)."""
    col = np.array(column, dtype=np.float64)
    missing = np.isnan(col)
    if fitted_median is None:
        if missing.all():
            raise MissingValueError("cannot fit a median on an all-missing column")
        fitted_median = float(np.median(col[~missing]))
    col[missing] = fitted_median
    return col, fitted_median


@dataclass(frozen=True)
class PipelineConfig:
    target_column: str
    top_score: float
    categorical_columns: tuple[str, ...] = ()
    filter_rules: FilterRules = field(default_factory=FilterRules)

    def to_dict(self) -> dict:
        return {
            "target_column": self.target_column,
            "top_score": self.top_score,
            "categorical_columns": list(self.categorical_columns),
            "filter_rules": self.filter_rules.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        try:
            return cls(
                target_column=d["target_column"],
                top_score=float(d["top_score"]),
                categorical_columns=tuple(d.get("categorical_columns", ())),
                filter_rules=FilterRules.from_dict(d.get("filter_rules")),
            )
        except KeyError as exc:
            raise ValueError(f"pipeline config is missing key {exc.args[0]!r}") from None


@dataclass(frozen=True)
class PipelineStats:
    """Everything needed to replay the fitted pipeline on new data."""

    config: PipelineConfig | None = None
    fitted_column_order: tuple[str, ...] = ()
    feature_names: tuple[str, ...] = ()
    one_hot_vocab: dict = field(default_factory=dict)
    medians: dict = field(default_factory=dict)
    means: dict = field(default_factory=dict)
    stds: dict = field(default_factory=dict)
    mins: dict = field(default_factory=dict)
    maxs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": None if self.config is None else self.config.to_dict(),
            "fitted_column_order": list(self.fitted_column_order),
            "feature_names": list(self.feature_names),
            "one_hot_vocab": {k: list(v) for k, v in self.one_hot_vocab.items()},
            "medians": dict(self.medians),
            "means": dict(self.means),
            "stds": dict(self.stds),
            "mins": dict(self.mins),
            "maxs": dict(self.maxs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineStats":
        return cls(
            config=None if d.get("config") is None else PipelineConfig.from_dict(d["config"]),
            fitted_column_order=tuple(d["fitted_column_order"]),
            feature_names=tuple(d["feature_names"]),
            one_hot_vocab={k: list(v) for k, v in d["one_hot_vocab"].items()},
            medians={k: float(v) for k, v in d["medians"].items()},
            means={k: float(v) for k, v in d["means"].items()},
            stds={k: float(v) for k, v in d["stds"].items()},
            mins={k: float(v) for k, v in d["mins"].items()},
            maxs={k: float(v) for k, v in d["maxs"].items()},
        )


def _require_complete(data: TabularDataset):
    for name, col in data.columns.items():
        if col.dtype == object:
            raise SchemaError(f"column {name!r} is not numeric")
        if np.isnan(col).any():
            raise MissingValueError(f"column {name!r} still has missing values")


def standardize(data: TabularDataset, stats: PipelineStats | None = None):
    """Zero mean, unit population variance per column.

    Fits when ``stats`` is None; a zero-variance column maps to zeros with its
    std recorded as 1.
    """
    _require_complete(data)
    if stats is None:
        means, stds = {}, {}
        for name, col in data.columns.items():
            means[name] = float(col.mean()) if len(col) else 0.0
            sd = float(col.std()) if len(col) else 0.0
            stds[name] = sd if sd > 0 else 1.0
        stats = PipelineStats(means=means, stds=stds)
    out = {}
    for name, col in data.columns.items():
        try:
            out[name] = (col - stats.means[name]) / stats.stds[name]
        except KeyError:
            raise SchemaError(f"no fitted mean/std for column {name!r}") from None
    return data.with_columns(out), stats


def minmax_scale(data: TabularDataset, stats: PipelineStats | None = None):
    """Map each column to [0, 1]; values outside the fitted range are clamped."""
    _require_complete(data)
    if stats is None:
        mins = {n: float(c.min()) if len(c) else 0.0 for n, c in data.columns.items()}
        maxs = {n: float(c.max()) if len(c) else 0.0 for n, c in data.columns.items()}
        stats = PipelineStats(mins=mins, maxs=maxs)
    out = {}
    for name, col in data.columns.items():
        try:
            lo, hi = stats.mins[name], stats.maxs[name]
        except KeyError:
            raise SchemaError(f"no fitted min/max for column {name!r}") from None
        if hi > lo:
            out[name] = np.clip((col - lo) / (hi - lo), 0.0, 1.0)
        else:
            out[name] = np.zeros_like(col)
    return data.with_columns(out), stats


def split(data: TabularDataset, train_fraction: float, seed: int):
    """Seeded shuffle then prefix split; train gets ``floor(fraction * n)`` rows."""
    if data.n_rows < 2:
        raise ValueError(f"need at least 2 rows to split, got {data.n_rows}")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    perm = np.random.default_rng(seed).permutation(data.n_rows)
    n_train = math.floor(train_fraction * data.n_rows)
    return data.take(perm[:n_train]), data.take(perm[n_train:])


def _run(data: TabularDataset, config: PipelineConfig, stats: PipelineStats | None):
    fitting = stats is None
    target_col = config.target_column
    data = filter_records(data, config.filter_rules, skip_absent=() if fitting else (target_col,))

    target = None
    if target_col in data:
        target = binarize_target(data[target_col], config.top_score)
        data = data.drop([target_col]).with_target(target)
    elif fitting:
        raise UnknownColumnError(f"target column {target_col!r} not found")

    vocabs = {} if fitting else stats.one_hot_vocab
    for col in config.categorical_columns:
        data, vocab = one_hot_encode(data, col, None if fitting else vocabs[col])
        if fitting:
            vocabs[col] = vocab
    for name in data.column_names:
        if not data.is_numeric(name):
            raise SchemaError(f"string column {name!r} is not listed as categorical")

    if not fitting and data.column_names != stats.feature_names:
        raise SchemaError("transformed columns do not match the fitted feature names")

    medians = {} if fitting else stats.medians
    imputed = {}
    for name, col in data.columns.items():
        imputed[name], med = median_impute(col, None if fitting else medians[name])
        if fitting:
            medians[name] = med
    data = data.with_columns(imputed)

    data, std_stats = standardize(data, None if fitting else stats)
    data, mm_stats = minmax_scale(data, None if fitting else stats)
    if not fitting:
        return data, stats
    return data, PipelineStats(
        config=config,
        feature_names=data.column_names,
        one_hot_vocab=vocabs,
        medians=medians,
        means=std_stats.means,
        stds=std_stats.stds,
        mins=mm_stats.mins,
        maxs=mm_stats.maxs,
    )


def fit_pipeline(data: TabularDataset, config: PipelineConfig):
    """Fit every preprocessing stage on ``data``; returns ``(features, stats)``."""
    for col in config.categorical_columns:
        if col not in data:
            raise UnknownColumnError(f"categorical column {col!r} not found")
    out, stats = _run(data, config, None)
    return out, replace(stats, fitted_column_order=data.column_names)


def apply_pipeline(data: TabularDataset, stats: PipelineStats) -> TabularDataset:
    """Replay a fitted pipeline. The target column may be absent (unlabeled data)."""
    expected = stats.fitted_column_order
    unlabeled = tuple(c for c in expected if c != stats.config.target_column)
    if data.column_names not in (expected, unlabeled):
        raise SchemaError(
            f"input columns {list(data.column_names)} do not match fitted order {list(expected)}"
        )
    out, _ = _run(data, stats.config, stats)
    return out
