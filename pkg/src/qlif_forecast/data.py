"""CSV ingestion, gap filling, standardization and sliding windows.

The pipeline is ``ingest_csv -> fill_gaps -> standardize -> make_windows``.
Scaler statistics only ever see rows consumed by training windows (their
inputs and targets), so test rows cannot leak into preprocessing.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import container
from .errors import DataError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitRule:
    kind: str = "fraction"  # "fixed" or "fraction"
    train: float = 0.8
    test: float | None = None

    def counts(self, n_windows: int) -> tuple[int, int]:
        if self.kind == "fixed":
            n_train, n_test = int(self.train), int(self.test or 0)
            if n_train + n_test > n_windows:
                raise DataError(f"split needs {n_train}+{n_test} windows, only {n_windows} available")
            return n_train, n_test
        if self.kind == "fraction":
            n_train = int(np.floor(self.train * n_windows))
            return n_train, n_windows - n_train
        raise DataError(f"unknown split kind {self.kind!r}")


@dataclass
class DatasetSchema:
    """Maps logical names onto CSV headers and fixes the windowing recipe."""

    name: str
    columns: dict  # logical name -> CSV header
    inputs: list
    targets: list
    time_column: str | None = None
    window: int = 12
    split: SplitRule = field(default_factory=SplitRule)
    max_rows: int | None = None
    max_ffill: int | None = None

    def __post_init__(self):
        if isinstance(self.split, dict):
            self.split = SplitRule(**self.split)
        missing = [n for n in [*self.inputs, *self.targets] if n not in self.columns]
        if missing:
            raise DataError(f"schema {self.name!r} has no column mapping for {missing}")
        if self.window < 1:
            raise DataError("window must be >= 1")

    @property
    def logical_columns(self) -> list:
        return list(dict.fromkeys([*self.inputs, *self.targets]))

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSchema":
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "DatasetSchema":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except FileNotFoundError as e:
            raise DataError(f"schema file not found: {path}") from e

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RawSeries:
    timestamps: np.ndarray
    columns: dict  # logical name -> float array, NaN marks a missing cell

    def __len__(self) -> int:
        return len(self.timestamps)

    def take(self, index) -> "RawSeries":
        return RawSeries(self.timestamps[index], {k: v[index] for k, v in self.columns.items()})

    def head(self, n: int) -> "RawSeries":
        return self.take(slice(0, n))

    def matrix(self, names) -> np.ndarray:
        return np.column_stack([self.columns[n] for n in names])


@dataclass
class ScalerStats:
    mean: np.ndarray
    std: np.ndarray
    names: list

    def transform(self, x):
        return (np.asarray(x, dtype=float) - self.mean) / self.std

    def inverse(self, z):
        return np.asarray(z, dtype=float) * self.std + self.mean


@dataclass
class WindowedDataset:
    X: np.ndarray  # [n, T, F]
    y: np.ndarray  # [n, N]
    n_train: int
    n_test: int
    scaler: ScalerStats
    target_scaler: ScalerStats
    target_rows: np.ndarray  # series row index of each window's target
    summary: dict = field(default_factory=dict)

    @property
    def window(self) -> int:
        return self.X.shape[1]

    @property
    def feature_names(self) -> list:
        return list(self.scaler.names)

    @property
    def target_names(self) -> list:
        return list(self.target_scaler.names)

    @property
    def train(self) -> tuple[np.ndarray, np.ndarray]:
        return self.X[: self.n_train], self.y[: self.n_train]

    @property
    def test(self) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(self.n_train, self.n_train + self.n_test)
        return self.X[sl], self.y[sl]

    def save(self, path) -> None:
        arrays = {
            "X": self.X,
            "y": self.y,
            "target_rows": self.target_rows.astype(float),
            "input_mean": self.scaler.mean,
            "input_std": self.scaler.std,
            "target_mean": self.target_scaler.mean,
            "target_std": self.target_scaler.std,
        }
        meta = {
            "kind": "windowed_dataset",
            "n_train": self.n_train,
            "n_test": self.n_test,
            "feature_names": self.feature_names,
            "target_names": self.target_names,
            "summary": self.summary,
        }
        container.save(path, arrays, meta)

    @classmethod
    def load(cls, path) -> "WindowedDataset":
        a, meta = container.load(path)
        if meta.get("kind") != "windowed_dataset":
            raise DataError(f"{path} is not a windowed dataset cache")
        return cls(
            X=a["X"],
            y=a["y"],
            n_train=meta["n_train"],
            n_test=meta["n_test"],
            scaler=ScalerStats(a["input_mean"], a["input_std"], meta["feature_names"]),
            target_scaler=ScalerStats(a["target_mean"], a["target_std"], meta["target_names"]),
            target_rows=a["target_rows"].astype(int),
            summary=meta.get("summary", {}),
        )


def ingest_csv(path, schema: DatasetSchema) -> RawSeries:
    """Read the mapped columns of a headered CSV.

    Unparseable numeric cells become NaN. With a time column, rows with
    unparseable timestamps and duplicate timestamps (first kept) are dropped
    and out-of-order rows are stably sorted, each with a warning.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    df = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    df.columns = [c.strip() for c in df.columns]
    wanted = {name: schema.columns[name].strip() for name in schema.logical_columns}
    headers = list(wanted.values()) + ([schema.time_column] if schema.time_column else [])
    absent = [h for h in headers if h not in df.columns]
    if absent:
        raise DataError(f"{path.name}: missing column(s) {absent}")
    if len(df) == 0:
        raise DataError(f"{path.name}: no data rows")

    columns = {name: pd.to_numeric(df[h].str.strip(), errors="coerce").to_numpy(dtype=float) for name, h in wanted.items()}
    if schema.time_column is None:
        return RawSeries(np.arange(len(df)), columns)

    ts = pd.to_datetime(df[schema.time_column], utc=True, errors="coerce", format="mixed")
    series = RawSeries(ts.to_numpy(dtype="datetime64[ns]"), columns)
    bad = np.isnat(series.timestamps)
    if bad.any():
        log.warning("%s: dropping %d rows with unparseable timestamps", path.name, bad.sum())
        series = series.take(~bad)
    if np.any(np.diff(series.timestamps.astype(np.int64)) < 0):
        log.warning("%s: rows are out of chronological order; sorting", path.name)
        series = series.take(np.argsort(series.timestamps, kind="stable"))
    dup = np.zeros(len(series), dtype=bool)
    dup[1:] = series.timestamps[1:] == series.timestamps[:-1]
    if dup.any():
        log.warning("%s: dropping %d duplicate timestamps (first occurrence kept)", path.name, dup.sum())
        series = series.take(~dup)
    return series


def _fill_column(values: np.ndarray, max_ffill: int) -> np.ndarray:
    out = values.copy()
    missing = np.isnan(values)
    n = len(values)
    i = 0
    while i < n:
        if not missing[i]:
            i += 1
            continue
        j = i
        while j < n and missing[j]:
            j += 1
        # run of missing cells is [i, j)
        if i > 0:
            if j - i <= max_ffill:
                out[i:j] = values[i - 1]
            elif j < n:
                left, right = values[i - 1], values[j]
                frac = np.arange(1, j - i + 1) / (j - i + 1)
                out[i:j] = left + frac * (right - left)
        i = j
    return out


def fill_gaps(series: RawSeries, max_ffill: int) -> RawSeries:
    """Forward-fill runs of at most ``max_ffill`` missing cells, interpolate longer ones.

    Cells that cannot be filled (leading runs, or long trailing runs with no
    right-hand value) stay missing and their rows are dropped.
    """
    filled = {}
    for name, values in series.columns.items():
        if np.all(np.isnan(values)):
            raise DataError(f"column {name!r} has no observed values")
        filled[name] = _fill_column(values, max_ffill)
    out = RawSeries(series.timestamps, filled)
    return drop_missing(out)


def drop_missing(series: RawSeries) -> RawSeries:
    keep = ~np.any(np.isnan(series.matrix(list(series.columns))), axis=1)
    if not keep.all():
        log.info("dropping %d rows with missing values", (~keep).sum())
    return series.take(keep)


def fit_scaler(matrix, train_boundary: int, names) -> ScalerStats:
    matrix = np.asarray(matrix, dtype=float)
    if not 2 <= train_boundary <= len(matrix):
        raise DataError(f"train boundary {train_boundary} outside series of length {len(matrix)}")
    fit = matrix[:train_boundary]
    mean = fit.mean(axis=0)
    std = fit.std(axis=0)
    flat = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    if flat.any():
        raise DataError(f"zero-variance feature(s) on training rows: {[n for n, f in zip(names, flat) if f]}")
    return ScalerStats(mean=mean, std=std, names=list(names))


def standardize(matrix, train_boundary: int, names=None):
    """Z-score every column with statistics from rows ``[0, train_boundary)``."""
    matrix = np.asarray(matrix, dtype=float)
    names = names if names is not None else [f"f{i}" for i in range(matrix.shape[1])]
    stats = fit_scaler(matrix, train_boundary, names)
    return stats.transform(matrix), stats


def make_windows(features, targets, window: int, n_windows: int | None = None):
    """Window ``i`` covers rows ``[i, i + window)``; its target is row ``i + window``.

    Returns ``(X [n, window, F], y [n, N], target_rows)`` for the first
    ``n_windows`` windows (all ``len - window`` by default).
    """
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    total = len(features) - window
    if total < 1:
        raise DataError(f"series of length {len(features)} is too short for window {window}")
    n = total if n_windows is None else n_windows
    if n > total:
        raise DataError(f"requested {n} windows, series provides {total}")
    view = np.lib.stride_tricks.sliding_window_view(features, window, axis=0)  # [L-T+1, F, T]
    X = np.ascontiguousarray(view[:n].transpose(0, 2, 1))
    rows = np.arange(window, window + n)
    return X, targets[rows].copy(), rows


def prepare_dataset(
    series: RawSeries,
    schema: DatasetSchema,
    n_train: int | None = None,
    n_test: int | None = None,
    scale: float = 1.0,
) -> WindowedDataset:
    """Apply the schema's recipe to an ingested series.

    ``n_train``/``n_test`` override the schema split; ``scale`` shrinks both
    counts for desk-scale runs. The series is cut to the rows the selected
    windows need before statistics are computed.
    """
    summary = {"dataset": schema.name, "raw_rows": len(series)}
    if schema.max_rows is not None:
        series = series.head(schema.max_rows)
    before = len(series)
    if schema.max_ffill is not None:
        series = fill_gaps(series, schema.max_ffill)
    else:
        series = drop_missing(series)
    summary["rows_after_cleaning"] = len(series)
    summary["dropped_rows"] = before - len(series)

    T = schema.window
    if len(series) <= T:
        raise DataError(f"series of length {len(series)} is too short for window {T}")
    if n_train is None or n_test is None:
        if schema.split.kind == "fixed":
            # checked against the series length only after scaling, below
            base_train, base_test = int(schema.split.train), int(schema.split.test or 0)
        else:
            base_train, base_test = schema.split.counts(len(series) - T)
        n_train = base_train if n_train is None else n_train
        n_test = base_test if n_test is None else n_test
    if scale != 1.0:
        if not 0.0 < scale <= 1.0:
            raise DataError(f"scale must lie in (0, 1], got {scale}")
        n_train, n_test = max(1, round(n_train * scale)), max(1, round(n_test * scale))
    needed = n_train + n_test + T
    if needed > len(series):
        raise DataError(f"{n_train}+{n_test} windows need {needed} rows, series has {len(series)}")
    series = series.head(needed)

    boundary = n_train + T
    inputs, in_stats = standardize(series.matrix(schema.inputs), boundary, schema.inputs)
    targets, tgt_stats = standardize(series.matrix(schema.targets), boundary, schema.targets)
    X, y, rows = make_windows(inputs, targets, T, n_train + n_test)
    summary.update(
        rows_used=len(series),
        window=T,
        n_train=n_train,
        n_test=n_test,
        input_mean=in_stats.mean.tolist(),
        input_std=in_stats.std.tolist(),
        target_mean=tgt_stats.mean.tolist(),
        target_std=tgt_stats.std.tolist(),
    )
    return WindowedDataset(X, y, n_train, n_test, in_stats, tgt_stats, rows, summary)


def validation_split(n_train: int, fraction: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Chronological hold-out: the last ``fraction`` of the training windows."""
    n_val = max(1, int(n_train * fraction))
    if n_val >= n_train:
        raise DataError(f"cannot carve a validation split from {n_train} training windows")
    return np.arange(n_train - n_val), np.arange(n_train - n_val, n_train)
