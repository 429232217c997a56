"""Regression metrics in original units."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .data import ScalerStats


@dataclass(frozen=True)
class VariableMetrics:
    name: str
    mse: float
    mae: float
    rmse: float
    r2: float | None  # None when the test variance is zero


@dataclass(frozen=True)
class AggregateMetrics:
    mse: float
    mae: float
    rmse: float
    r2_mean: float | None
    r2_pooled: float | None


@dataclass(frozen=True)
class MetricsReport:
    per_variable: list
    aggregate: AggregateMetrics
    n_samples: int

    def variable(self, name: str) -> VariableMetrics:
        return next(v for v in self.per_variable if v.name == name)

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "aggregate": asdict(self.aggregate),
            "per_variable": [asdict(v) for v in self.per_variable],
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["variable", "mse", "mae", "rmse", "r2"])
            for v in self.per_variable:
                w.writerow([v.name, repr(v.mse), repr(v.mae), repr(v.rmse), "" if v.r2 is None else repr(v.r2)])
            a = self.aggregate
            w.writerow(["ALL", repr(a.mse), repr(a.mae), repr(a.rmse), "" if a.r2_mean is None else repr(a.r2_mean)])


def regression_metrics(pred, actual, names) -> MetricsReport:
    """Metrics for predictions already in the units of ``actual``.

    Aggregate MSE/MAE pool every (sample, variable) error with equal weight;
    ``r2_mean`` averages the per-variable R^2 and ``r2_pooled`` uses total
    squared error over total variance about each variable's mean.
    """
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.ndim == 1:
        pred, actual = pred[:, None], actual[:, None]
    if pred.shape != actual.shape:
        raise ValueError(f"prediction shape {pred.shape} != actual shape {actual.shape}")
    if pred.shape[1] != len(names):
        raise ValueError(f"{pred.shape[1]} variables but {len(names)} names")

    err = pred - actual
    sse = (err**2).sum(axis=0)
    sst = ((actual - actual.mean(axis=0)) ** 2).sum(axis=0)
    n = len(actual)
    per = []
    for j, name in enumerate(names):
        mse = float(sse[j] / n)
        r2 = None if sst[j] == 0 else float(1.0 - sse[j] / sst[j])
        per.append(VariableMetrics(name, mse, float(np.abs(err[:, j]).mean()), math.sqrt(mse), r2))

    mse = float((err**2).mean())
    r2s = [v.r2 for v in per if v.r2 is not None]
    agg = AggregateMetrics(
        mse=mse,
        mae=float(np.abs(err).mean()),
        rmse=math.sqrt(mse),
        r2_mean=float(np.mean(r2s)) if r2s else None,
        r2_pooled=None if sst.sum() == 0 else float(1.0 - sse.sum() / sst.sum()),
    )
    return MetricsReport(per, agg, n)


def evaluate(pred_std, actual_std, scaler: ScalerStats, names=None) -> MetricsReport:
    """Inverse-standardize predictions and targets, then score them."""
    names = list(scaler.names) if names is None else list(names)
    return regression_metrics(scaler.inverse(pred_std), scaler.inverse(actual_std), names)
