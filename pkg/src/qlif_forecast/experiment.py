"""Run orchestration behind the CLI: preprocessing, single runs, paired comparisons."""

from __future__ import annotations

import csv
import json
import logging
import statistics
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import literature, qsim
from .config import ExperimentConfig
from .data import WindowedDataset, ingest_csv, prepare_dataset
from .errors import ConfigError, DataError
from .metrics import MetricsReport, evaluate
from .model import Model, build, predict, train
from .qlif import qlif_update

log = logging.getLogger(__name__)


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_dataset(cfg: ExperimentConfig) -> WindowedDataset:
    """Build windows from the configured CSV, or load a prepared ``.qlc`` cache."""
    if not cfg.data_path:
        raise ConfigError("no dataset given (set data_path in the config or pass --data)")
    path = Path(cfg.data_path)
    if path.suffix == ".qlc":
        if not path.is_file():
            raise DataError(f"dataset cache not found: {path}")
        return WindowedDataset.load(path)
    schema = cfg.dataset_schema()
    raw = ingest_csv(path, schema)
    return prepare_dataset(raw, schema, cfg.train_windows, cfg.test_windows, cfg.device_scale)


def preprocess(cfg: ExperimentConfig, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds = load_dataset(cfg)
    ds.save(out / "dataset.qlc")
    summary = dict(ds.summary, features=ds.feature_names, targets=ds.target_names)
    _write_json(out / "preprocess_summary.json", summary)
    return summary


def write_curve(path, history) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "train_loss", "val_loss", "lr"])
        for r in history:
            w.writerow([r.epoch, repr(r.train_loss), repr(r.val_loss), repr(r.lr)])


def write_predictions(path, ds: WindowedDataset, pred_std) -> None:
    _, y = ds.test
    actual = ds.target_scaler.inverse(y)
    pred = ds.target_scaler.inverse(pred_std)
    rows = ds.target_rows[ds.n_train : ds.n_train + ds.n_test]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["timestep", "row"]
        for name in ds.target_names:
            header += [f"{name}_actual", f"{name}_predicted"]
        w.writerow(header)
        for i in range(len(actual)):
            line = [i, int(rows[i])]
            for j in range(actual.shape[1]):
                line += [repr(float(actual[i, j])), repr(float(pred[i, j]))]
            w.writerow(line)


def score(model: Model, ds: WindowedDataset) -> tuple[MetricsReport, np.ndarray]:
    X, y = ds.test
    pred = predict(model, X)
    return evaluate(pred, y, ds.target_scaler), pred


def baseline_report(ds: WindowedDataset) -> MetricsReport:
    """Mean predictor: the training-target mean, i.e. zero in standardized units."""
    _, y = ds.test
    return evaluate(np.zeros_like(y), y, ds.target_scaler)


def run_single(cfg: ExperimentConfig, ds: WindowedDataset, seed: int, neuron_kind: str, out_dir) -> dict:
    """Train one model and write every run artifact into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.model_spec(ds.X.shape[2], ds.y.shape[1], ds.window, neuron_kind)
    model = build(spec, seed)
    start = time.perf_counter()
    model, history = train(model, ds, cfg.train, seed)
    elapsed = time.perf_counter() - start
    report, pred = score(model, ds)

    _write_json(out / "config.json", {**cfg.to_dict(), "neuron_kind": neuron_kind, "seed": seed})
    (out / "seed.txt").write_text(f"{seed}\n")
    report.write_json(out / "metrics.json")
    report.write_csv(out / "metrics_per_variable.csv")
    write_curve(out / "training_curve.csv", history)
    write_predictions(out / "predictions.csv", ds, pred)
    model.save(out / "checkpoint.qlc")
    summary = {
        "neuron_kind": neuron_kind,
        "seed": seed,
        "train_time_s": elapsed,
        "epochs": len(history),
        "best_val_loss": min(r.val_loss for r in history),
        "parameter_counts": model.parameter_counts(),
        "total_params": model.n_params,
        "model_spec": asdict(spec),
        "literature": {k: literature.LITERATURE[k] for k in literature.PHASE_REFERENCES[cfg.phase]},
    }
    _write_json(out / "run_summary.json", summary)
    return {"model": model, "report": report, "history": history, "summary": summary}


def evaluate_checkpoint(cfg: ExperimentConfig, ds: WindowedDataset, model: Model, out_dir) -> MetricsReport:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report, pred = score(model, ds)
    report.write_json(out / "metrics.json")
    report.write_csv(out / "metrics_per_variable.csv")
    write_predictions(out / "predictions.csv", ds, pred)
    return report


def structural_diff(a: Model, b: Model) -> list:
    """Differences between two models outside Layer 2 (empty when structurally identical)."""
    problems = []
    sa, sb = a.structure(), b.structure()
    if [s for _, s in sa] != [s for _, s in sb]:
        problems.append("parameter shapes differ")
    outside_a = [n for n, _ in sa if not n.startswith("l2_")]
    outside_b = [n for n, _ in sb if not n.startswith("l2_")]
    if outside_a != outside_b:
        problems.append("non-spiking layer names differ")
    if a.n_params != b.n_params:
        problems.append(f"parameter totals differ: {a.n_params} vs {b.n_params}")
    spec_a = {k: v for k, v in asdict(a.spec).items() if k != "neuron_kind"}
    spec_b = {k: v for k, v in asdict(b.spec).items() if k != "neuron_kind"}
    if spec_a != spec_b:
        problems.append("model specs differ beyond neuron_kind")
    return problems


def run_compare(cfg: ExperimentConfig, ds: WindowedDataset, out_dir) -> dict:
    """Paired QLIF / classical LIF runs, one pair per seed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = baseline_report(ds)
    rows, deltas, pairs = [], [], []
    for seed in cfg.seeds:
        runs = {kind: run_single(cfg, ds, seed, kind, out / f"seed_{seed}" / kind) for kind in ("qlif", "lif")}
        problems = structural_diff(runs["qlif"]["model"], runs["lif"]["model"])
        if problems:
            raise AssertionError(f"seed {seed}: models differ outside Layer 2: {problems}")
        for kind, run in runs.items():
            agg = run["report"].aggregate
            rows.append(
                {
                    "seed": seed,
                    "model": kind,
                    "mse": agg.mse,
                    "mae": agg.mae,
                    "rmse": agg.rmse,
                    "r2_mean": agg.r2_mean,
                    "train_time_s": run["summary"]["train_time_s"],
                    "epochs": run["summary"]["epochs"],
                    "params": run["summary"]["total_params"],
                    "baseline_mse": base.aggregate.mse,
                }
            )
        for q, c in zip(runs["qlif"]["report"].per_variable, runs["lif"]["report"].per_variable):
            delta = 100.0 * (q.mae - c.mae) / c.mae if c.mae else float("nan")
            deltas.append(
                {
                    "seed": seed,
                    "variable": q.name,
                    "qlif_mae": q.mae,
                    "lif_mae": c.mae,
                    "delta_mae_pct": delta,
                    "winner": "qlif" if q.mae < c.mae else "lif",
                }
            )
        pairs.append({k: runs[k]["report"] for k in runs})

    _write_rows(out / "comparison.csv", rows)
    _write_rows(out / "per_variable_deltas.csv", deltas)
    q_mse = [r["mse"] for r in rows if r["model"] == "qlif"]
    l_mse = [r["mse"] for r in rows if r["model"] == "lif"]
    summary = {
        "seeds": list(cfg.seeds),
        "baseline_mse": base.aggregate.mse,
        "median_mse": {"qlif": statistics.median(q_mse), "lif": statistics.median(l_mse)},
        "mse_change_pct": 100.0 * (statistics.median(q_mse) - statistics.median(l_mse)) / statistics.median(l_mse),
        "beats_baseline": {
            "qlif": sum(m < base.aggregate.mse for m in q_mse),
            "lif": sum(m < base.aggregate.mse for m in l_mse),
        },
        "total_params": {"qlif": rows[0]["params"], "lif": rows[1]["params"]},
        "literature": {k: literature.LITERATURE[k] for k in literature.PHASE_REFERENCES[cfg.phase]},
    }
    _write_json(out / "comparison_summary.json", summary)
    return {"rows": rows, "deltas": deltas, "summary": summary, "pairs": pairs}


def _write_rows(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def verify_circuits(shots: int = qsim.REFERENCE_SHOTS, seed: int = 0) -> list:
    """Analytic, state-vector and sampled P(|1>) for the three reference circuits."""
    rows = []
    for i, (label, phi, theta, sim_ref, qpu_ref) in enumerate(qsim.REFERENCE_CASES):
        analytic = float(qlif_update(phi, theta))
        state = qsim.run_circuit([phi, theta])
        statevector = qsim.measure_p1(state)
        sampled = qsim.sample_shots(state, shots, seed + i).p1_hat
        rows.append(
            {
                "case": label,
                "phi": phi,
                "theta": theta,
                "analytic": analytic,
                "statevector": statevector,
                "sampled": sampled,
                "published_simulator": sim_ref,
                "published_qpu": qpu_ref,
                "analytic_vs_statevector": abs(analytic - statevector),
                "sampled_vs_analytic": abs(sampled - analytic),
                "qpu_vs_analytic": abs(qpu_ref - analytic),
            }
        )
    return rows
