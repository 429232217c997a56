"""Command-line entry point: ``qlif-forecast <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure, 5 circuit verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from contextlib import nullcontext
from pathlib import Path

from . import experiment, literature
from .config import ExperimentConfig
from .errors import ConfigError, DataError, NumericError
from .model import Model, build

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4, 5
VERIFY_TOL = 1e-9

log = logging.getLogger("qlif_forecast")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--phase", choices=["phase1", "phase2a", "phase2b", "custom"])
    common.add_argument("--data", help="raw CSV or prepared .qlc dataset cache")
    common.add_argument("--seed", type=int, help="overrides the config seed list with one seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--max-epochs", type=int)
    common.add_argument("--device-scale", type=float, help="fraction of train/test windows to keep")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qlif-forecast", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("preprocess", parents=[common], help="ingest, clean, standardize and window a dataset")
    t = sub.add_parser("train", parents=[common], help="train and evaluate one model")
    t.add_argument("--neuron", choices=["qlif", "lif"])
    e = sub.add_parser("evaluate", parents=[common], help="score a checkpoint on the test split")
    e.add_argument("--checkpoint", help="defaults to <out>/checkpoint.qlc")
    e.add_argument("--untrained", action="store_true", help="score a freshly initialized model")
    e.add_argument("--neuron", choices=["qlif", "lif"])
    sub.add_parser("compare", parents=[common], help="paired QLIF vs classical LIF runs")
    q = sub.add_parser("qsim-verify", parents=[common], help="reference circuits: analytic vs simulated")
    q.add_argument("--shots", type=int, default=1000)
    return p


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig.for_phase(args.phase or "phase1")
    if args.config and args.phase and args.phase != cfg.phase:
        raise ConfigError(f"--phase {args.phase} conflicts with phase {cfg.phase!r} in {args.config}")
    if args.data:
        cfg.data_path = args.data
    if args.seed is not None:
        cfg.seeds = [args.seed]
    if args.out:
        cfg.out_dir = args.out
    if args.max_epochs is not None:
        cfg.train.max_epochs = args.max_epochs
    if args.device_scale is not None:
        if not 0.0 < args.device_scale <= 1.0:
            raise ConfigError(f"--device-scale must lie in (0, 1], got {args.device_scale}")
        cfg.device_scale = args.device_scale
    if getattr(args, "neuron", None):
        cfg.neuron_kind = args.neuron
    return cfg


def _thread_limit():
    n = os.environ.get("RUN_THREADS")
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(n))


def cmd_preprocess(cfg: ExperimentConfig) -> int:
    summary = experiment.preprocess(cfg, cfg.out_dir)
    print(f"{summary['dataset']}: {summary['raw_rows']} raw rows, {summary['rows_after_cleaning']} after cleaning, "
          f"{summary['dropped_rows']} dropped")
    print(f"windows: {summary['n_train']} train / {summary['n_test']} test (T={summary['window']})")
    print(f"wrote {Path(cfg.out_dir) / 'dataset.qlc'}")
    return EXIT_OK


def _print_report(report, phase: str) -> None:
    a = report.aggregate
    print(f"test n={report.n_samples}  MSE={a.mse:.6g}  MAE={a.mae:.6g}  RMSE={a.rmse:.6g}  R2(mean)={a.r2_mean}")
    for v in report.per_variable:
        print(f"  {v.name:<14} MSE={v.mse:.6g}  MAE={v.mae:.6g}  RMSE={v.rmse:.6g}  R2={v.r2}")
    foot = literature.footer(phase)
    if foot:
        print(foot)


def cmd_train(cfg: ExperimentConfig) -> int:
    ds = experiment.load_dataset(cfg)
    seed = cfg.seeds[0]
    run = experiment.run_single(cfg, ds, seed, cfg.neuron_kind, cfg.out_dir)
    s = run["summary"]
    print(f"{cfg.neuron_kind} seed={seed}: {s['epochs']} epochs in {s['train_time_s']:.1f}s, {s['total_params']} params")
    _print_report(run["report"], cfg.phase)
    return EXIT_OK


def cmd_evaluate(cfg: ExperimentConfig, checkpoint: str | None, untrained: bool) -> int:
    ds = experiment.load_dataset(cfg)
    if untrained:
        spec = cfg.model_spec(ds.X.shape[2], ds.y.shape[1], ds.window)
        model = build(spec, cfg.seeds[0])
    else:
        path = Path(checkpoint or Path(cfg.out_dir) / "checkpoint.qlc")
        if not path.is_file():
            raise DataError(f"checkpoint not found: {path}")
        model = Model.load(path)
    report = experiment.evaluate_checkpoint(cfg, ds, model, cfg.out_dir)
    _print_report(report, cfg.phase)
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig) -> int:
    ds = experiment.load_dataset(cfg)
    result = experiment.run_compare(cfg, ds, cfg.out_dir)
    s = result["summary"]
    print(f"seeds {s['seeds']}: median test MSE qlif={s['median_mse']['qlif']:.6g} lif={s['median_mse']['lif']:.6g} "
          f"({s['mse_change_pct']:+.1f}%), mean-predictor MSE={s['baseline_mse']:.6g}")
    print(f"params qlif={s['total_params']['qlif']} lif={s['total_params']['lif']}")
    foot = literature.footer(cfg.phase)
    if foot:
        print(foot)
    return EXIT_OK


def cmd_qsim_verify(shots: int, seed: int) -> int:
    rows = experiment.verify_circuits(shots, seed)
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})
    n = len(rows)
    avg = {k: sum(r[k] for r in rows) / n for k in ("analytic", "statevector", "sampled", "published_simulator", "published_qpu")}
    print("average," + ",".join(f"{k}={v:.4f}" for k, v in avg.items()))
    worst = max(r["analytic_vs_statevector"] for r in rows)
    if worst > VERIFY_TOL:
        print(f"analytic and state-vector results disagree by {worst:.3g}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "qsim-verify":
            return cmd_qsim_verify(args.shots, args.seed or 0)
        cfg = _config(args)
        with _thread_limit():
            if args.command == "preprocess":
                return cmd_preprocess(cfg)
            if args.command == "train":
                return cmd_train(cfg)
            if args.command == "evaluate":
                return cmd_evaluate(cfg, args.checkpoint, args.untrained)
            if args.command == "compare":
                return cmd_compare(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
