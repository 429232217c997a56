"""Desk-scale QLIF vs classical LIF comparison on the weather task, with a short table.

    python3 scripts/run_phase1_comparison.py --data data/weatherHistory.csv --out runs/phase1_desk

Equivalent to ``qlif-forecast compare --config configs/phase1_desk.json`` plus a
per-seed printout of the resulting comparison.csv.
"""

import argparse
import csv
import sys
from pathlib import Path

from qlif_forecast import cli

ROOT = Path(__file__).resolve().parents[1]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--data", default="data/weatherHistory.csv")
    p.add_argument("--out", default="runs/phase1_desk")
    p.add_argument("--config", default=str(ROOT / "configs" / "phase1_desk.json"))
    p.add_argument("--max-epochs", type=int)
    args = p.parse_args()

    argv = ["compare", "--config", args.config, "--data", args.data, "--out", args.out]
    if args.max_epochs:
        argv += ["--max-epochs", str(args.max_epochs)]
    code = cli.main(argv)
    if code:
        return code

    rows = list(csv.DictReader(open(Path(args.out) / "comparison.csv")))
    print(f"\n{'seed':>4} {'model':>5} {'mse':>10} {'mae':>9} {'epochs':>6} {'time_s':>7}")
    for r in rows:
        print(f"{r['seed']:>4} {r['model']:>5} {float(r['mse']):>10.4f} {float(r['mae']):>9.4f} {r['epochs']:>6} {float(r['train_time_s']):>7.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
