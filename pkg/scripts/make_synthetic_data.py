"""Write stand-in CSVs with the same headers and sizes as the three real datasets.

    python3 scripts/make_synthetic_data.py --out data

The files land at the paths the shipped configs expect. Drop the real
downloads in place of them to run on actual observations.
"""

import argparse
from pathlib import Path

from qlif_forecast import synthetic

FILES = {
    "weather": "weatherHistory.csv",
    "air_quality": "bangkok_air_quality.csv",
    "wind": "wind_speed_100m.csv",
}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", choices=sorted(FILES))
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for kind, name in FILES.items():
        if args.only and kind != args.only:
            continue
        synthetic.write(kind, out / name, seed=args.seed)
        print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
