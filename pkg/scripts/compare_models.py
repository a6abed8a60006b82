"""Table of RMSE/MAPE/MAE for didrn, drn, plain and persistence over several seeds.

    python scripts/compare_models.py --seeds 1 2 3 --out runs/compare.csv
"""

import argparse
import csv
from pathlib import Path

from didrn.datagen import SyntheticConfig, generate
from didrn.dynamic import TrainParams
from didrn.experiments import compare_models, split_index
from didrn.network import NetworkConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    parser.add_argument("--data-seed", type=int, default=1)
    parser.add_argument("--days", type=int, default=61)
    parser.add_argument("--blocks", type=int, default=16)
    parser.add_argument("--epochs", type=int, default=40)
    parser.add_argument("--out", default="runs/compare.csv")
    args = parser.parse_args()

    series = generate(SyntheticConfig(days=args.days, seed=args.data_seed))
    split = split_index(len(series))
    rows = []
    for seed in args.seeds:
        results = compare_models(series, NetworkConfig(num_blocks=args.blocks), TrainParams(epochs=args.epochs, seed=seed), split)
        for r in results:
            rows.append((seed, r.name, r.metrics.rmse, r.metrics.mape, r.metrics.mae))
            print(f"seed {seed} {r.name:<12} RMSE {r.metrics.rmse:8.3f}  MAPE {r.metrics.mape:7.4f}%  MAE {r.metrics.mae:8.3f}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "model", "rmse", "mape", "mae"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
