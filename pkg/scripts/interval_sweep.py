"""MAPE of DIDRN as the sampling interval grows (hours and days).

Hours are swept on a 61-day record; day-scale strides use a longer record so
that weekly totals still leave enough points to train on.
"""

import argparse

from didrn.datagen import SyntheticConfig, generate
from didrn.dynamic import TrainParams
from didrn.experiments import sweep_intervals
from didrn.network import NetworkConfig

HOUR_STRIDES = [1, 3, 6, 12, 18, 24, 36, 72, 144]
DAY_STRIDES = [144 * d for d in range(1, 8)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--mode", choices=["sum", "subsample"], default="sum")
    parser.add_argument("--long-days", type=int, default=420)
    args = parser.parse_args()

    cfg, params = NetworkConfig(), TrainParams(seed=args.seed)
    short = generate(SyntheticConfig(days=61, seed=args.seed))
    long = generate(SyntheticConfig(days=args.long_days, seed=args.seed))
    print("interval_minutes,n_points,rmse,mape,mae")
    for series, strides in ((short, HOUR_STRIDES), (long, DAY_STRIDES)):
        for row in sweep_intervals(series, strides, cfg, params, args.mode):
            m = row.metrics
            vals = "nan,nan,nan" if m is None else f"{m.rmse:.3f},{m.mape:.3f},{m.mae:.3f}"
            print(f"{row.interval_minutes},{row.n_points},{vals}")


if __name__ == "__main__":
    main()
