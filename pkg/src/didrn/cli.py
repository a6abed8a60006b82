"""Command-line entry point: ``didrn <command> [--config FILE] [--seed N] [--out DIR]``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

from . import config as cfgmod
from .datagen import generate, load_csv, write_csv
from .dynamic import fit_prefix, run_dynamic, run_static
from .exceptions import DataError, DimensionError, NumericError
from .experiments import (
    ModelResult,
    level_shift_series,
    persistence,
    split_index,
    sweep_intervals,
    train_and_test,
)
from .metrics import evaluate
from .network import init_network, load_network, save_network
from .pipeline import TimeSeries

logger = logging.getLogger("didrn")

METRIC_FIELDS = ["rmse", "mape", "mae"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(path: Path, header: List[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_predictions(path: Path, series: TimeSeries, start: int, pred) -> None:
    stamps = series.timestamps()[start:]
    rows = [
        (ts.isoformat(), _fmt(obs), _fmt(p))
        for ts, obs, p in zip(stamps, series.values[start:], pred)
    ]
    _write_rows(path, ["timestamp", "observed", "predicted"], rows)


def _write_manifest(out: Path, command: str, cfg: cfgmod.ExperimentConfig, artifacts: List[Path]):
    manifest = {
        "command": command,
        "config_hash": cfg.digest(),
        "config": cfg.experiment_dict(),
        "seed": cfg.seed,
        "artifacts": sorted(str(p.relative_to(out)) for p in artifacts),
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


def _load_series(cfg: cfgmod.ExperimentConfig):
    """The configured data source; synthetic data honour ``shift_fraction``."""
    if cfg.csv:
        series = load_csv(cfg.csv)
        return series, split_index(len(series), cfg.train_fraction)
    if cfg.shift_fraction:
        return level_shift_series(cfg.synthetic, cfg.train_fraction, cfg.shift_fraction)
    series = generate(cfg.synthetic)
    return series, split_index(len(series), cfg.train_fraction)


# --- commands ----------------------------------------------------------------


def cmd_generate(cfg, out: Path, args) -> List[Path]:
    series = generate(cfg.synthetic)
    path = Path(args.csv) if args.csv else out / "series.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(series, path)
    print(f"wrote {len(series)} rows to {path}")
    return [path] if path.is_relative_to(out) else []


def cmd_train(cfg, out: Path, args) -> List[Path]:
    series, split = _load_series(cfg)
    net = init_network(cfg.model, cfg.train.seed)
    net, _, history = fit_prefix(net, series, split, cfg.train)
    model_path = out / "model.bin"
    save_network(net, model_path)
    hist_path = out / "loss_history.csv"
    _write_rows(hist_path, ["epoch", "loss"], [(i, _fmt(l)) for i, l in enumerate(history)])
    final = f"{history[-1]:.6g}" if history else "n/a"
    print(f"trained {cfg.model.topology} on {split} points; final loss {final}; model {model_path}")
    return [model_path, hist_path]


def cmd_evaluate(cfg, out: Path, args) -> List[Path]:
    series, split = _load_series(cfg)
    truth = series.values[split:]
    results: List[ModelResult] = []
    supplied = load_network(args.model) if args.model else None
    if supplied is not None and supplied.config.output_dim != 1:
        raise DimensionError("model output", 1, supplied.config.output_dim)
    for topo in cfg.topologies:
        if supplied is not None and supplied.config.topology == topo:
            pred, m = run_static(supplied, series, split)
            results.append(ModelResult(topo, m, pred, supplied))
        else:
            results.append(train_and_test(series, replace(cfg.model, topology=topo), cfg.train, split))
    pred, m = persistence(series, split)
    results.append(ModelResult("persistence", m, pred))
    if args.self_test:
        results.append(ModelResult("self-test", evaluate(truth, truth), truth.copy()))

    paths = []
    metrics_path = out / "metrics.csv"
    _write_rows(
        metrics_path,
        ["model", *METRIC_FIELDS, "n_used", "n_skipped_zero"],
        [
            (r.name, *(_fmt(getattr(r.metrics, k)) for k in METRIC_FIELDS), r.metrics.n_used, r.metrics.n_skipped_zero)
            for r in results
        ],
    )
    paths.append(metrics_path)
    for r in results:
        p = out / f"predictions_{r.name}.csv"
        _write_predictions(p, series, split, r.predictions)
        paths.append(p)

    print(f"{'model':<12} {'RMSE':>10} {'MAPE%':>8} {'MAE':>10}")
    for r in results:
        print(f"{r.name:<12} {r.metrics.rmse:>10.3f} {r.metrics.mape:>8.3f} {r.metrics.mae:>10.3f}")
    return paths


def cmd_sweep(cfg, out: Path, args) -> List[Path]:
    series, _ = _load_series(cfg)
    strides = [int(s) for s in args.strides.split(",")] if args.strides else cfg.strides
    mode = args.mode or cfg.resample_mode
    rows = sweep_intervals(series, strides, cfg.model, cfg.train, mode, cfg.train_fraction)
    path = out / "sweep.csv"
    body = []
    for r in rows:
        vals = ["nan"] * 3 if r.skipped else [_fmt(getattr(r.metrics, k)) for k in METRIC_FIELDS]
        body.append((r.interval_minutes, *vals))
        status = "skipped (too few points)" if r.skipped else f"MAPE {r.metrics.mape:.3f}%"
        print(f"interval {r.interval_minutes:>6} min  n={r.n_points:<6} {status}")
    _write_rows(path, ["interval_minutes", *METRIC_FIELDS], body)
    return [path]


def cmd_dynamic(cfg, out: Path, args) -> List[Path]:
    series, split = _load_series(cfg)
    net = init_network(cfg.model, cfg.train.seed)
    net, _, _ = fit_prefix(net, series, split, cfg.train)
    static_pred, static_m = run_static(net, series, split)
    report = run_dynamic(net, series, split, cfg.dynamic, cfg.train)
    dyn_m = report.metrics

    pred_path = out / "dynamic_predictions.csv"
    _write_predictions(pred_path, series, split, report.predictions)
    static_path = out / "static_predictions.csv"
    _write_predictions(static_path, series, split, static_pred)
    cycles_path = out / "cycles.csv"
    _write_rows(
        cycles_path,
        ["cycle", "start_index", *METRIC_FIELDS, "train_len"],
        [
            (c.cycle, c.start_index, *(_fmt(getattr(c.metrics, k)) for k in METRIC_FIELDS), c.train_len)
            for c in report.cycles
        ],
    )
    summary_path = out / "comparison.csv"
    _write_rows(
        summary_path,
        ["arm", *METRIC_FIELDS, "retrain_count"],
        [
            ("static", *(_fmt(getattr(static_m, k)) for k in METRIC_FIELDS), 0),
            ("dynamic", *(_fmt(getattr(dyn_m, k)) for k in METRIC_FIELDS), report.retrain_count),
        ],
    )
    print(f"static MAPE {static_m.mape!r}% dynamic MAPE {dyn_m.mape!r}% retrains {report.retrain_count}")
    return [pred_path, static_path, cycles_path, summary_path]


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep-interval": cmd_sweep,
    "dynamic": cmd_dynamic,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML/JSON experiment config")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key, e.g. train.epochs=5"
    )
    common.add_argument("--data", help="input CSV (timestamp,flow) instead of synthetic data")
    common.add_argument("--days", type=int, help="synthetic series length in days")
    common.add_argument("--interval", type=int, help="synthetic minutes per reading")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="didrn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="write a synthetic flow series as CSV")
    p.add_argument("--csv", help="output CSV path (default OUT/series.csv)")

    p = sub.add_parser("train", parents=[common], help="train one model on the training split")
    p.add_argument("--topology", choices=["plain", "drn", "didrn"])
    p.add_argument("--epochs", type=int)

    p = sub.add_parser("evaluate", parents=[common], help="metrics table for every model on the test split")
    p.add_argument("--model", help="serialized model to use instead of training its topology")
    p.add_argument("--self-test", action="store_true", help="add a pred==truth row (all metrics zero)")

    p = sub.add_parser("sweep-interval", parents=[common], help="retrain and score at coarser intervals")
    p.add_argument("--strides", help="comma-separated resampling strides, e.g. 6,12,144")
    p.add_argument("--mode", choices=["sum", "subsample"])

    p = sub.add_parser("dynamic", parents=[common], help="static vs incrementally retrained predictions")
    p.add_argument("--horizon", type=int, help="prediction steps between retrains")
    p.add_argument("--retrain-epochs", type=int)
    p.add_argument("--shift", type=float, help="synthetic level shift at the split, as a fraction of mean flow")
    return parser


def _apply_flags(raw: Dict, args) -> None:
    flag_keys = {
        "seed": "seed",
        "out": "out",
        "days": "data.synthetic.days",
        "interval": "data.synthetic.interval_minutes",
        "topology": "model.topology",
        "epochs": "train.epochs",
        "data": "data.csv",
        "horizon": "dynamic.update_horizon",
        "retrain_epochs": "dynamic.retrain_epochs",
        "shift": "data.shift_fraction",
    }
    for item in args.set:
        cfgmod.set_path(raw, *cfgmod.parse_override(item))
    for attr, key in flag_keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfgmod.set_path(raw, key, value)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        raw = cfgmod.load_raw(args.config)
        _apply_flags(raw, args)
        cfg = cfgmod.resolve(raw)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        artifacts = COMMANDS[args.command](cfg, out, args)
        _write_manifest(out, args.command, cfg, artifacts)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
