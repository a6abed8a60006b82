"""Experiment configuration: a YAML (or JSON) file plus ``key.path=value`` overrides."""

from __future__ import annotations

import copy
import hashlib
import json
from datetime import datetime
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .datagen import SyntheticConfig
from .dynamic import DynamicConfig, TrainParams
from .experiments import DEFAULT_TRAIN_FRACTION
from .network import NetworkConfig

SECTIONS = {
    "model": NetworkConfig,
    "train": TrainParams,
    "dynamic": DynamicConfig,
}


def _build(cls, values: Dict[str, Any], where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown key(s) in {where}: {sorted(unknown)}")
    return cls(**values)


@dataclass
class ExperimentConfig:
    seed: int = 1
    out: str = "runs/default"
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    csv: Optional[str] = None
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)
    model: NetworkConfig = field(default_factory=NetworkConfig)
    train: TrainParams = field(default_factory=TrainParams)
    dynamic: DynamicConfig = field(default_factory=DynamicConfig)
    shift_fraction: Optional[float] = None
    topologies: List[str] = field(default_factory=lambda: ["didrn", "drn", "plain"])
    strides: List[int] = field(default_factory=lambda: [1, 6, 12, 144])
    resample_mode: str = "sum"
    raw: Dict[str, Any] = field(default_factory=dict)

    def experiment_dict(self) -> Dict[str, Any]:
        """The raw config without the output location, which does not affect results."""
        return {k: v for k, v in self.raw.items() if k != "out"}

    def digest(self) -> str:
        blob = json.dumps(self.experiment_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()


def set_path(tree: Dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = tree
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ValueError(f"cannot set {dotted!r}: {k!r} is not a section")
    node[keys[-1]] = value


def parse_override(item: str):
    if "=" not in item:
        raise ValueError(f"override {item!r} is not of the form key.path=value")
    key, raw = item.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def load_raw(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return data


def resolve(raw: Dict[str, Any]) -> ExperimentConfig:
    """Turn the merged raw mapping into typed config objects.

    ``data.synthetic.seed`` defaults to the top-level ``seed``, and so does
    ``train.seed``.
    """
    original = copy.deepcopy(raw)
    raw = copy.deepcopy(raw)
    top = {k: raw.pop(k) for k in list(raw) if k in ("seed", "out", "train_fraction")}
    seed = int(top.get("seed", 1))
    data = raw.pop("data", {}) or {}
    unknown_data = set(data) - {"csv", "synthetic", "shift_fraction"}
    if unknown_data:
        raise ValueError(f"unknown key(s) in data: {sorted(unknown_data)}")
    syn = dict(data.get("synthetic") or {})
    syn.setdefault("seed", seed)
    if "level_shift" in syn and syn["level_shift"] is not None:
        syn["level_shift"] = tuple(syn["level_shift"])
    if "start" in syn and isinstance(syn["start"], str):
        syn["start"] = datetime.fromisoformat(syn["start"])

    sections = {}
    for name, cls in SECTIONS.items():
        values = dict(raw.pop(name, {}) or {})
        if name == "train":
            values.setdefault("seed", seed)
        sections[name] = _build(cls, values, name)

    evaluate = raw.pop("evaluate", {}) or {}
    sweep = raw.pop("sweep", {}) or {}
    if raw:
        raise ValueError(f"unknown config section(s): {sorted(raw)}")

    cfg = ExperimentConfig(
        seed=seed,
        out=str(top.get("out", "runs/default")),
        train_fraction=float(top.get("train_fraction", DEFAULT_TRAIN_FRACTION)),
        csv=data.get("csv"),
        synthetic=_build(SyntheticConfig, syn, "data.synthetic"),
        shift_fraction=data.get("shift_fraction"),
        topologies=list(evaluate.get("topologies", ["didrn", "drn", "plain"])),
        strides=[int(s) for s in sweep.get("strides", [1, 6, 12, 144])],
        resample_mode=sweep.get("mode", "sum"),
        raw=original,
        **sections,
    )
    if not 0 < cfg.train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    return cfg
