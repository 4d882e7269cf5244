import copy
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, get_args, get_origin

import numpy as np

from .errors import ConfigError

DATASETS = ("parabola", "signal_noise", "five_rectangles", "two_region", "csv", "cached")
FAMILIES = ("mlp", "gru", "hmm", "gru-hmm")
REGULARIZERS = ("none", "l1", "l2", "tree-global", "tree-regional-l1", "tree-regional-l0")
REGION_KINDS = ("none", "dataset", "kmeans", "file")
SEQUENCE_DATASETS = ("signal_noise",)

# hashed configs leave these out: they are the sweep's own coordinates
SWEEP_COORDINATES = (("experiment", "seed"), ("regularizer", "lam"), ("regularizer", "kind"))


def default_lambda_grid() -> list[float]:
    return [float(v) for v in np.logspace(-4, 1, 20)]


class RunConfig:
    """Every option of a run, grouped by concern and persisted as JSON.

    Values resolve from the built-in defaults, then an experiment preset, then
    a JSON file, then individual overrides.
    """

    @dataclass
    class Experiment:
        name: str = "parabola"
        output_dir: str = "runs"
        run_name: str = ""
        seed: int = 0
        checkpoint_every: int = 0
        images: bool = True

    @dataclass
    class Data:
        dataset: str = "parabola"
        csv_path: str = ""
        schema_path: str = ""
        cache_dir: str = ""
        cache_name: str = ""
        data_seed: int = 0
        parabola_band: float = 0.1
        rectangles_grid: int = 100
        test_fraction: float = 0.3

    @dataclass
    class Model:
        family: str = "mlp"
        hidden_sizes: list[int] = field(default_factory=lambda: [100, 100, 10])
        activation: str = "leaky-relu"
        state_dim: int = 25
        n_states: int = 5
        emission: str = "bernoulli"
        belief_mode: str = "filter"
        hmm_likelihood_weight: float = 0.0
        tree_features: str = "inputs+beliefs"

    @dataclass
    class Regularizer:
        kind: str = "none"
        lam: float = 0.0
        h: int = 10
        prune_fraction: float = 0.2
        pruned: bool = True
        regional_normalize: bool = False
        sample_every: int = 1

    @dataclass
    class Surrogate:
        capacity: int = 100
        window: int = 1000
        epsilon: float = 1e-4
        learning_rate: float = 1e-3
        epochs: int = 200
        batch_size: int = 32
        retrain_period: int = 25
        retrain_unit: str = "epoch"
        augmentation_count: int = 250
        random_count: int = 0
        random_scale: float = 0.1
        restarts: int = 5
        restart_epochs: int = 1
        dirichlet_alpha: float = 1.0

    @dataclass
    class Optimizer:
        learning_rate: float = 1e-3
        batch_size: int = 256
        epochs: int = 300

    @dataclass
    class Regions:
        kind: str = "none"
        k: int = 5
        region_map: str = ""
        seed: int = 0

    @dataclass
    class Sweep:
        kinds: list[str] = field(default_factory=lambda: ["l1", "l2", "tree-global"])
        lambdas: list[float] = field(default_factory=default_lambda_grid)
        seeds: list[int] = field(default_factory=lambda: [0])
        workers: int = 1
        baseline_h: list[int] = field(default_factory=lambda: [1, 2, 5, 10, 25, 50, 100, 250])

    GROUPS = ("experiment", "data", "model", "regularizer", "surrogate", "optimizer", "regions", "sweep")

    def __init__(self):
        self.experiment = RunConfig.Experiment()
        self.data = RunConfig.Data()
        self.model = RunConfig.Model()
        self.regularizer = RunConfig.Regularizer()
        self.surrogate = RunConfig.Surrogate()
        self.optimizer = RunConfig.Optimizer()
        self.regions = RunConfig.Regions()
        self.sweep = RunConfig.Sweep()

    @classmethod
    def preset(cls, name: str) -> "RunConfig":
        if name not in PRESETS:
            raise ConfigError(f"unknown experiment preset '{name}' (known: {', '.join(sorted(PRESETS))})")
        config = cls()
        config.update(PRESETS[name])
        config.experiment.name = name
        return config

    def to_dict(self) -> dict[str, dict[str, Any]]:
        return {group: asdict(getattr(self, group)) for group in self.GROUPS}

    def update(self, data: dict[str, dict[str, Any]]) -> "RunConfig":
        for group, values in data.items():
            if group not in self.GROUPS:
                raise ConfigError(f"unknown option group '{group}'")
            target = getattr(self, group)
            known = {f.name for f in fields(target)}
            for key, value in values.items():
                if key not in known:
                    raise ConfigError(f"unknown option '{group}.{key}'")
                setattr(target, key, copy.deepcopy(value))
        return self

    def set(self, assignment: str) -> "RunConfig":
        """Apply one `group.field=value` override; the value is parsed against the field's declared type."""
        key, sep, raw = assignment.partition("=")
        group, dot, name = key.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"expected group.field=value, got '{assignment}'")
        declared = {f.name: f.type for f in fields(getattr(self, group))} if group in self.GROUPS else {}
        if name not in declared:
            raise ConfigError(f"unknown option '{key.strip()}'")
        return self.update({group: {name: _parse(raw.strip(), declared[name], key.strip())}})

    def copy(self) -> "RunConfig":
        return RunConfig().update(self.to_dict())

    def save(self, path: str | os.PathLike) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return target

    @classmethod
    def load(cls, path: str | os.PathLike, base: "RunConfig | None" = None) -> "RunConfig":
        """Read a JSON config on top of `base`; a top-level "preset" key is used only without a base."""
        source = Path(path)
        if not source.exists():
            raise ConfigError(f"config file not found: {source}")
        try:
            data = json.loads(source.read_text())
        except json.JSONDecodeError as error:
            raise ConfigError(f"invalid JSON in {source}: {error}") from None
        preset = data.pop("preset", None)
        if base is not None:
            config = base.copy()
        elif preset is not None:
            config = cls.preset(preset)
        else:
            config = cls()
        return config.update(data)

    def config_hash(self) -> str:
        data = self.to_dict()
        for group, name in SWEEP_COORDINATES:
            data[group].pop(name, None)
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    @property
    def is_sequence(self) -> bool:
        return self.model.family in ("gru", "hmm", "gru-hmm")

    def validate(self) -> "RunConfig":
        checks = [
            (self.data.dataset in DATASETS, f"unknown dataset '{self.data.dataset}'"),
            (self.model.family in FAMILIES, f"unknown model family '{self.model.family}'"),
            (self.regularizer.kind in REGULARIZERS, f"unknown regularizer '{self.regularizer.kind}'"),
            (all(k in REGULARIZERS for k in self.sweep.kinds), f"unknown regularizer in sweep {self.sweep.kinds}"),
            (self.regions.kind in REGION_KINDS, f"unknown region kind '{self.regions.kind}'"),
            (self.model.belief_mode in ("filter", "smooth"), f"unknown belief mode '{self.model.belief_mode}'"),
            (self.model.emission in ("bernoulli", "gaussian"), f"unknown emission '{self.model.emission}'"),
            (self.model.tree_features in ("inputs", "inputs+beliefs"), f"unknown tree features '{self.model.tree_features}'"),
            (self.surrogate.retrain_unit in ("epoch", "step"), f"unknown retrain unit '{self.surrogate.retrain_unit}'"),
            (self.regularizer.lam >= 0, f"lambda must be non-negative, got {self.regularizer.lam}"),
            (all(v >= 0 for v in self.sweep.lambdas), "sweep lambdas must be non-negative"),
            (len(self.sweep.lambdas) >= 1, "a sweep needs at least one lambda"),
            (self.optimizer.epochs >= 1, f"epochs must be at least 1, got {self.optimizer.epochs}"),
            (0.0 <= self.regularizer.prune_fraction < 1.0, "prune fraction must lie in [0, 1)"),
            (self.regularizer.h >= 1, f"h must be at least 1, got {self.regularizer.h}"),
            (self.surrogate.retrain_period >= 1, "retrain period must be at least 1"),
            (self.surrogate.capacity >= 1, "surrogate capacity must be at least 1"),
            (self.regions.k >= 1, "k-means needs k >= 1"),
            (self.sweep.workers >= 1, "sweep needs at least one worker"),
            (
                not (self.is_sequence and self.regions.kind == "dataset"),
                "sequence datasets define no regions; use regions.kind=kmeans or file",
            ),
            (
                (self.data.dataset in SEQUENCE_DATASETS) == self.is_sequence or self.data.dataset in ("csv", "cached"),
                f"model family '{self.model.family}' does not fit dataset '{self.data.dataset}'",
            ),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        if self.data.dataset == "csv" and not Path(self.data.csv_path).is_file():
            raise ConfigError(f"CSV file not found: '{self.data.csv_path}'")
        if self.data.schema_path and not Path(self.data.schema_path).is_file():
            raise ConfigError(f"schema file not found: '{self.data.schema_path}'")
        if self.data.dataset == "cached" and not Path(self.data.cache_dir).is_dir():
            raise ConfigError(f"dataset cache directory not found: '{self.data.cache_dir}'")
        if self.regions.kind == "file" and not Path(self.regions.region_map).is_file():
            raise ConfigError(f"region map not found: '{self.regions.region_map}'")
        return self


def _parse(raw: str, kind: Any, key: str) -> Any:
    try:
        if kind is bool:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if get_origin(kind) is list:
            item = (get_args(kind) or (str,))[0]
            value = json.loads(raw) if raw.startswith("[") else [v for v in raw.split(",") if v]
            return [item(v) for v in value]
    except (ValueError, json.JSONDecodeError):
        raise ConfigError(f"cannot parse '{raw}' for option '{key}'") from None
    return raw


PRESETS: dict[str, dict[str, dict[str, Any]]] = {
    "parabola": {
        "data": {"dataset": "parabola"},
        "model": {"family": "mlp", "hidden_sizes": [100, 100, 10]},
        "regularizer": {"h": 10},
        "surrogate": {"retrain_period": 25, "retrain_unit": "epoch", "augmentation_count": 250},
        "optimizer": {"learning_rate": 1e-3, "batch_size": 256, "epochs": 300},
        "sweep": {"kinds": ["l1", "l2", "tree-global"]},
    },
    "signal_noise": {
        "data": {"dataset": "signal_noise"},
        "model": {"family": "gru", "state_dim": 25, "n_states": 5},
        "regularizer": {"h": 100},
        "surrogate": {"retrain_period": 25, "retrain_unit": "epoch", "augmentation_count": 250},
        "optimizer": {"learning_rate": 1e-3, "batch_size": 25, "epochs": 200},
        "sweep": {"kinds": ["l1", "l2", "tree-global"]},
    },
    "five_rectangles": {
        "data": {"dataset": "five_rectangles"},
        "model": {"family": "mlp", "hidden_sizes": [100, 100, 10]},
        "regularizer": {"h": 10},
        "surrogate": {"retrain_period": 50, "retrain_unit": "step", "augmentation_count": 1000},
        "optimizer": {"learning_rate": 4e-3, "batch_size": 256, "epochs": 300},
        "regions": {"kind": "dataset"},
        "sweep": {"kinds": ["none", "l2", "tree-global", "tree-regional-l1", "tree-regional-l0"]},
    },
    "two_region": {
        "data": {"dataset": "two_region"},
        "model": {"family": "mlp", "hidden_sizes": [100, 100, 10]},
        "regularizer": {"h": 10},
        "surrogate": {"retrain_period": 50, "retrain_unit": "step", "augmentation_count": 250},
        "optimizer": {"learning_rate": 4e-3, "batch_size": 256, "epochs": 300},
        "regions": {"kind": "dataset"},
        "sweep": {"kinds": ["tree-global", "tree-regional-l1", "tree-regional-l0"]},
    },
    "wine": {
        "data": {"dataset": "csv", "csv_path": "data/winequality-red.csv"},
        "model": {"family": "mlp", "hidden_sizes": [128, 128, 128, 64, 64]},
        "regularizer": {"h": 25},
        "surrogate": {"retrain_period": 50, "retrain_unit": "step", "augmentation_count": 250},
        "optimizer": {"learning_rate": 1e-4, "batch_size": 256, "epochs": 300},
        "regions": {"kind": "kmeans", "k": 5},
        "sweep": {"kinds": ["l2", "tree-global", "tree-regional-l0"], "seeds": [0, 1, 2]},
    },
}
