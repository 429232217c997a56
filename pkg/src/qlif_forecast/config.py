"""Experiment configuration, dataset schemas and phase presets.

Config files are JSON objects whose keys mirror :class:`ExperimentConfig`;
``schema`` may be a preset name, a path to a schema JSON file or an inline
schema object. ``docs/config_schema.md`` lists every key.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .data import DatasetSchema, SplitRule
from .errors import ConfigError, DataError
from .model import ModelSpec, TrainConfig

WEATHER_SCHEMA = {
    "name": "weather",
    "columns": {
        "temperature": "Temperature (C)",
        "humidity": "Humidity",
        "wind_speed": "Wind Speed (km/h)",
        "pressure": "Pressure (millibars)",
    },
    "inputs": ["temperature", "humidity", "wind_speed", "pressure"],
    "targets": ["temperature", "humidity", "wind_speed", "pressure"],
    "time_column": "Formatted Date",
    "window": 12,
    "split": {"kind": "fixed", "train": 10_000, "test": 2_000},
    "max_rows": 12_012,
    "max_ffill": None,
}

AIR_QUALITY_SCHEMA = {
    "name": "air_quality",
    "columns": {"pm10": "pm10", "o3": "o3", "no2": "no2", "pm25": "pm25"},
    "inputs": ["pm10", "o3", "no2"],
    "targets": ["pm25"],
    "time_column": "date",
    "window": 12,
    "split": {"kind": "fraction", "train": 0.8},
    "max_rows": None,
    "max_ffill": 3,
}

WIND_SCHEMA = {
    "name": "wind",
    "columns": {"wind_speed": "wind_speed_100m (km/h)"},
    "inputs": ["wind_speed"],
    "targets": ["wind_speed"],
    "time_column": "time",
    "window": 12,
    "split": {"kind": "fraction", "train": 0.8},
    "max_rows": None,
    "max_ffill": None,
}

SCHEMAS = {"weather": WEATHER_SCHEMA, "air_quality": AIR_QUALITY_SCHEMA, "wind": WIND_SCHEMA}

PHASES = {
    "phase1": {"schema": "weather", "model": {"lstm_units": 24}, "train": {"max_epochs": 15}},
    "phase2a": {"schema": "air_quality", "model": {"lstm_units": 48}, "train": {"max_epochs": 30}},
    "phase2b": {"schema": "wind", "model": {"lstm_units": 24}, "train": {"max_epochs": 30}},
    "custom": {},
}


def resolve_schema(value) -> DatasetSchema:
    if isinstance(value, DatasetSchema):
        return value
    if isinstance(value, dict):
        return DatasetSchema.from_dict(value)
    if isinstance(value, str):
        if value in SCHEMAS:
            return DatasetSchema.from_dict(SCHEMAS[value])
        return DatasetSchema.from_file(value)
    raise ConfigError(f"cannot interpret schema {value!r}")


@dataclass
class ExperimentConfig:
    phase: str = "phase1"
    data_path: str | None = None
    schema: object = "weather"
    neuron_kind: str = "qlif"
    seeds: list = field(default_factory=lambda: [0])
    model: dict = field(default_factory=dict)  # ModelSpec overrides
    train: TrainConfig = field(default_factory=TrainConfig)
    train_windows: int | None = None
    test_windows: int | None = None
    device_scale: float = 1.0
    out_dir: str = "runs"

    def __post_init__(self):
        if self.phase not in PHASES:
            raise ConfigError(f"unknown phase {self.phase!r}; choose from {sorted(PHASES)}")
        if isinstance(self.train, dict):
            self.train = _train_config(self.train)
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not 0.0 < self.device_scale <= 1.0:
            raise ConfigError(f"device_scale must lie in (0, 1], got {self.device_scale}")
        bad = set(self.model) - {f.name for f in fields(ModelSpec)} | ({"n_features", "n_targets", "window"} & set(self.model))
        if bad:
            raise ConfigError(f"model overrides not allowed: {sorted(bad)}")

    @classmethod
    def for_phase(cls, phase: str, **overrides) -> "ExperimentConfig":
        if phase not in PHASES:
            raise ConfigError(f"unknown phase {phase!r}; choose from {sorted(PHASES)}")
        preset = PHASES[phase]
        train = _train_config(preset.get("train", {}))
        kw = {"phase": phase, "schema": preset.get("schema", "weather"), "model": dict(preset.get("model", {})), "train": train}
        kw.update(overrides)
        return cls(**kw)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        phase = d.pop("phase", "phase1")
        base = cls.for_phase(phase)
        if "train" in d:
            d["train"] = _train_config({**asdict(base.train), **d["train"]})
        if "model" in d:
            d["model"] = {**base.model, **d["model"]}
        return cls.for_phase(phase, **d)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        return cls.from_dict(raw)

    def dataset_schema(self) -> DatasetSchema:
        try:
            return resolve_schema(self.schema)
        except DataError as e:
            raise ConfigError(str(e)) from e

    def model_spec(self, n_features: int, n_targets: int, window: int, neuron_kind: str | None = None) -> ModelSpec:
        return ModelSpec(
            neuron_kind=neuron_kind or self.neuron_kind,
            n_features=n_features,
            n_targets=n_targets,
            window=window,
            **self.model,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        schema = self.dataset_schema().to_dict()
        schema["split"] = asdict(SplitRule(**schema["split"])) if isinstance(schema["split"], dict) else schema["split"]
        d["schema"] = schema
        return d


def _train_config(d: dict) -> TrainConfig:
    names = {f.name for f in fields(TrainConfig)}
    unknown = set(d) - names
    if unknown:
        raise ConfigError(f"unknown training keys: {sorted(unknown)}")
    return TrainConfig(**d)
