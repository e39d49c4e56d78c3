"""Run configuration: defaults, TOML file loading, and flag overrides.

Defaults are the published hyper-parameters (T=10, beta in (0.0001, 0.2),
gamma=32, lambda1=100, lambda2=1, LR 1e-4 with cosine decay) at desk scale
(depth-3 net, batch 64, 200 epochs, 512 synthetic pairs). Precedence:
built-in defaults < config file < command-line overrides.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

try:
    import tomllib  # py>=3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError
from .net import NetConfig
from .schedule import NoiseSchedule, linear_schedule
from .synth import SpecRanges
from .train import TrainSettings


@dataclass
class ScheduleConfig:
    T: int = 10
    beta_min: float = 0.0001
    beta_max: float = 0.2

    def build(self) -> NoiseSchedule:
        return linear_schedule(self.T, self.beta_min, self.beta_max)


@dataclass
class ModelConfig:
    depth: int = 3
    base_channels: int = 32
    channel_multipliers: list = field(default_factory=lambda: [1, 2, 4])
    attention_stages: list = field(default_factory=lambda: [1, 2])
    embed_dim: int = 64

    def build(self) -> NetConfig:
        return NetConfig(
            depth=self.depth,
            base_channels=self.base_channels,
            channel_multipliers=tuple(self.channel_multipliers),
            attention_stages=tuple(self.attention_stages),
            embed_dim=self.embed_dim,
        )


@dataclass
class RddmConfig:
    gamma: int = 32
    lambda1: float = 100.0
    lambda2: float = 1.0


@dataclass
class TrainConfig:
    lr: float = 1e-4
    lr_min: float = 1e-6
    weight_decay: float = 0.01
    batch: int = 64
    epochs: int = 200
    seed: int = 0
    save_every: int = 0

    def settings(self, rddm: RddmConfig) -> TrainSettings:
        return TrainSettings(
            epochs=self.epochs,
            batch_size=self.batch,
            lr=self.lr,
            lr_min=self.lr_min,
            weight_decay=self.weight_decay,
            seed=self.seed,
            gamma=rddm.gamma,
            lambdas=(rddm.lambda1, rddm.lambda2),
        )


@dataclass
class DataConfig:
    source: str = "synth"
    paths: list = field(default_factory=list)
    n_pairs: int = 512
    seed: int = 1
    hr_min: float = 55.0
    hr_max: float = 90.0
    jitter_max: float = 0.05
    delay_min_ms: float = 200.0
    delay_max_ms: float = 200.0
    noise_std: float = 0.01

    def ranges(self) -> SpecRanges:
        return SpecRanges(
            hr_bpm=(self.hr_min, self.hr_max),
            rr_jitter=(0.0, self.jitter_max),
            delay_ms=(self.delay_min_ms, self.delay_max_ms),
            noise_std=self.noise_std,
        )


@dataclass
class RunConfig:
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    rddm: RddmConfig = field(default_factory=RddmConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    data: DataConfig = field(default_factory=DataConfig)

    def validate(self) -> "RunConfig":
        s, t, r, d = self.schedule, self.train, self.rddm, self.data
        if s.T < 1:
            raise ConfigError("schedule.T must be >= 1")
        if not 0 < s.beta_min <= s.beta_max < 1:
            raise ConfigError("schedule.beta_min/beta_max must satisfy 0 < min <= max < 1")
        if r.gamma < 2 or r.gamma % 2:
            raise ConfigError("rddm.gamma must be an even integer >= 2")
        if r.lambda1 < 0 or r.lambda2 < 0:
            raise ConfigError("rddm.lambda1/lambda2 must be >= 0")
        if t.epochs < 1:
            raise ConfigError("train.epochs must be >= 1")
        if t.batch < 1:
            raise ConfigError("train.batch must be >= 1")
        if not 0 < t.lr_min <= t.lr:
            raise ConfigError("train.lr/lr_min must satisfy 0 < lr_min <= lr")
        if d.source not in ("synth", "files"):
            raise ConfigError("data.source must be 'synth' or 'files'")
        if d.source == "files" and not d.paths:
            raise ConfigError("data.paths must list input files when data.source = 'files'")
        if d.n_pairs < 1:
            raise ConfigError("data.n_pairs must be >= 1")
        if not 30 <= d.hr_min <= d.hr_max <= 220:
            raise ConfigError("data.hr_min/hr_max must satisfy 30 <= min <= max <= 220")
        try:
            self.model.build()
        except Exception as exc:
            raise ConfigError(f"model: {exc}") from exc
        return self


_SECTIONS = {f.name: f.type for f in fields(RunConfig)}


def _apply(section_obj, key: str, value, where: str) -> None:
    names = {f.name: f for f in fields(section_obj)}
    if key not in names:
        raise ConfigError(f"unknown config field {where}.{key}")
    current = getattr(section_obj, key)
    try:
        if isinstance(current, bool):
            value = value in (True, "true", "1", 1)
        elif isinstance(current, int) and not isinstance(value, bool):
            value = int(value)
        elif isinstance(current, float):
            value = float(value)
        elif isinstance(current, list) and isinstance(value, str):
            value = [_coerce_scalar(v) for v in value.split(",") if v]
        elif isinstance(current, str):
            value = str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {where}.{key}: {exc}") from exc
    setattr(section_obj, key, value)


def _coerce_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> RunConfig:
    """Build a RunConfig from defaults, an optional TOML file, and overrides.

    Overrides are ``section.key=value`` strings (e.g. ``train.epochs=5``).
    """
    cfg = RunConfig()
    if path is not None:
        try:
            raw = tomllib.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from exc
        for section, values in raw.items():
            if section not in _SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            if not isinstance(values, dict):
                raise ConfigError(f"config section [{section}] must be a table")
            for key, value in values.items():
                _apply(getattr(cfg, section), key, value, section)
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        dotted, value = item.split("=", 1)
        section, key = dotted.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section {section!r} in override {item!r}")
        _apply(getattr(cfg, section), key, value, section)
    return cfg.validate()


def config_to_dict(cfg: RunConfig) -> dict:
    return dataclasses.asdict(cfg)
