"""Experiment configuration: nested blocks, strict loading, lossless echo."""

from __future__ import annotations

import hashlib
import json
import typing
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Union

from ..detection import DetectorConfig, Mode, PfaConvention
from ..optimizer.config import ALGORITHM_ALIASES, OptimizerConfig
from ..scenario import ConfigError, Region, Scenario, from_db

__all__ = [
    "SCHEMA_VERSION",
    "ConfigFieldError",
    "ScenarioBlock",
    "DetectorBlock",
    "OptimizerBlock",
    "RunBlock",
    "ExperimentConfig",
    "load_config",
]

SCHEMA_VERSION = 1

MODE_ALIASES = {"coop": "cooperative", "noncoop": "non_cooperative"}


class ConfigFieldError(ConfigError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ScenarioBlock:
    width_km: float = 50.0
    height_km: float = 50.0
    placement_width_km: Optional[float] = None
    placement_height_km: Optional[float] = None
    cell_area_km2: float = 2.5
    num_nodes: int = 5
    mode: str = "cooperative"
    p_dt: float = 0.8
    p_fa: float = 1e-6
    d0_db: float = 12.5
    r_max_km: float = 6.0
    sigma: float = 1.0
    rcs_model: str = "deterministic"
    rcs_seed: int = 0
    min_range_km: float = 0.1

    def validate(self, path: str) -> None:
        self.mode = MODE_ALIASES.get(self.mode, self.mode)
        if self.mode not in [m.value for m in Mode]:
            raise ConfigFieldError(f"{path}.mode", f"expected cooperative or non_cooperative, got {self.mode!r}")
        for name in ("width_km", "height_km", "cell_area_km2", "r_max_km", "sigma", "min_range_km"):
            if not getattr(self, name) > 0:
                raise ConfigFieldError(f"{path}.{name}", "must be > 0")
        for name in ("placement_width_km", "placement_height_km"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigFieldError(f"{path}.{name}", "must be > 0 or null")
        if self.num_nodes < 1:
            raise ConfigFieldError(f"{path}.num_nodes", "must be >= 1")
        for name in ("p_dt", "p_fa"):
            if not 0 < getattr(self, name) < 1:
                raise ConfigFieldError(f"{path}.{name}", "must lie in (0, 1)")
        if self.cell_area_km2 > self.width_km * self.height_km:
            raise ConfigFieldError(f"{path}.cell_area_km2", "exceeds the surveillance area")
        if self.rcs_model not in ("deterministic", "rayleigh"):
            raise ConfigFieldError(f"{path}.rcs_model", f"expected deterministic or rayleigh, got {self.rcs_model!r}")

    def build(self) -> Scenario:
        surveillance = Region(self.width_km, self.height_km)
        placement = None
        if self.placement_width_km is not None or self.placement_height_km is not None:
            placement = Region(
                self.placement_width_km if self.placement_width_km is not None else self.width_km,
                self.placement_height_km if self.placement_height_km is not None else self.height_km,
            )
        return Scenario(
            surveillance=surveillance,
            placement=placement,
            num_nodes=self.num_nodes,
            mode=Mode(self.mode),
            cell_area=self.cell_area_km2,
            d0=from_db(self.d0_db),
            r_max=self.r_max_km,
            sigma=self.sigma,
            p_dt=self.p_dt,
            p_fa=self.p_fa,
            rcs_model=self.rcs_model,
            rcs_seed=self.rcs_seed,
            min_range=self.min_range_km,
        )


@dataclass
class DetectorBlock:
    pfa_convention: str = "paper_literal"

    def validate(self, path: str) -> None:
        if self.pfa_convention not in [c.value for c in PfaConvention]:
            raise ConfigFieldError(
                f"{path}.pfa_convention", f"expected paper_literal or standard, got {self.pfa_convention!r}"
            )


@dataclass
class OptimizerBlock:
    algorithm: str = "mopso_nrcd"
    swarm_size: int = 200
    main_size: int = 100
    sub_size: int = 50
    t_max: int = 2000
    c1: float = 2.0
    c2: float = 2.0
    v_max: Union[float, list[float]] = 4.0
    w_start: float = 0.9
    w_delta: float = 0.5
    y_u: int = 3
    archive_capacity: Optional[int] = None
    random_count: int = 50
    normalization: Union[str, list[float]] = "archive_range"

    def validate(self, path: str) -> None:
        self.algorithm = ALGORITHM_ALIASES.get(self.algorithm, self.algorithm)
        try:
            self.build()
        except ConfigError as exc:
            raise ConfigFieldError(path, str(exc)) from None

    def build(self) -> OptimizerConfig:
        return OptimizerConfig(**asdict(self))


@dataclass
class RunBlock:
    seed: int = 0
    repetitions: int = 1
    snapshot_every: int = 0
    output_dir: str = "results"

    def validate(self, path: str) -> None:
        if self.seed < 0:
            raise ConfigFieldError(f"{path}.seed", "must be >= 0")
        if self.repetitions < 1:
            raise ConfigFieldError(f"{path}.repetitions", "must be >= 1")
        if self.snapshot_every < 0:
            raise ConfigFieldError(f"{path}.snapshot_every", "must be >= 0")


@dataclass
class ExperimentConfig:
    scenario: ScenarioBlock = field(default_factory=ScenarioBlock)
    detector: DetectorBlock = field(default_factory=DetectorBlock)
    optimizer: OptimizerBlock = field(default_factory=OptimizerBlock)
    run: RunBlock = field(default_factory=RunBlock)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigFieldError("<root>", "config must be a mapping")
        # a manifest carries the resolved config under "config"
        if "config" in data and "schema_version" in data:
            data = data["config"]
        blocks = {f.name: f.type for f in fields(cls)}
        unknown = set(data) - set(blocks)
        if unknown:
            raise ConfigFieldError(sorted(unknown)[0], "unknown section")
        hints = typing.get_type_hints(cls)
        kwargs = {name: _load_block(hints[name], data.get(name, {}), name) for name in blocks}
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for f in fields(self):
            getattr(self, f.name).validate(f.name)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def scenario_fingerprint(self) -> str:
        payload = {"scenario": asdict(self.scenario), "detector": asdict(self.detector)}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def build_scenario(self) -> Scenario:
        return self.scenario.build()

    def build_detector(self) -> DetectorConfig:
        return DetectorConfig.build(self.scenario.mode, self.scenario.num_nodes, self.scenario.p_fa, self.detector.pfa_convention)

    def build_optimizer(self) -> OptimizerConfig:
        return self.optimizer.build()


def _coerce(value: Any, tp: Any, path: str) -> Any:
    origin = typing.get_origin(tp)
    if origin is Union:
        args = typing.get_args(tp)
        if value is None and type(None) in args:
            return None
        errors = []
        for arg in args:
            if arg is type(None):
                continue
            try:
                return _coerce(value, arg, path)
            except ConfigFieldError as exc:
                errors.append(str(exc))
        raise ConfigFieldError(path, f"value {value!r} matches none of the allowed types")
    if origin is list:
        (item,) = typing.get_args(tp)
        if not isinstance(value, list):
            raise ConfigFieldError(path, f"expected a list, got {type(value).__name__}")
        return [_coerce(v, item, f"{path}[{i}]") for i, v in enumerate(value)]
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigFieldError(path, f"expected a boolean, got {value!r}")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigFieldError(path, f"expected an integer, got {value!r}")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigFieldError(path, f"expected a number, got {value!r}")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigFieldError(path, f"expected a string, got {value!r}")
        return value
    raise ConfigFieldError(path, f"unsupported field type {tp!r}")


def _load_block(block_cls: type, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigFieldError(path, "expected a mapping")
    hints = typing.get_type_hints(block_cls)
    names = {f.name for f in fields(block_cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigFieldError(f"{path}.{sorted(unknown)[0]}", "unknown key")
    kwargs = {k: _coerce(v, hints[k], f"{path}.{k}") for k, v in data.items()}
    return block_cls(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a JSON config file (or an experiment manifest)."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigFieldError("<file>", f"invalid JSON: {exc}") from None
    return ExperimentConfig.from_dict(data)
