from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..scenario import ConfigError

ALGORITHMS = ("mopso_cd", "mopso_nrcd", "random")
ALGORITHM_ALIASES = {"cd": "mopso_cd", "nrcd": "mopso_nrcd", "random": "random"}


@dataclass(frozen=True)
class OptimizerConfig:
    """Swarm sizes and PSO coefficients. Defaults are the reference parameter set.

    ``v_max`` is either one limit for every dimension or a sequence of 3J limits.
    """

    algorithm: str = "mopso_nrcd"
    swarm_size: int = 200
    main_size: int = 100
    sub_size: int = 50
    t_max: int = 2000
    c1: float = 2.0
    c2: float = 2.0
    v_max: Union[float, Sequence[float]] = 4.0
    w_start: float = 0.9
    w_delta: float = 0.5
    y_u: int = 3
    archive_capacity: int | None = None
    random_count: int = 50
    normalization: Union[str, Sequence[float]] = "archive_range"

    def __post_init__(self) -> None:
        algo = ALGORITHM_ALIASES.get(self.algorithm, self.algorithm)
        if algo not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        object.__setattr__(self, "algorithm", algo)
        if not isinstance(self.v_max, (int, float)):
            object.__setattr__(self, "v_max", tuple(float(v) for v in self.v_max))
        if not isinstance(self.normalization, str):
            object.__setattr__(self, "normalization", tuple(float(v) for v in self.normalization))
        self.validate()

    def validate(self) -> None:
        if self.algorithm == "mopso_cd" and self.swarm_size < 1:
            raise ConfigError("swarm_size must be >= 1 for mopso_cd")
        if self.algorithm == "mopso_nrcd":
            if self.main_size < 1:
                raise ConfigError("main_size must be >= 1 for mopso_nrcd")
            if self.sub_size < 1:
                raise ConfigError("sub_size must be >= 1 for mopso_nrcd")
        if self.algorithm == "random" and self.random_count < 1:
            raise ConfigError("random_count must be >= 1")
        if self.t_max < 0:
            raise ConfigError("t_max must be >= 0")
        if self.y_u < 1:
            raise ConfigError("y_u must be >= 1")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ConfigError("c1 and c2 must be > 0")
        if not (self.w_start > self.w_delta >= 0):
            raise ConfigError("need w_start > w_delta >= 0")
        vm = np.atleast_1d(np.asarray(self.v_max, dtype=float))
        if np.any(vm <= 0):
            raise ConfigError("v_max must be > 0")
        if self.archive_capacity is not None and self.archive_capacity < 2:
            raise ConfigError("archive_capacity must be >= 2 or null")

    def inertia(self, t: int) -> float:
        if self.t_max == 0:
            return self.w_start
        return self.w_start - self.w_delta * (t / self.t_max)

    def velocity_limits(self, dim: int) -> np.ndarray:
        vm = np.asarray(self.v_max, dtype=float)
        if vm.ndim == 0:
            return np.full(dim, float(vm))
        if vm.shape != (dim,):
            raise ConfigError(f"v_max has {vm.size} entries, expected {dim}")
        return vm
