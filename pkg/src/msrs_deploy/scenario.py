"""Surveillance world model and the two deployment objectives.

Ranges are in km, RTSN values are linear. A deployment is scored by the
fraction of grid cells whose detection probability reaches ``p_dt``
(coverage ratio) and by the smallest per-cell RTSN (lowest RTSN).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .detection import DetectorConfig, Mode, detection_probability, required_rtsn

__all__ = [
    "ConfigError",
    "RcsModel",
    "Region",
    "Scenario",
    "DeploymentVector",
    "ObjectiveVector",
    "RcsTable",
    "grid_cells",
    "pair_rtsn",
    "cell_rtsn",
    "cell_rtsn_map",
    "evaluate",
    "to_db",
    "from_db",
]

POWER_SUM_TOL = 1e-9
# cells whose RTSN lies this close (relative) to the coverage cut get an explicit Pd
_EXPLICIT_PD_BAND = 1e-9


class ConfigError(ValueError):
    """Invalid scenario or optimizer configuration."""


def to_db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else -math.inf


def from_db(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


class RcsModel:
    DETERMINISTIC = "deterministic"
    RAYLEIGH = "rayleigh"
    ALL = (DETERMINISTIC, RAYLEIGH)


@dataclass(frozen=True)
class Region:
    width: float
    height: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ConfigError(f"region width and height must be > 0, got {self.width}x{self.height}")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def lower(self) -> np.ndarray:
        return np.array(self.origin, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.origin[0] + self.width, self.origin[1] + self.height], dtype=float)

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> bool:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return bool(np.all(pts >= self.lower - tol) and np.all(pts <= self.upper + tol))


@dataclass(frozen=True)
class Scenario:
    """The fixed world a deployment is evaluated in.

    ``d0`` and ``sigma`` are linear ratios. The placement region defaults to
    the surveillance region.
    """

    surveillance: Region
    num_nodes: int
    mode: Mode = Mode.COOPERATIVE
    placement: Region | None = None
    cell_area: float = 2.5
    d0: float = from_db(12.5)
    r_max: float = 6.0
    sigma: float = 1.0
    p_dt: float = 0.8
    p_fa: float = 1e-6
    rcs_model: str = RcsModel.DETERMINISTIC
    rcs_seed: int = 0
    min_range: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.placement is None:
            object.__setattr__(self, "placement", self.surveillance)
        if self.num_nodes < 1:
            raise ConfigError(f"num_nodes must be >= 1, got {self.num_nodes}")
        for name in ("p_dt", "p_fa"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        for name in ("d0", "r_max", "sigma", "cell_area", "min_range"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be finite and > 0, got {v}")
        if self.rcs_model not in RcsModel.ALL:
            raise ConfigError(f"rcs_model must be one of {RcsModel.ALL}, got {self.rcs_model!r}")
        if self.cell_area > self.surveillance.area:
            raise ConfigError(
                f"cell_area {self.cell_area} exceeds surveillance area {self.surveillance.area}"
            )

    @property
    def cell_side(self) -> float:
        return math.sqrt(self.cell_area)

    @cached_property
    def cells(self) -> np.ndarray:
        return grid_cells(self)

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @cached_property
    def rcs(self) -> "RcsTable":
        return RcsTable.build(self)


def grid_cells(scenario: Scenario) -> np.ndarray:
    """Cell centres of the surveillance grid, shape ``(U, 2)``, row-major.

    Cells are squares of side ``sqrt(cell_area)``. ``U = floor(area / cell_area)``;
    the lattice has ``ceil(width / side)`` columns and is filled row by row
    (x ascending, then y ascending). When the side does not tile the region
    the last row is partial and every cell square still overlaps the region:
    centres may sit up to half a side past the far edges.
    """
    region = scenario.surveillance
    if scenario.cell_area > region.area:
        raise ConfigError(f"cell_area {scenario.cell_area} exceeds region area {region.area}")
    side = math.sqrt(scenario.cell_area)
    # guard floor() against representation error, e.g. 2500 / 2.5
    count = int(math.floor(region.area / scenario.cell_area + 1e-9))
    per_row = max(1, int(math.ceil(region.width / side - 1e-9)))
    idx = np.arange(count)
    col = idx % per_row
    row = idx // per_row
    x = region.origin[0] + (col + 0.5) * side
    y = region.origin[1] + (row + 0.5) * side
    return np.column_stack([x, y])


@dataclass(frozen=True)
class RcsTable:
    """Bistatic RCS ``sigma_{m,n}`` for every transmitter/receiver pair."""

    values: np.ndarray

    @classmethod
    def build(cls, scenario: Scenario) -> "RcsTable":
        j = scenario.num_nodes
        if scenario.rcs_model == RcsModel.DETERMINISTIC:
            return cls(np.full((j, j), scenario.sigma))
        rng = np.random.default_rng(scenario.rcs_seed)
        alpha = (rng.standard_normal((j, j)) + 1j * rng.standard_normal((j, j))) / math.sqrt(2.0)
        values = np.abs(alpha) ** 2
        # keep entries strictly positive
        values = np.maximum(values, np.finfo(float).tiny)
        return cls(values)

    @classmethod
    def uniform(cls, num_nodes: int, sigma: float = 1.0) -> "RcsTable":
        return cls(np.full((num_nodes, num_nodes), float(sigma)))


@dataclass(frozen=True)
class DeploymentVector:
    """Antenna positions (km) and transmit power ratios for J nodes."""

    positions: np.ndarray
    power_ratios: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        rho = np.asarray(self.power_ratios, dtype=float).reshape(-1)
        if len(pos) != len(rho):
            raise ConfigError(f"{len(pos)} positions but {len(rho)} power ratios")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "power_ratios", rho)

    @property
    def num_nodes(self) -> int:
        return len(self.power_ratios)

    def flat(self) -> np.ndarray:
        """``(x_1..x_J, y_1..y_J, rho_1..rho_J)``."""
        return np.concatenate([self.positions[:, 0], self.positions[:, 1], self.power_ratios])

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "DeploymentVector":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or len(arr) % 3:
            raise ConfigError(f"flat deployment vector must have 3J entries, got {arr.shape}")
        j = len(arr) // 3
        return cls(np.column_stack([arr[:j], arr[j : 2 * j]]), arr[2 * j :])

    def validate(self, scenario: Scenario) -> None:
        if self.num_nodes != scenario.num_nodes:
            raise ConfigError(f"expected {scenario.num_nodes} nodes, got {self.num_nodes}")
        if not np.all(np.isfinite(self.positions)) or not np.all(np.isfinite(self.power_ratios)):
            raise ConfigError("deployment vector contains non-finite values")
        if not scenario.placement.contains(self.positions):
            raise ConfigError("antenna position outside the placement region")
        if np.any(self.power_ratios < 0):
            raise ConfigError("power ratios must be nonnegative")
        total = float(self.power_ratios.sum())
        if abs(total - self.num_nodes) > POWER_SUM_TOL:
            raise ConfigError(f"power ratios sum to {total}, expected {self.num_nodes}")


class ObjectiveVector(NamedTuple):
    coverage_ratio: float
    lowest_rtsn: float

    @property
    def lowest_rtsn_db(self) -> float:
        return to_db(self.lowest_rtsn)


def _ranges(points: np.ndarray, nodes: np.ndarray, min_range: float) -> np.ndarray:
    diff = points[:, None, :] - nodes[None, :, :]
    return np.maximum(np.sqrt(np.sum(diff * diff, axis=-1)), min_range)


def pair_rtsn(
    dv: DeploymentVector,
    m: int,
    n: int,
    cell: Sequence[float],
    scenario: Scenario,
    rcs: RcsTable,
) -> float:
    """RTSN of the transmitter ``m`` / receiver ``n`` pair for one cell."""
    cell = np.asarray(cell, dtype=float)
    r_t = max(float(np.hypot(*(cell - dv.positions[m]))), scenario.min_range)
    r_r = max(float(np.hypot(*(cell - dv.positions[n]))), scenario.min_range)
    return (
        scenario.d0
        * dv.power_ratios[m]
        * rcs.values[m, n]
        * scenario.r_max**4
        / (scenario.sigma * (r_t * r_r) ** 2)
    )


def cell_rtsn_map(
    dv: DeploymentVector,
    cells: np.ndarray,
    scenario: Scenario,
    rcs: RcsTable,
) -> np.ndarray:
    """Per-cell RTSN for an array of cell centres, shape ``(U,)``.

    Cooperative mode sums all J*J pairs in a fixed (m, n) row-major order;
    non-cooperative mode takes the best monostatic pair.
    """
    cells = np.asarray(cells, dtype=float).reshape(-1, 2)
    inv_r2 = 1.0 / _ranges(cells, dv.positions, scenario.min_range) ** 2
    scale = scenario.d0 * scenario.r_max**4 / scenario.sigma
    tx = inv_r2 * dv.power_ratios[None, :]
    if scenario.mode is Mode.COOPERATIVE:
        pairs = tx[:, :, None] * rcs.values[None, :, :] * inv_r2[:, None, :]
        return scale * pairs.reshape(len(cells), -1).sum(axis=1)
    mono = tx * np.diagonal(rcs.values)[None, :] * inv_r2
    return scale * mono.max(axis=1)


def cell_rtsn(dv: DeploymentVector, cell: Sequence[float], scenario: Scenario, rcs: RcsTable) -> float:
    return float(cell_rtsn_map(dv, np.asarray(cell, dtype=float)[None, :], scenario, rcs)[0])


def evaluate(
    dv: DeploymentVector,
    scenario: Scenario,
    rcs: RcsTable | None = None,
    detector: DetectorConfig | None = None,
) -> ObjectiveVector:
    """Coverage ratio and lowest RTSN of a deployment.

    Pd grows strictly with the RTSN, so a cell is covered exactly when its
    RTSN reaches the RTSN at which Pd equals ``p_dt``. Cells within a narrow
    band of that cut are decided by evaluating Pd directly.
    """
    if rcs is None:
        rcs = scenario.rcs
    if detector is None:
        detector = DetectorConfig.build(scenario.mode, scenario.num_nodes, scenario.p_fa)
    chi = cell_rtsn_map(dv, scenario.cells, scenario, rcs)
    cut = required_rtsn(detector, scenario.p_dt)
    covered = chi >= cut
    near = np.flatnonzero(np.abs(chi - cut) <= _EXPLICIT_PD_BAND * max(cut, 1e-300))
    for u in near:
        covered[u] = detection_probability(float(chi[u]), detector) >= scenario.p_dt
    return ObjectiveVector(int(np.count_nonzero(covered)) / len(chi), float(chi.min()))
