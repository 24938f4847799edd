"""Particle state, velocity/position update and feasibility repair."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..metrics import dominates
from ..scenario import Scenario
from .config import OptimizerConfig

__all__ = ["SearchSpace", "Particle", "update_particle", "update_pbest", "update_pbest_single"]


@dataclass(frozen=True)
class SearchSpace:
    """Box bounds on antenna coordinates plus the power-ratio simplex.

    Flat layout is ``(x_1..x_J, y_1..y_J, rho_1..rho_J)``.
    """

    num_nodes: int
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "SearchSpace":
        j = scenario.num_nodes
        lo = scenario.placement.lower
        hi = scenario.placement.upper
        lower = np.concatenate([np.full(j, lo[0]), np.full(j, lo[1])])
        upper = np.concatenate([np.full(j, hi[0]), np.full(j, hi[1])])
        return cls(j, lower, upper)

    @property
    def dim(self) -> int:
        return 3 * self.num_nodes

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``count`` uniform feasible points: uniform positions, uniform on the ratio simplex."""
        j = self.num_nodes
        pos = rng.uniform(self.lower, self.upper, size=(count, 2 * j))
        rho = j * rng.dirichlet(np.ones(j), size=count)
        return np.hstack([pos, rho])

    def repair(self, x: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Project ``x`` onto the feasible set; zero velocity on clamped coordinates."""
        j = self.num_nodes
        x = x.copy()
        v = v.copy()
        pos = x[: 2 * j]
        clamped = (pos < self.lower) | (pos > self.upper)
        x[: 2 * j] = np.clip(pos, self.lower, self.upper)
        v[: 2 * j][clamped] = 0.0
        rho = np.maximum(x[2 * j :], 0.0)
        total = rho.sum()
        x[2 * j :] = np.ones(j) if total <= 0 else rho * (j / total)
        return x, v


@dataclass(frozen=True)
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_objectives: tuple[float, float]
    objectives: tuple[float, float] | None = None


def update_particle(
    p: Particle,
    gbest: np.ndarray,
    t: int,
    cfg: OptimizerConfig,
    rng: np.random.Generator,
    space: SearchSpace,
) -> Particle:
    """One inertia-weighted PSO step followed by velocity clamping and repair."""
    dim = len(p.position)
    r1 = rng.random(dim)
    r2 = rng.random(dim)
    w = cfg.inertia(t)
    v = (
        w * p.velocity
        + cfg.c1 * r1 * (p.pbest_position - p.position)
        + cfg.c2 * r2 * (np.asarray(gbest) - p.position)
    )
    vmax = cfg.velocity_limits(dim)
    v = np.clip(v, -vmax, vmax)
    x, v = space.repair(p.position + v, v)
    return replace(p, position=x, velocity=v, objectives=None)


def update_pbest(p: Particle, new_objectives: Sequence[float]) -> Particle:
    """Replace the personal best only when the new objectives dominate it."""
    new = (float(new_objectives[0]), float(new_objectives[1]))
    if dominates(new, p.pbest_objectives):
        return replace(p, pbest_position=p.position.copy(), pbest_objectives=new, objectives=new)
    return replace(p, objectives=new)


def single_objective_key(objectives: Sequence[float], k: int) -> tuple[float, float]:
    """Fitness for sub-swarm ``k``: objective ``k`` first, the other breaks ties."""
    return (objectives[k], objectives[1 - k])


def update_pbest_single(p: Particle, new_objectives: Sequence[float], k: int) -> Particle:
    """Personal-best update for a sub-swarm optimizing objective ``k`` alone."""
    new = (float(new_objectives[0]), float(new_objectives[1]))
    if single_objective_key(new, k) > single_objective_key(p.pbest_objectives, k):
        return replace(p, pbest_position=p.position.copy(), pbest_objectives=new, objectives=new)
    return replace(p, objectives=new)
