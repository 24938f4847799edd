"""Optimization runs: MOPSO-NRCD, the MOPSO-CD baseline and random deployment.

Random draws come from independent streams spawned off one master seed:

* ``init``   - initial positions, velocities and random-baseline samples
* ``motion`` - the r1/r2 vectors of every particle update, in particle order
* ``leader`` - MOPSO-CD leader picks and degenerate NRCD tie draws

so the draw sequence of one stream never depends on another.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..detection import DetectorConfig
from ..scenario import DeploymentVector, ObjectiveVector, RcsTable, Scenario, evaluate
from .archive import Archive
from .config import OptimizerConfig
from .particle import (
    Particle,
    SearchSpace,
    single_objective_key,
    update_particle,
    update_pbest,
    update_pbest_single,
)
from .selection import select_leader_cd, select_leaders_nrcd

__all__ = ["Snapshot", "RunOutput", "make_streams", "run"]

log = logging.getLogger(__name__)

NUM_OBJECTIVES = 2


@dataclass(frozen=True)
class Snapshot:
    iteration: int
    entries: tuple[tuple[ObjectiveVector, tuple[float, ...]], ...]


@dataclass
class RunOutput:
    """Final archive plus snapshots. ``solutions`` is what gets reported:
    the archive for the swarm algorithms, every sample for random deployment."""

    algorithm: str
    archive: Archive
    solutions: list[tuple[np.ndarray, ObjectiveVector]]
    snapshots: list[Snapshot] = field(default_factory=list)
    evaluations: int = 0


def make_streams(seed: int) -> dict[str, np.random.Generator]:
    names = ("init", "motion", "leader")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {n: np.random.default_rng(c) for n, c in zip(names, children)}


class _Objective:
    def __init__(self, scenario: Scenario, rcs: RcsTable, detector: DetectorConfig) -> None:
        self.scenario = scenario
        self.rcs = rcs
        self.detector = detector
        self.calls = 0

    def __call__(self, x: np.ndarray) -> ObjectiveVector:
        self.calls += 1
        return evaluate(DeploymentVector.from_flat(x), self.scenario, self.rcs, self.detector)


def _init_swarm(
    count: int, space: SearchSpace, cfg: OptimizerConfig, rng: np.random.Generator, f: _Objective
) -> list[Particle]:
    xs = space.sample(rng, count)
    vmax = cfg.velocity_limits(space.dim)
    vs = rng.uniform(-vmax, vmax, size=(count, space.dim))
    out = []
    for x, v in zip(xs, vs):
        obj = tuple(f(x))
        out.append(Particle(x, v, x.copy(), obj, obj))
    return out


def _snapshot(t: int, archive: Archive, every: int, t_max: int, sink: list[Snapshot]) -> None:
    if every > 0 and (t % every == 0 or t == t_max):
        sink.append(Snapshot(t, archive.copy_view()))


def _new_archive(cfg: OptimizerConfig) -> Archive:
    return Archive(capacity=cfg.archive_capacity, normalization=cfg.normalization)


def run(
    config: OptimizerConfig,
    scenario: Scenario,
    detector: DetectorConfig,
    seed: int,
    rcs: RcsTable | None = None,
    snapshot_every: int = 0,
    progress: Callable[[int, Archive], None] | None = None,
) -> RunOutput:
    """Run one seeded optimization. Bit-reproducible for a fixed seed."""
    rcs = scenario.rcs if rcs is None else rcs
    streams = make_streams(seed)
    space = SearchSpace.from_scenario(scenario)
    f = _Objective(scenario, rcs, detector)
    if config.algorithm == "random":
        xs = space.sample(streams["init"], config.random_count)
        sols = [(x, f(x)) for x in xs]
        archive = _new_archive(config).update(sols)
        return RunOutput("random", archive, sols, [], f.calls)
    if config.algorithm == "mopso_cd":
        out = _run_cd(config, space, streams, f, snapshot_every, progress)
    else:
        out = _run_nrcd(config, space, streams, f, snapshot_every, progress)
    out.evaluations = f.calls
    return out


def _run_cd(cfg, space, streams, f, snapshot_every, progress) -> RunOutput:
    swarm = _init_swarm(cfg.swarm_size, space, cfg, streams["init"], f)
    archive = _new_archive(cfg).update((p.position, p.objectives) for p in swarm)
    snaps: list[Snapshot] = []
    _snapshot(0, archive, snapshot_every, cfg.t_max, snaps)
    for t in range(1, cfg.t_max + 1):
        leaders = [select_leader_cd(archive, streams["leader"]) for _ in swarm]
        gbests = [archive[i].position for i in leaders]
        swarm = [
            update_pbest(q, f(q.position))
            for q in (update_particle(p, g, t, cfg, streams["motion"], space) for p, g in zip(swarm, gbests))
        ]
        archive.update((p.position, p.objectives) for p in swarm)
        _snapshot(t, archive, snapshot_every, cfg.t_max, snaps)
        if progress:
            progress(t, archive)
    return RunOutput("mopso_cd", archive, _solutions(archive), snaps)


def _sub_best(swarm: list[Particle], k: int) -> np.ndarray:
    best = max(range(len(swarm)), key=lambda i: (single_objective_key(swarm[i].pbest_objectives, k), -i))
    return swarm[best].pbest_position


def _run_nrcd(cfg, space, streams, f, snapshot_every, progress) -> RunOutput:
    rng_init = streams["init"]
    main = _init_swarm(cfg.main_size, space, cfg, rng_init, f)
    subs = [_init_swarm(cfg.sub_size, space, cfg, rng_init, f) for _ in range(NUM_OBJECTIVES)]
    sub_gbest = [_sub_best(s, k) for k, s in enumerate(subs)]
    archive = _new_archive(cfg)
    archive.update((p.position, p.objectives) for p in main)
    for s in subs:
        archive.update((p.position, p.objectives) for p in s)
    snaps: list[Snapshot] = []
    _snapshot(0, archive, snapshot_every, cfg.t_max, snaps)
    motion = streams["motion"]
    for t in range(1, cfg.t_max + 1):
        sel = select_leaders_nrcd(archive, cfg.main_size, cfg.y_u, streams["leader"])
        new_main = []
        start = 0
        for leader, size in zip(sel.leaders, sel.group_sizes):
            gbest = archive[leader].position
            for p in main[start : start + size]:
                q = update_particle(p, gbest, t, cfg, motion, space)
                new_main.append(update_pbest(q, f(q.position)))
            start += size
        main = new_main
        for k in range(NUM_OBJECTIVES):
            updated = []
            for p in subs[k]:
                q = update_particle(p, sub_gbest[k], t, cfg, motion, space)
                updated.append(update_pbest_single(q, f(q.position), k))
            subs[k] = updated
            sub_gbest[k] = _sub_best(updated, k)
        archive.update((p.position, p.objectives) for p in main)
        for s in subs:
            archive.update((p.position, p.objectives) for p in s)
        _snapshot(t, archive, snapshot_every, cfg.t_max, snaps)
        if progress:
            progress(t, archive)
    return RunOutput("mopso_nrcd", archive, _solutions(archive), snaps)


def _solutions(archive: Archive) -> list[tuple[np.ndarray, ObjectiveVector]]:
    return [(e.position.copy(), e.objectives) for e in archive]
