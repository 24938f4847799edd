"""Multi-objective PSO engine for deployment search."""

from .archive import Archive, ArchiveEntry, crowding_absolute, crowding_vectors
from .config import ALGORITHMS, OptimizerConfig
from .particle import Particle, SearchSpace, update_particle, update_pbest, update_pbest_single
from .selection import (
    OptimizerStateError,
    SelectionResult,
    allocate_particles,
    select_leader_cd,
    select_leaders,
    select_leaders_nrcd,
)
from .swarm import RunOutput, Snapshot, run

__all__ = [
    "ALGORITHMS",
    "Archive",
    "ArchiveEntry",
    "OptimizerConfig",
    "OptimizerStateError",
    "Particle",
    "RunOutput",
    "SearchSpace",
    "SelectionResult",
    "Snapshot",
    "allocate_particles",
    "crowding_absolute",
    "crowding_vectors",
    "run",
    "select_leader_cd",
    "select_leaders",
    "select_leaders_nrcd",
    "update_particle",
    "update_pbest",
    "update_pbest_single",
]
