"""External Pareto archive and its crowding annotations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from ..scenario import DeploymentVector, ObjectiveVector, to_db

__all__ = [
    "DUPLICATE_TOL",
    "ArchiveEntry",
    "Archive",
    "crowding_absolute",
    "crowding_vectors",
    "Normalization",
]

DUPLICATE_TOL = 1e-12

# "archive_range" or explicit per-objective ranges
Normalization = Union[str, Sequence[float]]


def crowding_absolute(objectives: np.ndarray) -> np.ndarray:
    """Absolute crowding distance of a front sorted by its first objective.

    Interior entries sum the neighbour gaps over all objectives; both
    boundary entries take the largest interior value. Fronts with fewer
    than three entries get zeros.
    """
    g = np.asarray(objectives, dtype=float)
    n = len(g)
    out = np.zeros(n)
    if n < 3:
        return out
    out[1:-1] = np.abs(g[2:] - g[:-2]).sum(axis=1)
    out[0] = out[-1] = out[1:-1].max()
    return out


def crowding_vectors(objectives: np.ndarray, normalization: Normalization = "archive_range") -> tuple[np.ndarray, np.ndarray]:
    """Per-entry crowding distance vectors and relative crowding distances.

    Returns ``(H, xi_rcd)`` with ``H`` of shape ``(I, K)``. Boundary rows use
    twice the gap to their single neighbour. Each component is divided by
    the objective's range (the archive's own max - min, or the supplied
    nominal ranges); a zero range contributes nothing.
    """
    g = np.asarray(objectives, dtype=float)
    n, k = g.shape
    h = np.zeros((n, k))
    if n < 3:
        return h, np.zeros(n)
    h[1:-1] = np.abs(g[2:] - g[:-2])
    h[0] = 2.0 * np.abs(g[1] - g[0])
    h[-1] = 2.0 * np.abs(g[-1] - g[-2])
    if isinstance(normalization, str):
        if normalization != "archive_range":
            raise ValueError(f"unknown normalization {normalization!r}")
        ranges = g.max(axis=0) - g.min(axis=0)
    else:
        ranges = np.asarray(normalization, dtype=float)
        if ranges.shape != (k,):
            raise ValueError(f"expected {k} nominal ranges, got {ranges.shape}")
    scaled = np.zeros_like(h)
    nz = ranges > 0
    scaled[:, nz] = h[:, nz] / ranges[nz]
    return h, scaled.sum(axis=1)


@dataclass
class ArchiveEntry:
    position: np.ndarray
    objectives: ObjectiveVector
    xi_cd: float = 0.0
    cdv: np.ndarray = field(default_factory=lambda: np.zeros(2))
    xi_rcd: float = 0.0

    @property
    def dv(self) -> DeploymentVector:
        return DeploymentVector.from_flat(self.position)


class Archive:
    """Non-dominated set of deployments, kept sorted by coverage ratio.

    Crowding is measured in ``(coverage ratio, lowest RTSN in dB)`` space by
    default; ``crowding_space="linear"`` uses the raw objective values.
    Bounded archives drop the interior entry with the smallest relative
    crowding distance until they fit.
    """

    def __init__(
        self,
        capacity: int | None = None,
        normalization: Normalization = "archive_range",
        crowding_space: str = "db",
    ) -> None:
        if capacity is not None and capacity < 2:
            raise ValueError("archive capacity must be >= 2 or None")
        if crowding_space not in ("db", "linear"):
            raise ValueError(f"unknown crowding_space {crowding_space!r}")
        self.capacity = capacity
        self.normalization = normalization
        self.crowding_space = crowding_space
        self.entries: list[ArchiveEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ArchiveEntry]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> ArchiveEntry:
        return self.entries[i]

    def objectives(self) -> np.ndarray:
        return np.array([tuple(e.objectives) for e in self.entries], dtype=float).reshape(-1, 2)

    def crowding_objectives(self) -> np.ndarray:
        g = self.objectives()
        if self.crowding_space == "db" and len(g):
            g = np.column_stack([g[:, 0], [to_db(v) for v in g[:, 1]]])
        return g

    def update(self, candidates: Iterable[tuple[Sequence[float], Sequence[float]]]) -> "Archive":
        """Merge ``(position, objectives)`` candidates, keeping only non-dominated ones."""
        changed = False
        objs = self.objectives()
        for position, obj in candidates:
            obj = ObjectiveVector(float(obj[0]), float(obj[1]))
            c = np.array(obj)
            if len(objs):
                ge = np.all(objs >= c, axis=1)
                if np.any(ge & np.any(objs > c, axis=1)):
                    continue
                if np.any(np.all(np.abs(objs - c) <= DUPLICATE_TOL, axis=1)):
                    continue
                beaten = np.all(c >= objs, axis=1) & np.any(c > objs, axis=1)
                if beaten.any():
                    keep = np.flatnonzero(~beaten)
                    self.entries = [self.entries[i] for i in keep]
                    objs = objs[keep]
            self.entries.append(ArchiveEntry(np.array(position, dtype=float), obj))
            objs = np.vstack([objs, c[None, :]])
            changed = True
        if changed:
            self.entries.sort(key=lambda e: e.objectives.coverage_ratio)
            self._prune()
            self.annotate()
        return self

    def _prune(self) -> None:
        if self.capacity is None:
            return
        while len(self.entries) > self.capacity:
            _, xi = crowding_vectors(self.crowding_objectives(), self.normalization)
            victim = 1 + int(np.argmin(xi[1:-1]))
            del self.entries[victim]

    def annotate(self) -> None:
        g = self.crowding_objectives()
        if len(g) == 0:
            return
        xi_cd = crowding_absolute(g)
        h, xi_rcd = crowding_vectors(g, self.normalization)
        for e, cd, hv, rcd in zip(self.entries, xi_cd, h, xi_rcd):
            e.xi_cd = float(cd)
            e.cdv = hv
            e.xi_rcd = float(rcd)

    def copy_view(self) -> tuple[tuple[ObjectiveVector, tuple[float, ...]], ...]:
        """Immutable snapshot of ``(objectives, position)`` pairs."""
        return tuple((e.objectives, tuple(float(v) for v in e.position)) for e in self.entries)
