"""Global-best selection policies for the main swarm."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .archive import Archive

__all__ = [
    "OptimizerStateError",
    "SelectionResult",
    "allocate_particles",
    "nondominated_cdv_indices",
    "select_leaders",
    "select_leaders_nrcd",
    "select_leader_cd",
    "cd_candidates",
]


class OptimizerStateError(RuntimeError):
    """The optimizer was asked to act on an invalid state (e.g. an empty archive)."""


@dataclass(frozen=True)
class SelectionResult:
    leaders: tuple[int, ...]
    group_sizes: tuple[int, ...]


def allocate_particles(weights: np.ndarray, total: int) -> list[int]:
    """Split ``total`` particles proportionally to ``weights``.

    Quotas are floored and the leftover particles go to the largest
    fractional parts (ties to the lower index). Every group gets at least
    one particle, taken from the currently largest group if needed.
    """
    w = np.asarray(weights, dtype=float)
    y = len(w)
    if y == 0:
        return []
    if total < y:
        raise OptimizerStateError(f"cannot give {y} groups at least one of {total} particles")
    s = w.sum()
    quotas = np.full(y, total / y) if s <= 0 else total * w / s
    sizes = np.floor(quotas).astype(int)
    frac = quotas - sizes
    leftover = total - int(sizes.sum())
    for i in sorted(range(y), key=lambda i: (-frac[i], i))[:leftover]:
        sizes[i] += 1
    for i in range(y):
        if sizes[i] == 0:
            donor = int(np.argmax(sizes))
            sizes[donor] -= 1
            sizes[i] = 1
    return [int(v) for v in sizes]


def nondominated_cdv_indices(cdv: np.ndarray) -> list[int]:
    """Indices whose crowding distance vectors no other vector dominates."""
    h = np.asarray(cdv, dtype=float)
    out = []
    for i in range(len(h)):
        ge = np.all(h >= h[i], axis=1)
        gt = np.any(h > h[i], axis=1)
        if not np.any(ge & gt):
            out.append(i)
    return out


def select_leaders(
    cdv: np.ndarray,
    xi_rcd: np.ndarray,
    swarm_size: int,
    max_leaders: int,
    rng: np.random.Generator | None = None,
) -> SelectionResult:
    """Non-dominated relative crowding distance selection on raw annotations.

    Candidates are the entries with non-dominated CDVs. At most
    ``max_leaders`` of them with the largest ``xi_rcd`` become leaders, and
    the swarm is split between them in proportion to ``xi_rcd``. Leaders are
    returned in ascending archive order.
    """
    xi = np.asarray(xi_rcd, dtype=float)
    n = len(xi)
    if n == 0:
        raise OptimizerStateError("cannot select leaders from an empty archive")
    y_max = min(max_leaders, swarm_size)
    if n < 3 or not np.any(xi > 0):
        # no usable crowding information: every entry is equally eligible
        candidates = list(range(n))
        if len(candidates) > y_max:
            if rng is None:
                candidates = candidates[:y_max]
            else:
                candidates = sorted(int(i) for i in rng.choice(n, size=y_max, replace=False))
        sizes = allocate_particles(np.ones(len(candidates)), swarm_size)
        return SelectionResult(tuple(candidates), tuple(sizes))
    candidates = nondominated_cdv_indices(cdv)
    if len(candidates) > y_max:
        ranked = sorted(candidates, key=lambda i: (-xi[i], i))
        candidates = sorted(ranked[:y_max])
    sizes = allocate_particles(xi[candidates], swarm_size)
    return SelectionResult(tuple(candidates), tuple(sizes))


def select_leaders_nrcd(
    archive: Archive,
    swarm_size: int,
    max_leaders: int,
    rng: np.random.Generator | None = None,
) -> SelectionResult:
    if len(archive) == 0:
        raise OptimizerStateError("cannot select leaders from an empty archive")
    cdv = np.array([e.cdv for e in archive])
    xi = np.array([e.xi_rcd for e in archive])
    return select_leaders(cdv, xi, swarm_size, max_leaders, rng)


def cd_candidates(xi_cd: np.ndarray, fraction: float = 0.1) -> list[int]:
    """Entries eligible as MOPSO-CD leaders.

    Entries are ranked by ``xi_cd`` descending (ties to the lower index) and
    the first ``ceil(fraction * I)`` are kept, extended by any entry tied
    with the last one kept. Boundary entries copy the interior maximum, so
    the tie extension keeps the cut from favouring one end of the front.
    Archives with fewer than three entries make every entry eligible.
    """
    xi = np.asarray(xi_cd, dtype=float)
    n = len(xi)
    if n == 0:
        raise OptimizerStateError("cannot select a leader from an empty archive")
    if n < 3:
        return list(range(n))
    ranked = sorted(range(n), key=lambda i: (-xi[i], i))
    top = max(1, math.ceil(fraction * n))
    cut = xi[ranked[top - 1]]
    return sorted(i for i in ranked if xi[i] >= cut)


def select_leader_cd(archive: Archive | np.ndarray, rng: np.random.Generator) -> int:
    """Uniform pick among the most crowded-distance-isolated archive entries."""
    if isinstance(archive, Archive):
        xi = np.array([e.xi_cd for e in archive])
    else:
        xi = np.asarray(archive, dtype=float)
    candidates = cd_candidates(xi)
    return candidates[int(rng.integers(len(candidates)))]
