"""Comparison metrics for solution sets in (coverage ratio, lowest RTSN dB) space."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "FrontPoint",
    "ReferencePoint",
    "DEFAULT_REFERENCE",
    "AverageImprovement",
    "dominates",
    "nondominated_mask",
    "average_improvement",
    "dominated_space",
    "dominated_fraction",
]


class FrontPoint(NamedTuple):
    coverage_ratio: float
    lowest_rtsn_db: float


class ReferencePoint(NamedTuple):
    coverage_ratio: float
    lowest_rtsn_db: float


DEFAULT_REFERENCE = ReferencePoint(0.15, -15.0)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` is componentwise >= ``b`` and differs somewhere (maximization)."""
    ge = all(x >= y for x, y in zip(a, b))
    return ge and any(x > y for x, y in zip(a, b))


def nondominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row. O(n^2)."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        ge = np.all(pts >= pts[i], axis=1)
        gt = np.any(pts > pts[i], axis=1)
        if np.any(ge & gt):
            mask[i] = False
    return mask


@dataclass(frozen=True)
class AverageImprovement:
    """Average improvement of one objective; ``value`` is None when undefined."""

    value: float | None
    used: int
    skipped: int

    @property
    def defined(self) -> bool:
        return self.value is not None


def average_improvement(
    igs: Iterable[Sequence[float]],
    cgs: Iterable[Sequence[float]],
    k: int,
) -> AverageImprovement:
    """Mean gain in objective ``k`` of the improved group over the control group.

    For every control point z, the gain is averaged over the improved points
    that dominate z; control points dominated by nothing are skipped and
    counted. ``value`` is None when every control point is skipped.
    """
    igs = [tuple(map(float, p)) for p in igs]
    cgs = [tuple(map(float, p)) for p in cgs]
    if not cgs:
        raise ValueError("control group must be nonempty")
    per_point = []
    skipped = 0
    for z in cgs:
        gains = [p[k] - z[k] for p in igs if dominates(p, z)]
        if not gains:
            skipped += 1
            continue
        per_point.append(sum(gains) / len(gains))
    if not per_point:
        return AverageImprovement(None, 0, skipped)
    return AverageImprovement(sum(per_point) / len(per_point), len(per_point), skipped)


def dominated_space(front: Iterable[Sequence[float]], ref: Sequence[float] = DEFAULT_REFERENCE) -> float:
    """Exact 2-D hypervolume weakly dominated by ``front`` above ``ref`` (maximization)."""
    pts = np.asarray([tuple(p) for p in front], dtype=float).reshape(-1, 2)
    r0, r1 = float(ref[0]), float(ref[1])
    pts = pts[(pts[:, 0] > r0) & (pts[:, 1] > r1)]
    if len(pts) == 0:
        return 0.0
    # sweep from the largest first coordinate down, stacking new height bands
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    area = 0.0
    top = r1
    for x, y in pts[order]:
        if y > top:
            area += (x - r0) * (y - top)
            top = y
    return float(area)


def dominated_fraction(a: Iterable[Sequence[float]], b: Iterable[Sequence[float]]) -> float:
    """Fraction of points in ``a`` dominated by at least one point in ``b``."""
    a = list(a)
    b = list(b)
    if not a:
        return 0.0
    hit = sum(1 for p in a if any(dominates(q, p) for q in b))
    return hit / len(a)
