"""Square-law detection: generalized Marcum Q, threshold inversion and Pd.

The generalized Marcum function is evaluated through its Poisson mixture
form. With ``lam = a**2 / 2`` and ``x = b**2 / 2``::

    Q_N(a, b) = sum_k Pois(k; lam) * P(Pois(x) <= N + k - 1)

and its complement::

    1 - Q_N(a, b) = sum_{j >= N} Pois(j; x) * P(Pois(lam) <= j - N)

Both are sums of nonnegative terms. The direct sum is used when b >= a and
the complementary one otherwise, so the small quantity is always the one
accumulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from scipy.optimize import brentq

__all__ = [
    "DomainError",
    "Mode",
    "PfaConvention",
    "DetectorConfig",
    "marcum_q",
    "bessel_i",
    "pfa_of_threshold",
    "pfa_peak",
    "solve_threshold",
    "detection_probability",
    "required_rtsn",
]

_TAIL_TOL = 1e-17


class DomainError(ValueError):
    """Raised for inputs outside the domain of a detection function."""


class Mode(str, Enum):
    COOPERATIVE = "cooperative"
    NON_COOPERATIVE = "non_cooperative"


class PfaConvention(str, Enum):
    LITERAL = "paper_literal"
    STANDARD = "standard"


def _check_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")
        if v < 0:
            raise DomainError(f"{name} must be nonnegative, got {v!r}")


def _log_pois(k: int, mean: float) -> float:
    if mean == 0.0:
        return 0.0 if k == 0 else -math.inf
    return -mean + k * math.log(mean) - math.lgamma(k + 1)


def _pois_cdf(k: int, mean: float) -> float:
    """P(Pois(mean) <= k) by direct summation of log-domain terms."""
    if k < 0:
        return 0.0
    if mean == 0.0:
        return 1.0
    return min(1.0, math.fsum(math.exp(_log_pois(i, mean)) for i in range(k + 1)))


def _mixture_sum(order: int, mix_mean: float, cdf_mean: float) -> float:
    """sum_{k>=0} Pois(k; mix_mean) * P(Pois(cdf_mean) <= order - 1 + k)."""
    cdf = _pois_cdf(order - 1, cdf_mean)
    total = 0.0
    k = 0
    while True:
        w = math.exp(_log_pois(k, mix_mean))
        total += w * cdf
        # cdf factors are <= 1, so the rest is bounded by a geometric Poisson tail
        if k + 1 > mix_mean:
            ratio = mix_mean / (k + 1)
            if w * ratio / (1.0 - ratio) < _TAIL_TOL:
                break
        cdf = min(1.0, cdf + math.exp(_log_pois(order + k, cdf_mean)))
        k += 1
    return total


def _complement_sum(order: int, a_half: float, b_half: float) -> float:
    """1 - Q_N as sum_{j>=N} Pois(j; b_half) * P(Pois(a_half) <= j - N)."""
    if b_half == 0.0:
        return 0.0
    total = 0.0
    cdf = 0.0
    j = order
    while True:
        cdf = min(1.0, cdf + math.exp(_log_pois(j - order, a_half)))
        w = math.exp(_log_pois(j, b_half))
        total += w * cdf
        if j + 1 > b_half:
            ratio = b_half / (j + 1)
            if w * ratio / (1.0 - ratio) < _TAIL_TOL:
                break
        j += 1
    return total


def marcum_q(order: int, a: float, b: float) -> float:
    """Generalized Marcum Q function ``Q_order(a, b)``.

    Args:
        order: Positive integer order N.
        a: Noncentrality argument, ``a >= 0``.
        b: Threshold argument, ``b >= 0``.

    Returns:
        Probability in [0, 1], accurate to about 1e-15 absolute.
    """
    if order < 1 or int(order) != order:
        raise DomainError(f"order must be a positive integer, got {order!r}")
    a = float(a)
    b = float(b)
    _check_finite(a=a, b=b)
    order = int(order)
    if b == 0.0:
        return 1.0
    lam = 0.5 * a * a
    x = 0.5 * b * b
    if b >= a:
        q = _mixture_sum(order, lam, x)
    else:
        q = 1.0 - _complement_sum(order, lam, x)
    return min(1.0, max(0.0, q))


def bessel_i(order: int, z: float) -> float:
    """Modified Bessel function of the first kind ``I_order(z)`` by power series."""
    if order < 0 or int(order) != order:
        raise DomainError(f"order must be a nonnegative integer, got {order!r}")
    _check_finite(z=z)
    if z == 0.0:
        return 1.0 if order == 0 else 0.0
    half = math.log(0.5 * z)
    terms = []
    k = 0
    while True:
        log_t = (2 * k + order) * half - math.lgamma(k + 1) - math.lgamma(k + order + 1)
        terms.append(log_t)
        # terms decay once k^2 exceeds (z/2)^2
        if k > 0.5 * z and log_t < max(terms) - 40.0:
            break
        k += 1
    peak = max(terms)
    return math.exp(peak) * math.fsum(math.exp(t - peak) for t in terms)


def _log_pfa(gamma: float, order: int, convention: PfaConvention) -> float:
    """Natural log of the false-alarm probability at threshold ``gamma``."""
    if convention is PfaConvention.STANDARD:
        lo, hi = 0, order - 1
    elif order == 1:
        lo, hi = 1, 1
    else:
        lo, hi = 1, order - 1
    if gamma == 0.0:
        return 0.0 if lo == 0 else -math.inf
    lg = math.log(gamma)
    logs = [i * lg - math.lgamma(i + 1) for i in range(lo, hi + 1)]
    peak = max(logs)
    return -gamma + peak + math.log(math.fsum(math.exp(v - peak) for v in logs))


def pfa_of_threshold(gamma: float, order: int, convention: PfaConvention | str = PfaConvention.LITERAL) -> float:
    """False-alarm probability of a square-law detector with threshold ``gamma``.

    ``standard`` is the textbook form ``exp(-g) * sum_{i=0}^{N-1} g^i / i!``.
    ``paper_literal`` starts the cooperative sum at ``i = 1`` and uses
    ``exp(-g) * g`` for a single sample.
    """
    convention = PfaConvention(convention)
    _check_finite(gamma=gamma)
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order!r}")
    return math.exp(_log_pfa(float(gamma), int(order), convention))


def pfa_peak(order: int, convention: PfaConvention | str) -> float:
    """Threshold above which the false-alarm curve is strictly decreasing."""
    convention = PfaConvention(convention)
    if convention is PfaConvention.STANDARD:
        return 0.0
    if order <= 2:
        return 1.0
    # d/dg [exp(-g) sum_{i=1}^{N-1} g^i/i!] = exp(-g) (1 - g^{N-1}/(N-1)!)
    return math.exp(math.lgamma(order) / (order - 1))


@lru_cache(maxsize=256)
def _solve_threshold_cached(p_fa: float, order: int, convention: PfaConvention) -> float:
    lo = pfa_peak(order, convention)
    log_p = math.log(p_fa)
    log_max = _log_pfa(lo, order, convention)
    if log_p > log_max + 1e-15:
        raise DomainError(
            f"p_fa={p_fa!r} is not attainable for order {order} under {convention.value}; "
            f"maximum attainable is {math.exp(log_max)!r}"
        )
    if log_p >= log_max:
        return lo

    def f(g: float) -> float:
        return _log_pfa(g, order, convention) - log_p

    hi = max(2.0 * lo, 1.0)
    while f(hi) > 0:
        hi *= 2.0
    return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=500)


def solve_threshold(p_fa: float, order: int, convention: PfaConvention | str = PfaConvention.LITERAL) -> float:
    """Invert :func:`pfa_of_threshold` on its strictly decreasing branch."""
    if not (0.0 < p_fa < 1.0):
        raise DomainError(f"p_fa must lie in (0, 1), got {p_fa!r}")
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order!r}")
    return _solve_threshold_cached(float(p_fa), int(order), PfaConvention(convention))


@dataclass(frozen=True)
class DetectorConfig:
    """Square-law detector for one working mode, with its solved threshold.

    Build it with :meth:`build` so the threshold is computed once.
    """

    mode: Mode
    order: int
    p_fa: float
    pfa_convention: PfaConvention
    threshold: float

    @classmethod
    def build(
        cls,
        mode: Mode | str,
        num_nodes: int,
        p_fa: float,
        pfa_convention: PfaConvention | str = PfaConvention.LITERAL,
    ) -> "DetectorConfig":
        mode = Mode(mode)
        convention = PfaConvention(pfa_convention)
        if num_nodes < 1:
            raise DomainError(f"num_nodes must be >= 1, got {num_nodes!r}")
        order = num_nodes * num_nodes if mode is Mode.COOPERATIVE else 1
        gamma = solve_threshold(p_fa, order, convention)
        return cls(mode=mode, order=order, p_fa=float(p_fa), pfa_convention=convention, threshold=gamma)


def detection_probability(rtsn: float, detector: DetectorConfig) -> float:
    """Pd of a nonfluctuating target whose cell RTSN is ``rtsn`` (linear)."""
    if rtsn < 0 or not math.isfinite(rtsn):
        raise DomainError(f"rtsn must be finite and nonnegative, got {rtsn!r}")
    return marcum_q(detector.order, math.sqrt(2.0 * rtsn), math.sqrt(2.0 * detector.threshold))


@lru_cache(maxsize=256)
def _required_rtsn_cached(order: int, threshold: float, p_dt: float) -> float:
    b = math.sqrt(2.0 * threshold)

    def f(chi: float) -> float:
        return marcum_q(order, math.sqrt(2.0 * chi), b) - p_dt

    if f(0.0) >= 0.0:
        return 0.0
    hi = max(1.0, threshold)
    while f(hi) < 0.0:
        hi *= 2.0
    return brentq(f, 0.0, hi, xtol=1e-14, rtol=8.9e-16, maxiter=500)


def required_rtsn(detector: DetectorConfig, p_dt: float) -> float:
    """Smallest RTSN whose detection probability reaches ``p_dt``.

    Pd is strictly increasing in the RTSN, so ``Pd(chi) >= p_dt`` holds
    exactly when ``chi`` is at least this value (up to root tolerance).
    """
    if not (0.0 < p_dt < 1.0):
        raise DomainError(f"p_dt must lie in (0, 1), got {p_dt!r}")
    return _required_rtsn_cached(detector.order, detector.threshold, float(p_dt))
