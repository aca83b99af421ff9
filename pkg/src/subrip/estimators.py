"""Closed-form estimates of projected affinity/distance and the deviation
and restricted-isometry probability bounds.

All bounds are the literal large-``n`` expressions.  A probability bound of
1 or more carries no information; it is reported (``vacuous``), never
clipped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MissingCosines


class BoundKind(str, enum.Enum):
    P1 = "P1"
    P2 = "P2"
    P3 = "P3"
    PAIR_RELAXED = "pair_relaxed"
    PAIR_TIGHT = "pair_tight"
    DISTANCE = "distance"
    RIP_PAIR = "rip_pair"
    RIP_SET = "rip_set"


@dataclass(frozen=True)
class PairParams:
    """Dimensions and original affinity of a subspace pair (``d1 <= d2 < n``).

    ``cosines`` (optional) are the principal-angle cosines; their squares
    must sum to ``aff_sq``.
    """

    d1: int
    d2: int
    n: int
    aff_sq: float
    cosines: tuple | None = None

    def __post_init__(self):
        if not (1 <= self.d1 <= self.d2 < self.n):
            raise DomainError(f"need 1 <= d1 <= d2 < n, got d1={self.d1}, d2={self.d2}, n={self.n}")
        if not (-1e-12 <= self.aff_sq <= self.d1 + 1e-12):
            raise DomainError(f"aff_sq={self.aff_sq} outside [0, {self.d1}]")
        if self.cosines is not None:
            c = tuple(float(x) for x in self.cosines)
            if len(c) != self.d1:
                raise DomainError(f"expected {self.d1} cosines, got {len(c)}")
            if any(x < 0.0 or x > 1.0 for x in c):
                raise DomainError("cosines must lie in [0, 1]")
            if abs(sum(x * x for x in c) - self.aff_sq) > 1e-10:
                raise DomainError("sum of squared cosines does not match aff_sq")
            object.__setattr__(self, "cosines", c)

    @classmethod
    def from_cosines(cls, cosines, d2, n):
        c = tuple(float(x) for x in cosines)
        return cls(len(c), int(d2), int(n), sum(x * x for x in c), c)

    @property
    def distance_sq(self) -> float:
        return (self.d1 + self.d2) / 2.0 - self.aff_sq


@dataclass(frozen=True)
class BoundReport:
    """A deviation event and the probability bound attached to it.

    For concentration kinds the event is ``|measured - estimate| >
    deviation_threshold``.  For the RIP kinds the event is a failure of the
    ``(1 +/- epsilon)`` sandwich, ``deviation_threshold`` is ``epsilon`` and
    ``probability_bound`` is the failure mass (``inf`` when the denominator
    is singular).
    """

    epsilon: float
    deviation_threshold: float
    probability_bound: float
    bound_kind: BoundKind

    @property
    def vacuous(self) -> bool:
        return not (self.probability_bound < 1.0)


def _positive(name, x):
    if not x > 0:
        raise DomainError(f"{name} must be positive, got {x}")


def _dims(d, n):
    if not (1 <= d < n):
        raise DomainError(f"need 1 <= d < n, got d={d}, n={n}")


def est_affinity_sq_line(lambda_sq, d, n) -> float:
    """Projected squared affinity of a line and a d-dim subspace:
    ``lambda_sq + (d/n)(1 - lambda_sq)``."""
    if not (0.0 <= lambda_sq <= 1.0):
        raise DomainError(f"lambda_sq={lambda_sq} outside [0, 1]")
    _dims(d, n)
    return lambda_sq + (d / n) * (1.0 - lambda_sq)


def est_affinity_sq(p: PairParams) -> float:
    """``aff_sq + (d2/n)(d1 - aff_sq)``."""
    return p.aff_sq + (p.d2 / p.n) * (p.d1 - p.aff_sq)


def est_distance_sq(D_sq, d1, d2, n) -> float:
    """``D_sq - (d2/n)(D_sq - (d2 - d1)/2)``."""
    if not (1 <= d1 <= d2 < n):
        raise DomainError(f"need 1 <= d1 <= d2 < n, got d1={d1}, d2={d2}, n={n}")
    lo, hi = (d2 - d1) / 2.0, (d1 + d2) / 2.0
    if not (lo - 1e-12 <= D_sq <= hi + 1e-12):
        raise DomainError(f"D_sq={D_sq} outside [{lo}, {hi}]")
    return D_sq - (d2 / n) * (D_sq - (d2 - d1) / 2.0)


def est_distance_sq_line(D_sq, d, n) -> float:
    _dims(d, n)
    return est_distance_sq(D_sq, 1, d, n)


def bound_p1(epsilon, n) -> float:
    """``4 / (eps^2 n)``: F(n, n) ratio deviating from 1 by more than eps."""
    _positive("epsilon", epsilon)
    _positive("n", n)
    return 4.0 / (epsilon ** 2 * n)


def bound_p2(epsilon, d, n) -> float:
    """``2d / (eps^2 n^2)``: squared norm of d coordinates of a random unit vector."""
    _positive("epsilon", epsilon)
    _positive("n", n)
    _positive("d", d)
    return 2.0 * d / (epsilon ** 2 * n ** 2)


def bound_p3(epsilon, n) -> float:
    """``exp(-eps^2 n / 2)``: |cos| of the angle between independent Gaussians."""
    _positive("epsilon", epsilon)
    _positive("n", n)
    return math.exp(-(epsilon ** 2) * n / 2.0)


def tight_threshold_factor(cosines) -> float:
    c2 = np.asarray(cosines, dtype=float) ** 2
    return float(np.sum(c2 * (1.0 - c2)))


def deviation_event(p: PairParams, epsilon, kind) -> BoundReport:
    """Deviation threshold and bound for the projected-affinity estimate.

    ``pair_relaxed``: threshold ``aff_sq * eps``; ``pair_tight``: threshold
    ``sum lambda_i^2 (1 - lambda_i^2) * eps``; ``distance``: threshold
    ``D_sq * eps`` on the squared-distance estimate.  All share the bound
    ``4 d1 / (eps^2 n)``.
    """
    kind = BoundKind(kind)
    _positive("epsilon", epsilon)
    if kind is BoundKind.PAIR_RELAXED:
        thr = p.aff_sq * epsilon
    elif kind is BoundKind.PAIR_TIGHT:
        if p.cosines is None:
            raise MissingCosines("pair_tight needs the principal-angle cosines")
        thr = tight_threshold_factor(p.cosines) * epsilon
    elif kind is BoundKind.DISTANCE:
        thr = p.distance_sq * epsilon
    else:
        raise DomainError(f"{kind.value} is not a concentration event")
    return BoundReport(float(epsilon), float(thr), 4.0 * p.d1 / (epsilon ** 2 * p.n), kind)


def rip_pair_failure(d1, d2, n, epsilon) -> float:
    """``4 d1 / ((eps - d2/n)^2 n)``, or ``inf`` when ``eps <= d2/n``."""
    _positive("epsilon", epsilon)
    gap = epsilon - d2 / n
    if gap <= 0.0:
        return math.inf
    return 4.0 * d1 / (gap * gap * n)


def rip_pair_bound(d1, d2, n, epsilon) -> float:
    """Lower bound ``1 - 4 d1 / ((eps - d2/n)^2 n)`` on the probability that
    ``(1 - eps) D_X^2 <= D_Y^2 <= (1 + eps) D_X^2``.

    Returns 0.0 when ``eps <= d2/n`` (singular).  The raw expression is
    returned otherwise, so a negative value means the bound is vacuous; see
    :func:`rip_pair_report` for the flagged form.
    """
    f = rip_pair_failure(d1, d2, n, epsilon)
    return 0.0 if math.isinf(f) else 1.0 - f


def rip_set_failure(d, L, n, epsilon) -> float:
    if L < 2:
        raise DomainError(f"need L >= 2, got {L}")
    f = rip_pair_failure(d, d, n, epsilon)
    return f if math.isinf(f) else (L * (L - 1) / 2.0) * f


def rip_set_bound(d, L, n, epsilon) -> float:
    """``1 - 2 d L (L-1) / ((eps - d/n)^2 n)`` (union bound over all pairs)."""
    f = rip_set_failure(d, L, n, epsilon)
    return 0.0 if math.isinf(f) else 1.0 - f


def rip_pair_report(d1, d2, n, epsilon) -> BoundReport:
    return BoundReport(float(epsilon), float(epsilon), rip_pair_failure(d1, d2, n, epsilon), BoundKind.RIP_PAIR)


def rip_set_report(d, L, n, epsilon) -> BoundReport:
    return BoundReport(float(epsilon), float(epsilon), rip_set_failure(d, L, n, epsilon), BoundKind.RIP_SET)
