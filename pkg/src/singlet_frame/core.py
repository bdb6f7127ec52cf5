"""Closed-form singlet correlations, mutual information, and sphere geometry.

Two parties measure spin along unit vectors ``x`` and ``y``; each obtains
an outcome in {-1, +1}.  For a shared singlet pair the joint outcome
probability is

    p(a, b) = (1 - a*b*cos(angle(x, y))) / 4

so every quantity here depends on the settings only through the cosine of
the relative angle.  All information values are in bits (base-2 logs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "DistributionError",
    "Direction",
    "JointDistribution2x2",
    "direction_from_polar",
    "cos_angle",
    "joint_outcome_probability",
    "singlet_joint_distribution",
    "mutual_information_from_joint",
    "analytic_mutual_information",
]

LN2 = math.log(2.0)

# slack accepted on |cos| before an argument is rejected outright
COS_DOMAIN_TOL = 1e-12

# tolerance for "is a probability distribution" checks
DISTRIBUTION_TOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside its mathematical domain."""


class DistributionError(ValueError):
    """A 2x2 joint table is not a valid probability distribution."""


def _checked_cos(value: float) -> float:
    """Validate a cosine argument and clamp float drift into [-1, 1]."""
    c = float(value)
    if not math.isfinite(c) or abs(c) > 1.0 + COS_DOMAIN_TOL:
        raise DomainError(f"cosine of an angle must lie in [-1, 1], got {value!r}")
    return min(1.0, max(-1.0, c))


def _checked_outcome(value: int, name: str) -> int:
    if value not in (-1, 1):
        raise DomainError(f"{name} must be -1 or +1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Direction:
    """Unit vector on the sphere.  Construction rescales to unit length."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if not math.isfinite(n) or n == 0.0:
            raise DomainError(f"direction must be a nonzero finite vector, got {(self.x, self.y, self.z)}")
        # leave already-unit components untouched so that negating a
        # Direction is exact (the invariant tolerance is 1e-12 anyway)
        if abs(n - 1.0) > 1e-12:
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @staticmethod
    def from_array(v) -> "Direction":
        vx, vy, vz = (float(t) for t in v)
        return Direction(vx, vy, vz)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "Direction") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> "Direction":
        return Direction(-self.x, -self.y, -self.z)


def direction_from_polar(theta: float, phi: float) -> Direction:
    """Unit vector (sin t cos p, sin t sin p, cos t) from polar angles in radians."""
    st = math.sin(theta)
    return Direction(st * math.cos(phi), st * math.sin(phi), math.cos(theta))


def cos_angle(u: Direction, v: Direction) -> float:
    """Cosine of the angle between two unit vectors, clamped to [-1, 1]."""
    return min(1.0, max(-1.0, u.dot(v)))


@dataclass(frozen=True)
class JointDistribution2x2:
    """Joint distribution of a pair of {-1,+1} outcomes.

    Field suffixes give the (a, b) signs: ``p_pm`` is p(a=+1, b=-1).
    """

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        entries = (self.p_pp, self.p_pm, self.p_mp, self.p_mm)
        if any(not math.isfinite(p) for p in entries):
            raise DistributionError(f"non-finite probability in {entries}")
        if any(p < 0.0 for p in entries):
            raise DistributionError(f"negative probability in {entries}")
        total = self.p_pp + self.p_pm + self.p_mp + self.p_mm
        if abs(total - 1.0) > DISTRIBUTION_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, expected 1")

    def prob(self, a: int, b: int) -> float:
        key = (_checked_outcome(a, "a"), _checked_outcome(b, "b"))
        return {
            (1, 1): self.p_pp,
            (1, -1): self.p_pm,
            (-1, 1): self.p_mp,
            (-1, -1): self.p_mm,
        }[key]

    def marginal_a(self) -> tuple[float, float]:
        """(p(a=+1), p(a=-1)) from row sums."""
        return (self.p_pp + self.p_pm, self.p_mp + self.p_mm)

    def marginal_b(self) -> tuple[float, float]:
        """(p(b=+1), p(b=-1)) from column sums."""
        return (self.p_pp + self.p_mp, self.p_pm + self.p_mm)

    def as_matrix(self) -> np.ndarray:
        """2x2 array with index 0 for outcome +1 and index 1 for outcome -1."""
        return np.array([[self.p_pp, self.p_pm], [self.p_mp, self.p_mm]])


def joint_outcome_probability(a: int, b: int, cos_theta: float) -> float:
    """p(a, b) = (1 - a*b*cos_theta) / 4 for one outcome pair.

    ``cos_theta`` is the cosine of the angle between the two measurement
    directions.  The result lies in [0, 1/2].
    """
    av = _checked_outcome(a, "a")
    bv = _checked_outcome(b, "b")
    c = _checked_cos(cos_theta)
    return (1.0 - av * bv * c) / 4.0


def singlet_joint_distribution(cos_theta: float) -> JointDistribution2x2:
    """The four joint outcome probabilities at a given relative-angle cosine."""
    c = _checked_cos(cos_theta)
    anti = (1.0 + c) / 4.0
    same = (1.0 - c) / 4.0
    return JointDistribution2x2(p_pp=same, p_pm=anti, p_mp=anti, p_mm=same)


def mutual_information_from_joint(joint: JointDistribution2x2) -> float:
    """Shannon mutual information (bits) of a 2x2 joint distribution.

    Marginals are taken from row/column sums; cells with p = 0 contribute
    nothing (continuity convention).
    """
    pa_plus, pa_minus = joint.marginal_a()
    pb_plus, pb_minus = joint.marginal_b()
    cells = (
        (joint.p_pp, pa_plus, pb_plus),
        (joint.p_pm, pa_plus, pb_minus),
        (joint.p_mp, pa_minus, pb_plus),
        (joint.p_mm, pa_minus, pb_minus),
    )
    total = 0.0
    for pab, pa, pb in cells:
        if pab > 0.0:
            total += pab * math.log2(pab / (pa * pb))
    return min(1.0, max(0.0, total))


def analytic_mutual_information(cos_theta):
    """Mutual information (bits) between singlet outcomes, in closed form.

    Equals ((1-c)*ln(1-c) + (1+c)*ln(1+c)) / (2 ln 2) with c = cos_theta,
    which is even in c, zero at c = 0 and 1 at c = +/-1 (the limit value is
    returned exactly at the endpoints).  Accepts a scalar or an array.
    """
    arr = np.asarray(cos_theta, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > 1.0 + COS_DOMAIN_TOL):
        raise DomainError("cosine of an angle must lie in [-1, 1]")
    c = np.atleast_1d(np.clip(arr, -1.0, 1.0))
    out = np.ones(c.shape)
    interior = np.abs(c) < 1.0
    ci = c[interior]
    out[interior] = ((1.0 - ci) * np.log1p(-ci) + (1.0 + ci) * np.log1p(ci)) / (2.0 * LN2)
    if np.ndim(cos_theta) == 0:
        return float(out[0])
    return out.reshape(arr.shape)
