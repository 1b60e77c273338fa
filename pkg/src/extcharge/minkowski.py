"""Minkowski vectors with metric diag(1, -1, -1, -1) and 1+1 boosts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FourVector",
    "TwoVector",
    "BoostDyadic",
    "dot4",
    "dot2",
    "boost_exp",
    "functional_determinant",
    "rigidity_valid",
    "DEFAULT_RIGIDITY_THRESHOLD",
]

DEFAULT_RIGIDITY_THRESHOLD = 0.1


@dataclass(frozen=True)
class FourVector:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def dot(self, other: "FourVector") -> float:
        return dot4(self, other)

    def __add__(self, other):
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return FourVector(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, s):
        return FourVector(s * self.t, s * self.x, s * self.y, s * self.z)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None):
        return np.array([self.t, self.x, self.y, self.z], dtype=dtype)


@dataclass(frozen=True)
class TwoVector:
    """Contravariant (t, x) components for rectilinear problems."""

    t: float
    x: float = 0.0

    def dot(self, other: "TwoVector") -> float:
        return dot2(self, other)

    def __add__(self, other):
        return TwoVector(self.t + other.t, self.x + other.x)

    def __sub__(self, other):
        return TwoVector(self.t - other.t, self.x - other.x)

    def __mul__(self, s):
        return TwoVector(s * self.t, s * self.x)

    __rmul__ = __mul__

    def __iter__(self):
        return iter((self.t, self.x))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.t, self.x], dtype=dtype)


def dot4(a: FourVector, b: FourVector) -> float:
    return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z


def dot2(a: TwoVector, b: TwoVector) -> float:
    return a.t * b.t - a.x * b.x


@dataclass(frozen=True)
class BoostDyadic:
    """A 2x2 map on the t-x plane, applied from the right: ``v . L``.

    ``matrix[i, j]`` is the j component of the image of ``e_i``.
    """

    matrix: np.ndarray

    def apply(self, v: TwoVector) -> TwoVector:
        t, x = np.array([v.t, v.x]) @ self.matrix
        return TwoVector(float(t), float(x))

    def compose(self, other: "BoostDyadic") -> "BoostDyadic":
        """``self`` followed by ``other``."""
        return BoostDyadic(self.matrix @ other.matrix)

    def __matmul__(self, other):
        return self.compose(other)

    @classmethod
    def identity(cls) -> "BoostDyadic":
        return cls(np.eye(2))


def boost_exp(f: float, tau: float) -> BoostDyadic:
    """``exp(tau * f * d)`` with ``d = e0 e1 - e1 e0``.

    Odd powers of ``d`` reduce to ``d`` and even ones to the unit dyadic,
    so the series sums to ``cosh(f tau) 1 + sinh(f tau) d``.
    """
    c = np.cosh(f * tau)
    s = np.sinh(f * tau)
    return BoostDyadic(np.array([[c, s], [s, c]]))


def functional_determinant(r_dot_a: float) -> float:
    """``D = 1 - r.a`` for the rest-frame spatial product ``r.a``."""
    return 1.0 - r_dot_a


def rigidity_valid(mean_radius: float, accel_mag: float, threshold: float = DEFAULT_RIGIDITY_THRESHOLD) -> bool:
    """True when ``<r> |a|`` is below ``threshold``, i.e. ``D ~ 1`` is trusted."""
    if mean_radius < 0 or accel_mag < 0:
        raise ValueError("mean_radius and accel_mag must be non-negative")
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    return mean_radius * accel_mag < threshold
