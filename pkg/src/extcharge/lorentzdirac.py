"""Point-charge (Lorentz-Dirac) self-force, kept only as a comparison baseline.

Nothing here integrates an equation of motion.  The functions evaluate the
point-charge force at a given state and contrast it with the saturating
self-force of the extended charge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import DEFAULT_CONFIG, QuadratureConfig
from .particle import ParticleModel
from .selfforce import delta_fn

__all__ = [
    "LDState",
    "ld_selfforce",
    "ld_hyperbolic_reaction",
    "compare_selfforce",
    "COMPARISON_COLUMNS",
    "LD_MASS_FACTOR",
]

LD_MASS_FACTOR = 4.0 / 3.0
COMPARISON_COLUMNS = ("delta", "Fs_extended", "Fs_LD_linear", "ratio")


def _minkowski_dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[0] - np.dot(a[1:], b[1:]))


@dataclass(frozen=True)
class LDState:
    """Velocity, acceleration and jerk at one instant.

    Real arrays of length 2 or 4 are Minkowski vectors with signature
    ``(+, -, ...)``.  Complex scalars are plane vectors ``x + iy`` of the
    nonrelativistic magnetic problem.
    """

    u: object
    a: object
    a_dot: object

    @property
    def is_planar(self) -> bool:
        return np.iscomplexobj(self.u) or np.iscomplexobj(self.a) or np.iscomplexobj(self.a_dot)

    def orthogonality(self) -> float:
        """``u . a``, zero on a consistent relativistic worldline."""
        if self.is_planar:
            raise TypeError("orthogonality is defined for Minkowski vectors only")
        return _minkowski_dot(np.asarray(self.u, float), np.asarray(self.a, float))


def ld_selfforce(state: LDState, model: ParticleModel):
    """``-(4/3) m1 a + (q^2/6 pi) (1 - u u) . a_dot``.

    The projection removes the part of the jerk along ``u``; in the planar
    nonrelativistic form it is the identity.
    """
    schott = model.q**2 / (6.0 * math.pi)
    if state.is_planar:
        a, jerk = complex(state.a), complex(state.a_dot)
        return -LD_MASS_FACTOR * model.m1 * a + schott * jerk
    u = np.asarray(state.u, dtype=float)
    a = np.asarray(state.a, dtype=float)
    jerk = np.asarray(state.a_dot, dtype=float)
    projected = jerk - u * _minkowski_dot(u, jerk)
    return -LD_MASS_FACTOR * model.m1 * a + schott * projected


def ld_hyperbolic_reaction(f: float, model: ParticleModel, tau: float = 0.0) -> float:
    """Point-charge reaction force on the hyperbolic worldline.

    The reaction force is what remains of :func:`ld_selfforce` once its
    mass term ``-(4/3) m1 a`` has been absorbed in the observable inertia.
    On the hyperbola the jerk ``f^2 u`` lies along the velocity, so the
    projected jerk and with it the returned space component vanish for
    every ``f``, up to round-off.  Compare
    :func:`extcharge.balance.extended_hyperbolic_reaction`, which does not.
    """
    ft = f * tau
    u = np.array([math.cosh(ft), math.sinh(ft)])
    a = f * np.array([math.sinh(ft), math.cosh(ft)])
    state = LDState(u=u, a=a, a_dot=f * f * u)
    reaction = ld_selfforce(state, model) + LD_MASS_FACTOR * model.m1 * a
    # space component in the instantaneous rest frame
    return float(reaction[1] * u[0] - reaction[0] * u[1])


def compare_selfforce(
    delta_grid: Sequence[float], model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> list[tuple[float, float, float, float]]:
    """Extended versus linear point-charge self-force on hyperbolic motion.

    Rows ``(delta, F_ext, F_LD, ratio)`` with ``F_ext = -(m1/r1) Delta(delta)``,
    ``F_LD = -(4/3)(m1/r1) delta`` and ``ratio = F_ext / F_LD``.  At
    ``delta = 0`` the ratio is its limit 3/4.
    """
    scale = model.m1 / model.r1
    rows = []
    for d in delta_grid:
        d = float(d)
        if d < 0:
            raise ValueError("delta values must be non-negative")
        extended = -scale * delta_fn(d, cfg) + 0.0  # no negative zero at delta = 0
        linear = -LD_MASS_FACTOR * scale * d + 0.0
        ratio = 1.0 / LD_MASS_FACTOR if d == 0 else extended / linear
        rows.append((d, extended, linear, ratio))
    return rows
