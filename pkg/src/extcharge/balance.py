"""Balances between external, self- and reaction forces on a hyperbolic worldline.

All quantities refer to the reference event of the worldline, where the
charge is momentarily at rest and ``a = f``.  Field strengths are forces per
unit mass (accelerations); ``f`` is the effective one, ``f = F_e / m``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from scipy import constants as _si

from .numerics import DEFAULT_CONFIG, QuadratureConfig, solve_monotone
from .particle import ParticleModel, electrostatic_mass
from .selfforce import delta_fn, mu_r, mu_r_approx

__all__ = [
    "FieldStrengths",
    "MassChain",
    "balance_at",
    "balance_from_field",
    "delta_infinity_of_delta",
    "delta_of_delta_infinity",
    "f0_of_f",
    "effective_mass_ratio",
    "stability_check",
    "critical_field",
    "improved_accel",
    "reaction_force",
    "extended_hyperbolic_reaction",
    "RUNAWAY_F0_R0",
    "NEAR_POINT_CHARGE_MU1",
]

# With m1 = m0 the balance f0 = F_e/m0 saturates at 1.5 / r0.
RUNAWAY_F0_R0 = 1.5
# stable models with mu1 above this get a warning diagnostic
NEAR_POINT_CHARGE_MU1 = 0.999


@dataclass(frozen=True)
class FieldStrengths:
    """``f = F_e/m``, ``f0 = F_e/m0``, ``f_inf = F_e/m_inf``, ``f_s = F_s/m_inf``, ``f_r = F_r/m0``."""

    f: float
    f0: float
    f_inf: float
    f_s: float
    f_r: float

    def defects(self) -> tuple[float, float]:
        """Residuals of ``f = f_inf + f_s`` and ``f = f0 + f_r``."""
        return (self.f - self.f_inf - self.f_s, self.f - self.f0 - self.f_r)


@dataclass(frozen=True)
class MassChain:
    m_inf: float
    m1: float
    m0: float
    m: float
    m_s: float
    m_r: float

    def defects(self) -> tuple[float, float, float]:
        return (
            self.m0 - self.m_inf - self.m1,
            self.m - self.m_inf - self.m_s,
            self.m - self.m0 + self.m_r,
        )

    def ordered(self) -> bool:
        return self.m0 > self.m > self.m_inf


def delta_infinity_of_delta(delta: float, model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``delta_inf = delta + (m1/m_inf) Delta(delta)``."""
    return delta + model.m1 / model.m_inf * delta_fn(delta, cfg)


def delta_of_delta_infinity(
    delta_inf: float, model: ParticleModel, tol: float = 1e-12, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Invert :func:`delta_infinity_of_delta` on ``[0, delta_inf]`` (mirrored for negatives)."""
    if delta_inf == 0:
        return 0.0
    if delta_inf < 0:
        return -delta_of_delta_infinity(-delta_inf, model, tol, cfg)
    return solve_monotone(lambda d: delta_infinity_of_delta(d, model, cfg), delta_inf, 0.0, delta_inf, tol=tol)


def f0_of_f(f: float, model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``f0 = f (1 - mu1 mu_r(r1 f))``; note ``r1 = r0 / mu1``."""
    return f * (1.0 - model.mu1 * mu_r(model.r1 * f, cfg))


def effective_mass_ratio(delta0: float, mu1: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Relative effective mass ``m/m0 = 1 - mu1 mu_r(delta0/mu1)`` with ``delta0 = r0 f``."""
    if not 0 <= mu1 < 1:
        raise ValueError("mu1 must lie in [0, 1)")
    if mu1 == 0:
        return 1.0
    return 1.0 - mu1 * mu_r(delta0 / mu1, cfg)


def balance_at(f: float, model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[FieldStrengths, MassChain]:
    """Every force, field strength and mass for effective field strength ``f``.

    At ``f = 0`` the masses take their small-acceleration limits
    (``m = m0``, ``m_s = m1``, ``m_r = 0``).
    """
    m1, m_inf, r1 = model.m1, model.m_inf, model.r1
    big = delta_fn(r1 * f, cfg)
    F_s = -(m1 / r1) * big + 0.0  # no negative zero at f = 0
    F_e = m_inf * f - F_s
    F_r = model.m0 * f - F_e
    fields = FieldStrengths(f=f, f0=F_e / model.m0, f_inf=F_e / m_inf, f_s=F_s / m_inf, f_r=F_r / model.m0)
    if f == 0:
        m_s = m1
    else:
        m_s = -F_s / f
    masses = MassChain(m_inf=m_inf, m1=m1, m0=model.m0, m=m_inf + m_s, m_s=m_s, m_r=m1 - m_s)
    return fields, masses


def balance_from_field(f_inf: float, model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """:func:`balance_at` for a given asymptotic field strength ``f_inf = F_e / m_inf``."""
    delta = delta_of_delta_infinity(model.r1 * f_inf, model, cfg=cfg)
    return balance_at(delta / model.r1, model, cfg)


def stability_check(model) -> tuple[bool, str]:
    """Whether ``mu1 = r0/r1 < 1``, with a diagnostic.

    ``model`` may be a :class:`ParticleModel` or a mapping with keys
    ``q``, ``m_inf`` and ``r1``; the mapping form admits the excluded
    limits ``m_inf = 0`` and ``r1 = 0`` so they can be diagnosed.
    """
    if isinstance(model, ParticleModel):
        q, m_inf, r1 = model.q, model.m_inf, model.r1
    elif isinstance(model, Mapping):
        q, m_inf, r1 = float(model["q"]), float(model["m_inf"]), float(model["r1"])
    else:
        raise TypeError("expected a ParticleModel or a mapping with q, m_inf, r1")
    if r1 <= 0:
        return False, "r1 = 0: point charges are excluded (the electrostatic mass diverges)"
    m1 = electrostatic_mass(q, r1)
    m0 = m_inf + m1
    if m0 <= 0:
        return False, f"m0 = m_inf + m1 = {m0!r} is not positive"
    mu1 = m1 / m0
    if m_inf == 0:
        return False, (
            "mu1 = 1: the hypothesis m1 = m0 of Abraham and Lorentz (no bare mass) is excluded; "
            f"the balance would run away once f0 reaches {RUNAWAY_F0_R0}/r0"
        )
    if mu1 >= 1 or m_inf < 0:
        return False, f"mu1 = m1/m0 = {mu1!r} must be below 1 (r1 must exceed r0)"
    if mu1 >= NEAR_POINT_CHARGE_MU1:
        return True, (
            f"stable but close to the excluded limit: mu1 = {mu1!r}; r1 = {r1!r} approaches "
            "the point-charge limit r1 -> 0, where mu1 -> 1"
        )
    return True, f"stable: mu1 = r0/r1 = {mu1!r} < 1"


def critical_field(q_SI: float, m0_SI: float, ratio_target: float = 0.1) -> tuple[float, float]:
    """SI field strength and acceleration at which ``r1 a`` reaches ``ratio_target``.

    ``r1`` is half the reduced Compton wavelength, so ``r1 q E / (m0 c^2)
    = ratio_target`` gives ``E = 2 ratio_target m0^2 c^3 / (q hbar)`` and
    ``a = q E / m0``.  CODATA constants come from :mod:`scipy.constants`.

    Returns
    -------
    (E, a) : tuple of float
        In V/m and m/s^2.
    """
    if q_SI <= 0 or m0_SI <= 0 or ratio_target <= 0:
        raise ValueError("q_SI, m0_SI and ratio_target must be positive")
    c = _si.c
    E = 2.0 * ratio_target * m0_SI**2 * c**3 / (q_SI * _si.hbar)
    return E, q_SI * E / m0_SI


def improved_accel(f0: float, model: ParticleModel) -> float:
    """Acceleration ``f0 (1 + mu1 mu~_r(r1 f0))`` from the fitted reactive mass.

    The sign of ``f0`` carries through because ``mu~_r`` is even.  It is
    intended for ``r1 |f0| << 1``; larger values are evaluated but not
    trustworthy.
    """
    return f0 * (1.0 + model.mu1 * float(mu_r_approx(model.r1 * f0)))


def reaction_force(a: float, F_e: float, model: ParticleModel) -> float:
    """``F_r = m0 a - F_e``."""
    return model.m0 * a - F_e


def extended_hyperbolic_reaction(f: float, model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Reaction force on the hyperbolic worldline, ``m1 f mu_r(r1 f)``."""
    return model.m1 * f * mu_r(model.r1 * f, cfg)
