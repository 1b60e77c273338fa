"""Nonrelativistic plane motion in a homogeneous magnetic field.

Positions and velocities in the plane are complex numbers ``z = x + iy``.
With the exponential memory kernel the equation of motion admits the
spiral ``u = u0 exp(i omega tau)`` with a complex angular frequency
``omega = omega0 Omega``, ``omega0 = qB/m0``, where ``Omega`` solves

    (1 - mu1) Omega^2 - (1 + i mu1/b) Omega + i mu1/b = 0,   b = r0 omega0.

The integro-differential equation itself is also solved directly by
adding the kernel integral as an extra state variable.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numerics import ode_rk4
from .particle import ParticleModel

__all__ = [
    "ComplexMotionState",
    "ComplexFrequency",
    "ComplexMasses",
    "MemoryKernel",
    "MemoryTrajectory",
    "OutOfValidityError",
    "ValidityWarning",
    "omega_residual",
    "omega_roots",
    "omega_closed_form",
    "omega_physical",
    "omega_from_characteristic",
    "spiral",
    "spiral_center",
    "complex_masses",
    "total_energy",
    "steady_memory_state",
    "magnetic_force",
    "switched",
    "memory_ode_solve",
    "frequency_surface",
    "TRAJECTORY_COLUMNS",
    "SURFACE_COLUMNS",
]

TRAJECTORY_COLUMNS = ("tau", "x", "y", "ux", "uy", "W0")
SURFACE_COLUMNS = ("mu1", "b", "Omega_r", "Omega_i")
CLOSED_FORM_MU1_LIMIT = 0.5


class OutOfValidityError(ValueError):
    """Parameters lie outside the domain of a closed-form result."""


class ValidityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ComplexMotionState:
    tau: float
    z: complex
    u: complex


@dataclass(frozen=True)
class ComplexFrequency:
    """``Omega = omega / omega0`` together with the parameters it came from."""

    Omega: complex
    omega: complex
    omega0: float
    b: float
    mu1: float

    @classmethod
    def from_Omega(cls, Omega: complex, mu1: float, b: float, r0: float = 1.0) -> "ComplexFrequency":
        omega0 = b / r0
        return cls(Omega=complex(Omega), omega=complex(Omega) * omega0, omega0=omega0, b=b, mu1=mu1)

    @property
    def residual(self) -> complex:
        if self.b == 0:
            return 0j
        return omega_residual(self.Omega, self.mu1, self.b)


@dataclass(frozen=True)
class ComplexMasses:
    m: complex
    m_s: complex
    m_r: complex


def omega_residual(Omega: complex, mu1: float, b: float) -> complex:
    """Left-hand side of the frequency quadratic at ``Omega``."""
    if b == 0:
        raise ValueError("b must be non-zero")
    k = 1j * mu1 / b
    return (1 - mu1) * Omega * Omega - (1 + k) * Omega + k


def omega_roots(mu1: float, b: float) -> tuple[complex, complex]:
    """Both roots of the frequency quadratic, via the stable quadratic formula."""
    if b == 0:
        raise ValueError("b must be non-zero")
    a2 = 1 - mu1
    a1 = -(1 + 1j * mu1 / b)
    a0 = 1j * mu1 / b
    disc = cmath.sqrt(a1 * a1 - 4 * a2 * a0)
    if (a1.conjugate() * disc).real > 0:
        disc = -disc
    big = (-a1 + disc) / (2 * a2)
    small = a0 / (a2 * big)
    return big, small


def omega_closed_form(mu1: float, b: float, r0: float = 1.0) -> ComplexFrequency:
    """Physical ``Omega(mu1, b)`` from the explicit root formula.

    Valid for ``0 <= mu1 < 0.5``; this is the root that tends to 1 as
    ``mu1 -> 0``.  ``b = 0`` means no field: ``omega = 0`` and the
    limiting value ``Omega = 1`` is returned.
    """
    if not 0 <= mu1 < CLOSED_FORM_MU1_LIMIT:
        raise OutOfValidityError(f"closed form requires 0 <= mu1 < 0.5, got {mu1!r}")
    if b == 0:
        return ComplexFrequency(Omega=1 + 0j, omega=0j, omega0=0.0, b=0.0, mu1=mu1)
    alpha = mu1 * mu1 / (b * b) - 1.0
    beta = 2.0 * mu1 - 1.0
    w = math.sqrt(alpha * alpha + 4.0 * mu1 * mu1 * beta * beta / (b * b))
    # w - alpha cancels when alpha >> 1 (small b); use (w^2 - alpha^2)/(w + alpha)
    if alpha > 0:
        w_minus = (4.0 * mu1 * mu1 * beta * beta / (b * b)) / (w + alpha)
        w_plus = w + alpha
    else:
        w_plus = (4.0 * mu1 * mu1 * beta * beta / (b * b)) / (w - alpha) if w - alpha > 0 else 0.0
        w_minus = w - alpha
    real = 1.0 + math.sqrt(w_minus / 2.0)
    imag = mu1 / b - math.copysign(1.0, b) * math.sqrt(w_plus / 2.0)
    Omega = complex(real, imag) / (2.0 * (1.0 - mu1))
    return ComplexFrequency.from_Omega(Omega, mu1, b, r0)


def omega_physical(mu1: float, b: float, r0: float = 1.0, steps: int = 200) -> ComplexFrequency:
    """Physical root for any ``0 <= mu1 < 1``.

    Below ``mu1 = 0.5`` this is the closed form.  Above it the quadratic is
    solved directly and the root is followed by continuation in ``mu1``
    from the closed-form value at 0.45, taking at each step the root
    nearest the previous one; a :class:`ValidityWarning` is issued.
    """
    if not 0 <= mu1 < 1:
        raise ValueError("mu1 must lie in [0, 1)")
    if b == 0:
        return ComplexFrequency(Omega=1 + 0j, omega=0j, omega0=0.0, b=0.0, mu1=mu1)
    if mu1 < CLOSED_FORM_MU1_LIMIT:
        return omega_closed_form(mu1, b, r0)
    warnings.warn(
        f"mu1 = {mu1} is outside the closed-form domain; root obtained by continuation",
        ValidityWarning,
        stacklevel=2,
    )
    start = 0.45
    current = omega_closed_form(start, b).Omega
    for m in np.linspace(start, mu1, steps + 1)[1:]:
        current = min(omega_roots(float(m), b), key=lambda r: abs(r - current))
    return ComplexFrequency.from_Omega(current, mu1, b, r0)


def omega_from_characteristic(mu1: float, b: float, model: ParticleModel) -> ComplexFrequency:
    """Physical frequency from the local differential form of the equation of motion.

    Inserting ``u = exp(i omega tau)`` into
    ``m0 u' - i qB u = -r1 d/dtau (m_inf u' - i qB u)`` gives
    ``r1 m_inf omega^2 - (r1 qB + i m0) omega + i qB = 0``.  Of its two
    roots the one with the smaller ``|Im omega|`` is the slowly decaying,
    physical mode (checked for ``mu1 < 0.5``).  ``qB = m0 omega0`` with
    ``omega0 = b / r0`` taken from ``model``.
    """
    if abs(model.mu1 - mu1) > 1e-12 * max(1.0, mu1):
        raise ValueError(f"mu1={mu1!r} does not match the model's mu1={model.mu1!r}")
    if b == 0:
        return ComplexFrequency(Omega=1 + 0j, omega=0j, omega0=0.0, b=0.0, mu1=mu1)
    omega0 = b / model.r0
    qB = model.m0 * omega0
    a2 = model.r1 * model.m_inf
    a1 = -(model.r1 * qB + 1j * model.m0)
    a0 = 1j * qB
    disc = cmath.sqrt(a1 * a1 - 4 * a2 * a0)
    if (a1.conjugate() * disc).real > 0:
        disc = -disc
    big = (-a1 + disc) / (2 * a2)
    small = a0 / (a2 * big)
    omega = min((big, small), key=lambda w: abs(w.imag))
    return ComplexFrequency(Omega=omega / omega0, omega=omega, omega0=omega0, b=b, mu1=mu1)


def spiral(tau, u0: complex, omega: complex):
    """Position ``(u0 / (i omega)) (exp(i omega tau) - 1)``; ``u0 tau`` when ``omega = 0``."""
    tau = np.asarray(tau, dtype=float)
    if omega == 0:
        out = u0 * tau + 0j
    else:
        out = u0 / (1j * omega) * np.expm1(1j * omega * tau)
    return out[()] if out.ndim == 0 else out


def spiral_center(u0: complex, omega: complex) -> complex:
    """Asymptotic point ``i u0 / omega`` of an inward spiral."""
    return 1j * u0 / omega


def complex_masses(freq, model: ParticleModel, qB: float | None = None) -> ComplexMasses:
    """Effective, electrodynamic and reactive complex masses.

    ``m = qB/omega``, ``m_s = m1/(1 + i r1 omega)`` and
    ``m_r = i r1 omega m1/(1 + i r1 omega)``.  ``freq`` is a
    :class:`ComplexFrequency` (then ``qB = m0 omega0``) or a complex
    ``omega`` together with ``qB``.
    """
    if isinstance(freq, ComplexFrequency):
        omega = freq.omega
        qB = model.m0 * freq.omega0 if qB is None else qB
    else:
        omega = complex(freq)
        if qB is None:
            raise ValueError("qB is required when omega is given as a number")
    pole = 1 + 1j * model.r1 * omega
    if abs(pole) < 1e-300:
        raise ZeroDivisionError("omega = i/r1 is a pole of the electrodynamic mass")
    m_s = model.m1 / pole
    m_r = 1j * model.r1 * omega * model.m1 / pole
    m = model.m0 if omega == 0 else qB / omega
    return ComplexMasses(m=complex(m), m_s=complex(m_s), m_r=complex(m_r))


def total_energy(tau, u0: float, model: ParticleModel, freq: ComplexFrequency):
    """``W0 = m0 sqrt(1 + |u|^2)`` with ``|u| = u0 exp(-omega_i tau)``."""
    speed = abs(u0) * np.exp(-freq.omega.imag * np.asarray(tau, dtype=float))
    return model.m0 * np.sqrt(1.0 + speed * speed)


# ---------------------------------------------------------------------------
# memory-kernel solver


@dataclass(frozen=True)
class MemoryKernel:
    """Masses and decay length of the exponential memory kernel.

    Unlike :class:`ParticleModel` this allows ``m1 = 0`` (no self-force).
    """

    m_inf: float
    m1: float
    r1: float

    def __post_init__(self):
        if self.m_inf <= 0 or self.m1 < 0 or self.r1 <= 0:
            raise ValueError("need m_inf > 0, m1 >= 0 and r1 > 0")

    @classmethod
    def from_model(cls, model: ParticleModel) -> "MemoryKernel":
        return cls(m_inf=model.m_inf, m1=model.m1, r1=model.r1)

    @property
    def m0(self) -> float:
        return self.m_inf + self.m1


@dataclass(frozen=True)
class MemoryTrajectory:
    taus: np.ndarray
    u: np.ndarray
    S: np.ndarray
    z: np.ndarray
    accel: np.ndarray

    def states(self) -> list[ComplexMotionState]:
        return [ComplexMotionState(float(t), complex(z), complex(u)) for t, z, u in zip(self.taus, self.z, self.u)]


def steady_memory_state(u0: complex, omega: complex, r1: float) -> complex:
    """Kernel integral ``S(0)`` for the pre-history ``u0 exp(i omega tau)``, ``tau <= 0``."""
    return 1j * omega * u0 * r1 / (1 + 1j * r1 * omega)


def magnetic_force(qB: float) -> Callable[[float, complex], complex]:
    """Complex Lorentz force ``i qB u``."""
    return lambda tau, u: 1j * qB * u


def switched(force: Callable, on: float = -math.inf, off: float = math.inf) -> Callable:
    """``force`` active for ``on <= tau < off`` and zero otherwise."""
    return lambda tau, u: force(tau, u) if on <= tau < off else 0j


def memory_ode_solve(
    F_e: Callable[[float, complex], complex],
    model,
    u_init: complex,
    tau_span: tuple[float, float],
    steps: int,
    S_init: complex = 0j,
    z_init: complex = 0j,
) -> MemoryTrajectory:
    """Integrate ``m_inf u' = F_e(tau, u) - (m1/r1) S`` with the kernel state ``S``.

    ``S(tau) = int_{-inf}^tau u'(s) exp(-(tau - s)/r1) ds`` obeys
    ``S' = u' - S/r1``, which turns the integro-differential equation into
    three complex ODEs for ``(u, S, z)``, integrated with classical RK4.
    ``S_init`` encodes the pre-history: 0 for a past of uniform motion,
    :func:`steady_memory_state` for a past already on the spiral.
    ``model`` is a :class:`ParticleModel` or a :class:`MemoryKernel`.
    """
    kernel = model if isinstance(model, MemoryKernel) else MemoryKernel.from_model(model)
    m_inf, m1, r1 = kernel.m_inf, kernel.m1, kernel.r1

    def accel(tau, u, S):
        return (F_e(tau, u) - (m1 / r1) * S) / m_inf

    def deriv(tau, y):
        u = complex(y[0], y[1])
        S = complex(y[2], y[3])
        du = accel(tau, u, S)
        dS = du - S / r1
        return np.array([du.real, du.imag, dS.real, dS.imag, u.real, u.imag])

    u_init, S_init, z_init = complex(u_init), complex(S_init), complex(z_init)
    y0 = [u_init.real, u_init.imag, S_init.real, S_init.imag, z_init.real, z_init.imag]
    taus, states = ode_rk4(deriv, y0, tau_span[0], tau_span[1], steps)
    u = states[:, 0] + 1j * states[:, 1]
    S = states[:, 2] + 1j * states[:, 3]
    z = states[:, 4] + 1j * states[:, 5]
    a = np.array([accel(t, ui, si) for t, ui, si in zip(taus, u, S)])
    return MemoryTrajectory(taus=taus, u=u, S=S, z=z, accel=a)


def frequency_surface(mu1_values, b_values):
    """Rows ``(mu1, b, Omega_r, Omega_i)`` of the physical root over a grid."""
    rows = []
    for mu1 in mu1_values:
        for b in b_values:
            Om = omega_physical(float(mu1), float(b)).Omega
            rows.append((float(mu1), float(b), Om.real, Om.imag))
    return rows
