"""The extended charge: structure function, density, radii and masses.

Natural units throughout (c = eps0 = mu0 = 1).  Only the structure function
``(1 + r1**2 kappa**2)**-1/2`` has closed forms here; any other evaluator can
be wrapped in :class:`StructureFunction` and gets its electrostatic mass and
memory function by quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from scipy import integrate as _sp_integrate

from .config import format_key_value, parse_key_value
from .numerics import DEFAULT_CONFIG, QuadratureConfig, integrate_semi_infinite, simpson

__all__ = [
    "ParticleModel",
    "StructureFunction",
    "structure_function",
    "bessel_k1",
    "density",
    "mean_radius",
    "mean_radius_quadrature",
    "density_normalization",
    "structure_from_density",
    "electrostatic_mass",
    "electrostatic_mass_quadrature",
    "compton_quasi_radius",
    "memory_function",
    "memory_function_quadrature",
]

_EULER_GAMMA = 0.57721566490153286061
_K1_CROSSOVER = 2.0


@dataclass(frozen=True)
class ParticleModel:
    """Charge ``q``, bare mass ``m_inf`` and quasi-radius ``r1``.

    Every other mass and radius is derived and never stored.  Construction
    requires ``m_inf > 0`` and ``r1 > 0``, which is exactly the condition
    ``mu1 = m1/m0 < 1``.
    """

    q: float
    m_inf: float
    r1: float

    def __post_init__(self):
        for name in ("q", "m_inf", "r1"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.q == 0:
            raise ValueError("q must be non-zero")
        if self.r1 <= 0:
            raise ValueError("r1 must be positive: point charges (r1 = 0) are excluded")
        if self.m_inf <= 0:
            raise ValueError("m_inf must be positive: m1 = m0 (mu1 = 1) is excluded")

    @property
    def m1(self) -> float:
        return electrostatic_mass(self.q, self.r1)

    @property
    def m0(self) -> float:
        return self.m_inf + self.m1

    @property
    def mu1(self) -> float:
        return self.m1 / self.m0

    @property
    def r0(self) -> float:
        return self.q**2 / (8 * math.pi * self.m0)

    @property
    def r_inf(self) -> float:
        return self.q**2 / (8 * math.pi * self.m_inf)

    @property
    def mean_r(self) -> float:
        return mean_radius(self.r1)

    @property
    def structure(self) -> "StructureFunction":
        return StructureFunction.rho1(self.r1)

    @classmethod
    def from_compton(cls, q: float, m0: float, hbar: float = 1.0) -> "ParticleModel":
        """Model whose quasi-radius is half the reduced Compton wavelength of ``m0``."""
        r1 = compton_quasi_radius(m0, hbar)
        if r1 <= 0:
            raise ValueError("hbar = 0 gives r1 = 0, which is excluded")
        return cls(q=q, m_inf=m0 - electrostatic_mass(q, r1), r1=r1)

    @classmethod
    def from_mu1(cls, mu1: float, q: float = 1.0, r1: float = 1.0) -> "ParticleModel":
        """Model with a prescribed ratio ``m1/m0``."""
        if not 0 <= mu1 < 1:
            raise ValueError("mu1 must lie in [0, 1)")
        m1 = electrostatic_mass(q, r1)
        if mu1 == 0:
            raise ValueError("mu1 = 0 needs m_inf = inf")
        return cls(q=q, m_inf=m1 * (1 - mu1) / mu1, r1=r1)

    def to_config(self) -> dict[str, float]:
        return {"q": self.q, "m_inf": self.m_inf, "r1": self.r1}

    @classmethod
    def from_config(cls, values: Mapping) -> "ParticleModel":
        missing = {"q", "m_inf", "r1"} - set(values)
        if missing:
            raise KeyError(f"missing model keys: {sorted(missing)}")
        return cls(q=float(values["q"]), m_inf=float(values["m_inf"]), r1=float(values["r1"]))

    def dumps(self) -> str:
        return format_key_value(self.to_config())

    @classmethod
    def loads(cls, text: str) -> "ParticleModel":
        return cls.from_config(parse_key_value(text))


@dataclass(frozen=True)
class StructureFunction:
    """Even, normalised structure function ``rho~(kappa)``.

    ``r1`` is set for the built-in family and gives a length scale for the
    quadratures; user evaluators should pass a representative scale too.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    family: str = "custom"
    r1: float = 1.0

    @classmethod
    def rho1(cls, r1: float) -> "StructureFunction":
        if r1 <= 0:
            raise ValueError("r1 must be positive")
        return cls(lambda k: structure_function(k, r1), family="rho1", r1=r1)

    def __call__(self, kappa):
        return self.evaluator(kappa)


def structure_function(kappa, r1: float):
    """``(1 + r1**2 kappa**2)**-1/2``."""
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    kappa = np.asarray(kappa, dtype=float)
    return 1.0 / np.sqrt(1.0 + (r1 * kappa) ** 2)


def _k1_series(x):
    # A&S 9.6.11 with n = 1
    x = np.asarray(x, dtype=float)
    y = 0.25 * x * x
    term = np.ones_like(x)  # (x^2/4)^k / (k! (k+1)!)
    psi_sum = -2 * _EULER_GAMMA + 1.0  # psi(1) + psi(2)
    i1 = np.zeros_like(x)
    tail = np.zeros_like(x)
    for k in range(60):
        i1 += term
        tail += psi_sum * term
        term = term * y / ((k + 1) * (k + 2))
        psi_sum += 1.0 / (k + 1) + 1.0 / (k + 2)
    i1 *= 0.5 * x
    return 1.0 / x + np.log(0.5 * x) * i1 - 0.25 * x * tail


def _k1_continued_fraction(x):
    # Steed's algorithm for K_nu, nu = 0 (Temme 1975; Numerical Recipes bessik)
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("the continued fraction is used for x >= 1 only")
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, 20000):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < 1e-17 * np.abs(s)):
            break
    h = a1 * h
    k0 = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) / s
    return k0 * (x + 0.5 - h) / x


def _k1_integral(x: float, cfg: QuadratureConfig) -> float:
    return integrate_semi_infinite(lambda z: np.cosh(z) * np.exp(-x * np.cosh(z)), cfg)


def bessel_k1(x, method: str = "auto", cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Modified Bessel function of the second kind, order one.

    ``method`` selects the ascending series, Steed's continued fraction, or
    direct quadrature of ``int_0^inf cosh z exp(-x cosh z) dz``.  ``"auto"``
    uses the series below ``x = 2`` and the continued fraction above.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("bessel_k1 is defined for x > 0 only")
    if method == "series":
        out = _k1_series(arr)
    elif method == "cf":
        out = _k1_continued_fraction(arr)
    elif method == "integral":
        out = np.array([_k1_integral(float(v), cfg) for v in arr.ravel()]).reshape(arr.shape)
    elif method == "auto":
        out = np.empty_like(arr)
        small = arr < _K1_CROSSOVER
        if np.any(small):
            out[small] = _k1_series(arr[small])
        if np.any(~small):
            out[~small] = _k1_continued_fraction(arr[~small])
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if out.ndim == 0 else out


def density(r, r1: float):
    """Rest-frame density ``K1(r/r1) / (2 pi^2 r r1^2)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("density is singular at r = 0; pass r > 0")
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    return bessel_k1(r / r1) / (2 * np.pi**2 * r * r1**2)


def _radial_moment_integrand(power: int):
    # 4 pi x^power K1(x) / (2 pi^2) in the scaled variable x = r/r1
    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        zero = x == 0
        out[zero] = 2 / np.pi if power == 1 else 0.0
        xs = x[~zero]
        out[~zero] = (2 / np.pi) * xs**power * bessel_k1(xs)
        return out

    return g


def density_normalization(r1: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``int_0^inf 4 pi r^2 rho1(r) dr``; equals one."""
    return integrate_semi_infinite(_radial_moment_integrand(1), cfg)


def mean_radius(r1: float) -> float:
    """Closed-form mean radius ``4 r1 / pi``."""
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    return 4.0 * r1 / math.pi


def mean_radius_quadrature(r1: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``int_0^inf 4 pi r^3 rho1(r) dr`` by quadrature."""
    return r1 * integrate_semi_infinite(_radial_moment_integrand(2), cfg)


def structure_from_density(kappa: float, r1: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Forward transform ``(4 pi / kappa) int r sin(kappa r) rho1(r) dr``."""
    k = kappa * r1
    if k == 0:
        return density_normalization(r1, cfg)

    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, k)
        pos = x > 0
        out[pos] = np.sin(k * x[pos]) * bessel_k1(x[pos])
        return out

    return 2.0 / (np.pi * k) * integrate_semi_infinite(g, cfg)


def electrostatic_mass(q: float, r1: float) -> float:
    """``m1 = q^2 / (8 pi r1)``."""
    if r1 <= 0:
        raise ValueError("r1 must be positive")
    return q * q / (8 * math.pi * r1)


def electrostatic_mass_quadrature(q: float, structure: StructureFunction, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``(q^2 / 8 pi^2) int_-inf^inf rho~^2 dkappa`` for any even structure function."""
    integral = integrate_semi_infinite(
        lambda k: structure(k) ** 2, cfg, method="sinh", scale=1.0 / structure.r1
    )
    return q * q / (8 * math.pi**2) * 2.0 * integral


def compton_quasi_radius(m0: float, hbar: float = 1.0) -> float:
    """Half the reduced Compton wavelength, ``hbar / (2 m0)``."""
    if m0 <= 0:
        raise ValueError("m0 must be positive")
    if hbar < 0:
        raise ValueError("hbar must be non-negative")
    return hbar / (2.0 * m0)


def memory_function(t, model: ParticleModel):
    """``Q1(t) = m1 exp(-|t| / r1)``."""
    return model.m1 * np.exp(-np.abs(np.asarray(t, dtype=float)) / model.r1)


def memory_function_quadrature(t: float, q: float, structure: StructureFunction, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``(q^2 / 8 pi^2) int rho~^2 cos(kappa t) dkappa`` for a general structure function.

    The oscillatory tail is handled by QUADPACK's Fourier-integral routine
    (QAWF); ``t = 0`` reduces to the electrostatic mass.
    """
    if t == 0:
        return electrostatic_mass_quadrature(q, structure, cfg)
    value, _ = _sp_integrate.quad(
        lambda k: float(structure(k)) ** 2,
        0.0,
        np.inf,
        weight="cos",
        wvar=abs(t),
        epsabs=cfg.abs_tol,
        limlst=200,
    )
    return q * q / (8 * math.pi**2) * 2.0 * value
