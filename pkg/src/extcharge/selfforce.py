"""Self-force of the extended charge and the rectilinear function Delta.

Conventions
-----------
``delta = r1 * a`` is the dimensionless acceleration.  ``Delta(delta)`` is
the magnitude of the self-force on a hyperbolic worldline in units of
``m1 / r1``; it is odd, vanishes at zero and saturates at 1.5.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import digamma, gammaln

from .numerics import (
    DEFAULT_CONFIG,
    ConvergenceError,
    QuadratureConfig,
    integrate_semi_infinite,
    simpson,
)
from .particle import ParticleModel

__all__ = [
    "a_parallel",
    "a_perp",
    "a_parallel_scaled",
    "a_perp_scaled",
    "a_difference_scaled",
    "f_n",
    "f_n_normalized",
    "delta_fn",
    "delta_series",
    "delta_series_coefficient",
    "mu_r",
    "mu_r_approx",
    "selfforce_zeroth",
    "selfforce_first",
    "selfforce_second",
    "WorldlineHistory",
    "DeltaTable",
    "TABLE1_GRID",
]

TABLE1_GRID = (0.0, 0.1, 0.2, 0.5, 1.0, 5.0, 10.0, 100.0)
MU_R_FIT_CONSTANT = 0.1078

_SERIES_TERMS = 30
_SERIES_LIMIT = 1.0  # closed forms above, Taylor series below
_DIFF_SERIES_LIMIT = 0.5


def _kernel_series(alpha, power: int):
    # 6 sum_n (1+n)^power / (3+2n)! alpha^(2n), summed by Horner in alpha^2
    a2 = np.asarray(alpha, dtype=float) ** 2
    coeffs = [6.0 * (1 + n) ** power / math.factorial(3 + 2 * n) for n in range(_SERIES_TERMS)]
    out = np.zeros_like(a2)
    for c in reversed(coeffs):
        out = out * a2 + c
    return out


def _difference_series(alpha):
    # A_par - A_perp = -6 sum_n n (1+n) / (3+2n)! alpha^(2n)
    a2 = np.asarray(alpha, dtype=float) ** 2
    out = np.zeros_like(a2)
    for n in reversed(range(1, _SERIES_TERMS)):
        out = out * a2 - 6.0 * n * (1 + n) / math.factorial(3 + 2 * n)
    return out * a2


def _check_alpha(alpha):
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("kernel argument alpha must be non-negative")
    return alpha


def _scalar(out):
    return out[()] if np.ndim(out) == 0 else out


def a_parallel_scaled(alpha):
    """``exp(-alpha) * A_par(alpha)``; finite for every ``alpha >= 0``."""
    alpha = _check_alpha(alpha)
    out = np.empty_like(alpha)
    small = alpha <= _SERIES_LIMIT
    out[small] = np.exp(-alpha[small]) * _kernel_series(alpha[small], 1)
    a = alpha[~small]
    e2 = np.exp(-2 * a)
    out[~small] = 1.5 / a**3 * (a * (1 + e2) - (1 - e2))
    return _scalar(out)


def a_perp_scaled(alpha):
    """``exp(-alpha) * A_perp(alpha)``."""
    alpha = _check_alpha(alpha)
    out = np.empty_like(alpha)
    small = alpha <= _SERIES_LIMIT
    out[small] = np.exp(-alpha[small]) * _kernel_series(alpha[small], 2)
    a = alpha[~small]
    e2 = np.exp(-2 * a)
    out[~small] = 0.75 / a**3 * ((1 + a * a) * (1 - e2) - a * (1 + e2))
    return _scalar(out)


def a_difference_scaled(alpha):
    """``exp(-alpha) * (A_par - A_perp)``, free of cancellation near zero."""
    alpha = _check_alpha(alpha)
    out = np.empty_like(alpha)
    small = alpha < _DIFF_SERIES_LIMIT
    out[small] = np.exp(-alpha[small]) * _difference_series(alpha[small])
    big = ~small
    out[big] = a_parallel_scaled(alpha[big]) - a_perp_scaled(alpha[big])
    return _scalar(out)


def a_parallel(alpha):
    """Longitudinal anisotropy kernel ``3 (alpha cosh alpha - sinh alpha) / alpha^3``.

    Below ``alpha = 1`` the Taylor series ``6 sum (1+n)/(3+2n)! alpha^2n`` is
    used because the closed form cancels catastrophically near zero.
    """
    alpha = _check_alpha(alpha)
    out = np.empty_like(alpha)
    small = alpha <= _SERIES_LIMIT
    out[small] = _kernel_series(alpha[small], 1)
    a = alpha[~small]
    out[~small] = 3.0 / a**3 * (a * np.cosh(a) - np.sinh(a))
    return _scalar(out)


def a_perp(alpha):
    """Transverse kernel ``(3 / 2 alpha^3) [(1 + alpha^2) sinh alpha - alpha cosh alpha]``.

    Its Taylor series is ``6 sum (1+n)^2/(3+2n)! alpha^2n``.
    """
    alpha = _check_alpha(alpha)
    out = np.empty_like(alpha)
    small = alpha <= _SERIES_LIMIT
    out[small] = _kernel_series(alpha[small], 2)
    a = alpha[~small]
    out[~small] = 1.5 / a**3 * ((1 + a * a) * np.sinh(a) - a * np.cosh(a))
    return _scalar(out)


# ---------------------------------------------------------------------------
# generalized factorial functions


def _lab_time_of_s(s, delta):
    # t with sqrt(t^2 + 2t/delta) = s, written without cancellation
    ds = delta * s
    return delta * s * s / (np.sqrt(1.0 + ds * ds) + 1.0)


def _gamma_breakpoints(n: int):
    # Pieces of width ~ one standard deviation covering the mass of
    # t(s)^n e^-s ds, whose mode lies between s = n and s = 2n + 1.
    sigma = math.sqrt(2.0 * n + 2.0)
    lo = max(0.0, n - 14.0 * sigma)
    hi = 2.0 * n + 1.0 + 14.0 * sigma + 40.0
    pieces = max(8, int(math.ceil((hi - lo) / sigma)))
    return np.linspace(lo, hi, pieces + 1)


def _piecewise(g, edges, cfg):
    sub = QuadratureConfig(
        abs_tol=cfg.abs_tol / (len(edges) - 1),
        rel_tol=cfg.rel_tol,
        max_panels=cfg.max_panels,
        tail_cut=cfg.tail_cut,
    )
    return float(sum(simpson(g, a, b, sub) for a, b in zip(edges[:-1], edges[1:])))


def _fn_plain(n, delta, cfg):
    # t = v^2 removes the sqrt(t) behaviour of the integrand at t = 0
    log_norm = math.log(2.0) - gammaln(n + 1)
    edges = np.sqrt(_lab_time_of_s(_gamma_breakpoints(n), delta))

    def g(v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            expo = (2 * n + 1) * np.log(v) + log_norm - v * np.sqrt(v * v + 2.0 / delta)
        return np.exp(expo)

    return _piecewise(g, edges, cfg)


def _log_sinh(x):
    with np.errstate(divide="ignore"):
        return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def _fn_sinh(n, delta, cfg):
    # t = (cosh x - 1)/delta turns sqrt(t^2 + 2t/delta) into sinh(x)/delta
    log_norm = n * math.log(2.0) - (n + 1) * math.log(delta) - gammaln(n + 1)
    edges = np.arcsinh(delta * _gamma_breakpoints(n))

    def g(x):
        x = np.asarray(x, dtype=float)
        expo = log_norm + _log_sinh(x) - np.sinh(x) / delta
        if n:
            expo = expo + 2 * n * _log_sinh(0.5 * x)
        return np.exp(expo)

    return _piecewise(g, edges, cfg)


def f_n_normalized(n: int, delta: float, cfg: QuadratureConfig = DEFAULT_CONFIG, method: str = "plain") -> float:
    """``f_n(delta) / n!``, which stays in ``[0, 1]`` for every ``n``."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    n = int(n)
    if delta == 0:
        return 0.0
    if delta < 0:
        return -f_n_normalized(n, -delta, cfg, method)
    if method == "plain":
        return _fn_plain(n, delta, cfg)
    if method == "sinh":
        return _fn_sinh(n, delta, cfg)
    raise ValueError(f"unknown method {method!r}")


def f_n(n: int, delta: float, cfg: QuadratureConfig = DEFAULT_CONFIG, method: str = "plain") -> float:
    """Generalized factorial ``int_0^inf t^n exp(-sqrt(t^2 + 2t/delta)) dt``.

    Odd in ``delta``; rises from 0 at ``delta = 0`` to ``n!`` as
    ``delta -> inf``.  ``method`` picks the plain ``t`` integral (after
    ``t = v^2``) or the hyperbolic substitution ``t = (cosh x - 1)/delta``.
    """
    return math.factorial(int(n)) * f_n_normalized(n, delta, cfg, method)


# ---------------------------------------------------------------------------
# Delta


def _delta_integrand(delta):
    # Integration variable s = sqrt(alpha^2 + 2 alpha / delta), the retarded
    # lab time in units of r1.  The boundary layer near alpha = 0 at small
    # delta becomes the smooth weight delta * s * exp(-s).
    def g(s):
        s = np.asarray(s, dtype=float)
        ds = delta * s
        root = np.sqrt(1.0 + ds * ds)
        alpha = delta * s * s / (root + 1.0)
        lag = (1.0 / (root + ds) - 1.0) / delta  # alpha - s, without cancellation
        jac = ds / root
        return np.exp(lag) * a_parallel_scaled(alpha) * jac

    return g


@lru_cache(maxsize=4096)
def _delta_positive(delta: float, cfg: QuadratureConfig) -> float:
    scale = min(1.0, 1.0 / delta)
    return float(integrate_semi_infinite(_delta_integrand(delta), cfg, method="sinh", scale=scale))


def delta_fn(delta: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Dimensionless self-force ``Delta(delta)`` by direct quadrature.

    ``Delta = int_0^inf exp(-sqrt(alpha^2 + 2 alpha/delta)) A_par(alpha) dalpha``
    with ``Delta(-delta) = -Delta(delta)``.  The integrand only falls off as
    ``1.5 exp(-1/delta) / alpha^2``, so the quadrature runs in the lab-time
    variable and then through a sinh map that makes that tail exponential.
    Results are memoised per ``(delta, cfg)``.
    """
    delta = float(delta)
    if not math.isfinite(delta):
        raise ValueError("delta must be finite")
    if delta == 0:
        return 0.0
    value = _delta_positive(abs(delta), cfg)
    return math.copysign(value, delta)


def delta_series_coefficient(n: int) -> float:
    """``c_2n = 6 (1 + n) / (3 + 2n)!``."""
    return 6.0 * (1 + n) / math.factorial(3 + 2 * n)


def _weighted_tail(N: int):
    # sum_{n >= N} 3 / ((2n+1)(2n+3)) and sum_{n >= N} 3 / (n (2n+1)(2n+3))
    plain = 1.5 / (2 * N + 1)
    inverse_n = (digamma(N + 0.5) - digamma(N)) - 0.5 * (digamma(N + 1.5) - digamma(N + 0.5))
    return plain, float(inverse_n)


def delta_series(delta: float, tol: float = 1e-9, cfg: QuadratureConfig = DEFAULT_CONFIG, max_terms: int = 2048) -> float:
    """``Delta`` from the expansion ``sum_n c_2n f_2n(delta)``.

    Each term equals ``w_n r_2n`` with ``w_n = 3/((2n+1)(2n+3))`` and
    ``r_2n = f_2n/(2n)!``.  Since ``r_2n -> A = exp(-1/delta)`` only like
    ``1/n``, the raw partial sums converge like ``1/N``.  The sum is
    therefore rearranged as ``1.5 A + sum w_n (r_2n - A)``, the remainder
    after ``N`` terms is added in closed form assuming ``r_2n - A ~ B/n``,
    and the resulting ``O(N^-3)`` error is removed by Richardson
    extrapolation over doubling ``N`` until two extrapolants agree
    within ``tol``.
    """
    delta = float(delta)
    if delta == 0:
        return 0.0
    if delta < 0:
        return -delta_series(-delta, tol, cfg, max_terms)
    limit = math.exp(-1.0 / delta)
    ratios: list[float] = []

    def corrected(N):
        while len(ratios) <= N:
            ratios.append(f_n_normalized(2 * len(ratios), delta, cfg))
        n = np.arange(N)
        head = 1.5 * limit + math.fsum(3.0 / ((2 * n + 1) * (2 * n + 3)) * (np.array(ratios[:N]) - limit))
        _, inverse_n = _weighted_tail(N)
        return head + (ratios[N] - limit) * N * inverse_n

    N = 16
    previous = corrected(N)
    extrapolated = None
    while 2 * N <= max_terms:
        N *= 2
        current = corrected(N)
        better = current + (current - previous) / 7.0
        if extrapolated is not None and abs(better - extrapolated) < tol:
            return better
        previous, extrapolated = current, better
    raise ConvergenceError(
        f"delta_series did not reach tol={tol} with {N} terms", estimate=extrapolated, gap=None
    )


# ---------------------------------------------------------------------------
# reactive mass


def mu_r(delta: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Relative reactive mass ``1 - Delta(delta)/delta``; 0 at ``delta = 0``."""
    if delta == 0:
        return 0.0
    return 1.0 - delta_fn(delta, cfg) / delta


def mu_r_approx(delta):
    """Fitted closed form ``exp(-1.5 / (sqrt|delta| (0.1078 + sqrt|delta|)))``."""
    d = np.abs(np.asarray(delta, dtype=float))
    out = np.zeros_like(d)
    pos = d > 0
    root = np.sqrt(d[pos])
    out[pos] = np.exp(-1.5 / (root * (MU_R_FIT_CONSTANT + root)))
    return _scalar(out)


# ---------------------------------------------------------------------------
# self-force approximations


def selfforce_zeroth(accel, m1: float):
    """Small-acceleration self-force ``-m1 a``."""
    return -m1 * np.asarray(accel)


def selfforce_first(velocity_history: Callable, model: ParticleModel, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Self-force with the exponential memory kernel, at ``t = 0``.

    ``-m1 a(0) + m1 int_{-inf}^0 jerk(t) exp(t/r1) dt`` is integrated by
    parts twice so that only the velocity history ``u(t)`` (``t <= 0``,
    scalar, complex or vector valued) is needed:
    ``-(m1/r1) [u(0) - (1/r1) int_{-inf}^0 u(t) exp(t/r1) dt]``.
    """
    r1 = model.r1
    try:
        u0 = np.asarray(velocity_history(np.zeros(1)))[0]
    except TypeError:  # callable accepts scalars only
        u0 = np.asarray(velocity_history(0.0))

    def g(w):
        w = np.asarray(w, dtype=float)
        u = np.asarray(velocity_history(-r1 * w))
        damp = np.exp(-w)
        return u * (damp if u.ndim <= 1 else damp[:, None])

    memory = integrate_semi_infinite(g, cfg)
    return -(model.m1 / r1) * (u0 - memory)


@dataclass(frozen=True)
class WorldlineHistory:
    """Past worldline seen from the rest frame of the reference event.

    ``position(tau)`` and ``velocity(tau)`` return spatial vectors (shape
    ``(N, d)`` for an array of ``N`` proper times), ``lab_time(tau)`` the
    rest-frame time.  Only ``tau <= 0`` is ever evaluated.
    """

    position: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    lab_time: Callable[[np.ndarray], np.ndarray]
    dim: int = 1

    @classmethod
    def hyperbolic(cls, f: float) -> "WorldlineHistory":
        """Uniform acceleration ``f`` along the first axis, at rest at ``tau = 0``."""

        def position(tau):
            ft = f * np.asarray(tau, dtype=float)
            x = 2.0 * np.sinh(0.5 * ft) ** 2 / f if f != 0 else np.zeros_like(ft)
            return np.reshape(x, (-1, 1))

        def velocity(tau):
            return np.reshape(np.sinh(f * np.asarray(tau, dtype=float)), (-1, 1))

        def lab_time(tau):
            tau = np.asarray(tau, dtype=float)
            return np.sinh(f * tau) / f if f != 0 else tau.copy()

        return cls(position, velocity, lab_time, dim=1)

    @classmethod
    def static(cls, dim: int = 1) -> "WorldlineHistory":
        def zero(tau):
            return np.zeros((np.size(tau), dim))

        return cls(zero, zero, lambda tau: np.asarray(tau, dtype=float).copy(), dim=dim)

    @classmethod
    def from_samples(cls, taus: Sequence[float], positions, lab_times) -> "WorldlineHistory":
        """Cubic-spline history through sampled ``(tau, position, lab_time)``.

        The velocity is the spline derivative.  Beyond the first sample the
        history is not extrapolated: the spline is held at its end value,
        so supply samples far enough into the past for the integrand weight
        ``exp(t/r1)`` to be negligible there.
        """
        taus = np.asarray(taus, dtype=float)
        pos = np.asarray(positions, dtype=float)
        if pos.ndim == 1:
            pos = pos[:, None]
        if taus.ndim != 1 or len(taus) < 4 or np.any(np.diff(taus) <= 0):
            raise ValueError("taus must be at least 4 strictly increasing samples")
        spline = CubicSpline(taus, pos, axis=0)
        clock = CubicSpline(taus, np.asarray(lab_times, dtype=float))
        dspline = spline.derivative()
        first = taus[0]

        def clip(tau):
            return np.maximum(np.atleast_1d(np.asarray(tau, dtype=float)), first)

        return cls(
            position=lambda tau: spline(clip(tau)),
            velocity=lambda tau: np.where(
                (np.atleast_1d(tau) >= first)[:, None], dspline(clip(tau)), 0.0
            ),
            lab_time=lambda tau: np.where(
                np.atleast_1d(tau) >= first,
                clock(clip(tau)),
                clock(first) + (np.atleast_1d(tau) - first),
            ),
            dim=pos.shape[1],
        )

    def check(self, span: float = 5.0, samples: int = 41, h: float = 1e-5, tol: float = 1e-8) -> None:
        """Raise ``ValueError`` if the history breaks its invariants on ``[-span, 0]``."""
        if np.max(np.abs(self.position(np.array([0.0])))) > tol:
            raise ValueError("position(0) must be the origin")
        if abs(float(np.asarray(self.lab_time(np.array([0.0])))[0])) > tol:
            raise ValueError("lab_time(0) must be zero")
        taus = np.linspace(-span, 0.0, samples)
        if np.any(np.diff(np.asarray(self.lab_time(taus))) <= 0):
            raise ValueError("lab_time must be strictly increasing")
        inner = taus[1:-1]
        fd = (self.position(inner + h) - self.position(inner - h)) / (2 * h)
        if np.max(np.abs(fd - self.velocity(inner))) > tol * max(1.0, float(np.max(np.abs(fd)))):
            raise ValueError("velocity is not the derivative of position")


def selfforce_second(
    history: WorldlineHistory,
    model: ParticleModel,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    time_scale: float = 1.0,
) -> np.ndarray:
    """Retarded self-force at the reference event from the full past history.

    Integrates ``(m1/r1^2) int dtau' [P(z') v (A_par - A_perp) + v A_perp] exp(t'/r1)``
    where ``P(z')`` projects onto the current displacement.  The kernels
    are evaluated pre-multiplied by ``exp(-alpha)`` and the weight as
    ``exp(t'/r1 + alpha)``, which never exceeds one for a causal history.
    Where the displacement vanishes the projected term drops out, its
    kernel difference being zero there.

    ``time_scale`` (in units of ``r1``) is the proper time over which the
    integrand varies; it sets the sinh map of the past half-line.  For a
    hyperbolic history with ``r1 f >> 1`` pass about ``1 / (r1 f)`` so the
    tail search never reaches proper times where the history overflows.
    """
    r1 = model.r1

    def g(w):
        tau = -r1 * np.atleast_1d(np.asarray(w, dtype=float))
        z = np.asarray(history.position(tau), dtype=float).reshape(len(tau), -1)
        v = np.asarray(history.velocity(tau), dtype=float).reshape(len(tau), -1)
        t = np.asarray(history.lab_time(tau), dtype=float).reshape(len(tau))
        r2 = np.sum(z * z, axis=1)
        dist = np.sqrt(r2)
        alpha = dist / r1
        with np.errstate(invalid="ignore", divide="ignore"):
            coef = np.where(r2 > 0, np.sum(v * z, axis=1) / r2, 0.0)
        weight = np.exp(np.minimum(t / r1 + alpha, 0.0))
        body = (coef * a_difference_scaled(alpha))[:, None] * z + a_perp_scaled(alpha)[:, None] * v
        return body * weight[:, None]

    integral = integrate_semi_infinite(g, cfg, method="sinh", scale=time_scale)
    return (model.m1 / r1) * np.atleast_1d(integral)


# ---------------------------------------------------------------------------
# tabulation


@dataclass(frozen=True)
class DeltaTable:
    """Samples ``(delta, Delta, mu_r, mu_r_approx)`` on a grid."""

    delta: tuple
    Delta: tuple
    mu_r: tuple
    mu_r_approx: tuple

    COLUMNS = ("delta", "Delta", "mu_r", "mu_r_approx")

    @classmethod
    def compute(cls, grid: Sequence[float] = TABLE1_GRID, cfg: QuadratureConfig = DEFAULT_CONFIG) -> "DeltaTable":
        grid = tuple(float(d) for d in grid)
        big = tuple(delta_fn(d, cfg) for d in grid)
        mr = tuple(0.0 if d == 0 else 1.0 - D / d for d, D in zip(grid, big))
        approx = tuple(float(mu_r_approx(d)) for d in grid)
        return cls(grid, big, mr, approx)

    def rows(self):
        return list(zip(self.delta, self.Delta, self.mu_r, self.mu_r_approx))
