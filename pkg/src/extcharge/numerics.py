"""Numerical primitives shared by the rest of the package.

Everything here is a pure function of its arguments.  Integrands are
evaluated on numpy arrays whenever they allow it; scalar-only callables
are detected and mapped element by element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureConfig",
    "DEFAULT_CONFIG",
    "ConvergenceError",
    "BracketError",
    "simpson",
    "integrate_semi_infinite",
    "solve_monotone",
    "ode_rk4",
    "sum_series",
]


class ConvergenceError(ArithmeticError):
    """An iterative procedure stopped before meeting its tolerance.

    ``estimate`` is the last value reached and ``gap`` the last measured
    change (or the last term, for series).
    """

    def __init__(self, message, estimate=None, gap=None):
        super().__init__(message)
        self.estimate = estimate
        self.gap = gap


class BracketError(ValueError):
    """Root target does not lie between the values at the bracket ends."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for all quadratures.

    Attributes
    ----------
    abs_tol, rel_tol : float
        Successive composite-Simpson estimates must differ by less than
        ``max(abs_tol, rel_tol * |estimate|)``.
    max_panels : int
        Upper bound on the number of Simpson panels (even, >= 4).
    tail_cut : float
        First trial upper limit used in place of infinity; doubled until
        the integrand has decayed.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_panels: int = 2**20
    tail_cut: float = 32.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_panels < 4 or self.max_panels % 2:
            raise ValueError("max_panels must be even and >= 4")
        if not self.tail_cut > 0:
            raise ValueError("tail_cut must be positive")


DEFAULT_CONFIG = QuadratureConfig()

_MIN_PANELS = 8
_TAIL_DOUBLINGS = 24


def _evaluate(f, x):
    """Evaluate ``f`` on the array ``x``; leading axis of the result is ``x``."""
    try:
        y = np.asarray(f(x))
    except TypeError:
        y = None
    if y is None or y.shape[:1] != x.shape:
        if y is not None and y.ndim == 0:
            y = np.full(x.shape, y[()])
        else:
            y = np.array([np.asarray(f(xi)) for xi in x])
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y).reshape(len(x), -1).all(axis=1)][0]
        raise FloatingPointError(f"integrand is not finite at x={bad!r}")
    return y


def simpson(f: Callable, a: float, b: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Composite Simpson rule refined by interval halving.

    The panel count starts at 8 and doubles, reusing earlier samples,
    until two successive refinements each change the estimate by less than
    ``max(cfg.abs_tol, cfg.rel_tol * |estimate|)``.  ``f`` may return
    scalars, complex numbers or vectors (one row per abscissa).

    Raises
    ------
    ConvergenceError
        If ``cfg.max_panels`` is exhausted; carries the last estimate and gap.
    """
    a = float(a)
    b = float(b)
    if b < a:
        raise ValueError(f"simpson needs a <= b, got [{a}, {b}]")
    n = _MIN_PANELS
    x = np.linspace(a, b, n + 1)
    y = _evaluate(f, x)
    if a == b:
        return np.zeros_like(y[0]) if y.ndim > 1 else 0.0 * y[0]
    ends = y[0] + y[-1]
    odd = y[1:-1:2].sum(axis=0)
    even = y[2:-1:2].sum(axis=0)
    h = (b - a) / n
    estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
    passes = 0
    gap = np.inf
    while 2 * n <= cfg.max_panels:
        n *= 2
        h = (b - a) / n
        even = even + odd
        mids = a + h * np.arange(1, n, 2)
        odd = _evaluate(f, mids).sum(axis=0)
        new = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
        gap = float(np.max(np.abs(new - estimate)))
        scale = float(np.max(np.abs(new)))
        estimate = new
        if gap <= max(cfg.abs_tol, cfg.rel_tol * scale):
            passes += 1
            if passes == 2:
                return estimate[()] if np.ndim(estimate) == 0 else estimate
        else:
            passes = 0
    raise ConvergenceError(
        f"simpson did not converge on [{a}, {b}] with {n} panels (gap {gap:.3e})",
        estimate=estimate,
        gap=gap,
    )


def _peak(f, x):
    return float(np.max(np.abs(_evaluate(f, np.atleast_1d(np.asarray(x, dtype=float))))))


def _decayed_cut(g, start, cfg, additive=False):
    # Multiplicative growth for the plain variable; unit additive steps in
    # the sinh variable, where each step already stretches t by a factor e.
    cut = start
    for _ in range(_TAIL_DOUBLINGS if not additive else 4 * _TAIL_DOUBLINGS):
        probe = [cut, cut + 0.5, cut + 1.0] if additive else [cut, 1.5 * cut, 2.0 * cut]
        width = 2.0 if additive else 2.0 * cut
        if _peak(g, probe) * width < cfg.abs_tol:
            return cut
        cut = cut + 1.0 if additive else 2.0 * cut
    raise ConvergenceError(
        f"integrand has not decayed below abs_tol by x={cut:.3e}", estimate=None, gap=None
    )


def integrate_semi_infinite(
    f: Callable,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    method: str = "truncate",
    scale: float = 1.0,
):
    """Integrate ``f`` over ``[0, inf)``.

    ``method="truncate"`` integrates ``[0, T]`` where ``T`` starts at
    ``cfg.tail_cut`` and doubles until ``|f| * T < cfg.abs_tol`` on
    ``[T, 2T]``; suited to integrands with exponential decay.

    ``method="sinh"`` substitutes ``t = scale * sinh(x)`` first.  An
    algebraic tail ``t**-p`` (p > 1) becomes an exponential tail in
    ``x`` and an exponential tail becomes double-exponential.  The cut in
    ``x`` then grows in unit steps until the mapped integrand is below
    ``abs_tol / 2`` over one unit past it.
    """
    if method == "truncate":
        cut = _decayed_cut(f, cfg.tail_cut, cfg)
        return simpson(f, 0.0, cut, cfg)
    if method == "sinh":
        if not scale > 0:
            raise ValueError("scale must be positive")

        def mapped(x):
            jac = scale * np.cosh(x)
            y = np.asarray(f(scale * np.sinh(x)))
            return y * (jac if y.ndim <= 1 else jac[:, None])

        cut = _decayed_cut(mapped, 1.0, cfg, additive=True)
        return simpson(mapped, 0.0, cut, cfg)
    raise ValueError(f"unknown method {method!r}")


def solve_monotone(
    g: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    polish: bool = True,
) -> float:
    """Invert a strictly monotone ``g`` on ``[lo, hi]`` by bisection.

    Secant steps are attempted inside the current bracket when ``polish``
    is set; a step that leaves the bracket is replaced by a bisection
    step, so the bracket always shrinks.
    """
    glo = g(lo) - target
    ghi = g(hi) - target
    if abs(glo) <= tol:
        return lo
    if abs(ghi) <= tol:
        return hi
    if glo * ghi > 0:
        raise BracketError(
            f"target {target!r} is outside the bracket: g({lo!r})={glo + target!r}, "
            f"g({hi!r})={ghi + target!r}"
        )
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if polish and ghi != glo:
            sec = hi - ghi * (hi - lo) / (ghi - glo)
            if lo < sec < hi:
                mid = sec
        gmid = g(mid) - target
        if abs(gmid) <= tol:
            return mid
        if gmid * glo < 0:
            hi, ghi = mid, gmid
        else:
            lo, glo = mid, gmid
        # keep the bracket shrinking geometrically
        half = 0.5 * (lo + hi)
        ghalf = g(half) - target
        if abs(ghalf) <= tol:
            return half
        if ghalf * glo < 0:
            hi, ghi = half, ghalf
        else:
            lo, glo = half, ghalf
        if hi - lo <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-300):
            return lo if abs(glo) < abs(ghi) else hi
    raise ConvergenceError("bisection did not converge", estimate=0.5 * (lo + hi), gap=hi - lo)


def ode_rk4(deriv, state0, t0: float, t1: float, steps: int):
    """Classical fixed-step fourth-order Runge-Kutta.

    Returns ``(taus, states)`` with ``states[k]`` the state at ``taus[k]``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    y = np.array(state0, dtype=float)
    taus = np.linspace(t0, t1, steps + 1)
    h = (t1 - t0) / steps
    out = np.empty((steps + 1,) + y.shape)
    out[0] = y
    for k in range(steps):
        t = taus[k]
        k1 = deriv(t, y)
        k2 = deriv(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = deriv(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise FloatingPointError(f"non-finite state at tau={taus[k + 1]!r}")
        out[k + 1] = y
    return taus, out


def sum_series(
    term: Callable[[int], float],
    tol: float,
    max_terms: int = 100000,
    full_output=False,
    extrapolate: bool = False,
):
    """Sum ``term(0) + term(1) + ...``.

    By default summation stops once two consecutive terms are below
    ``tol`` in magnitude.  That criterion leaves a tail of order
    ``sqrt(tol)`` for terms decaying like ``1/n^2``; for such series
    ``extrapolate=True`` forms partial sums at ``N = 16, 32, 64, ...`` and
    eliminates the powers of ``1/N`` in their error by a Romberg tableau,
    stopping when two successive diagonal entries agree within ``tol``.
    With ``full_output`` the number of terms consumed is returned as well.
    """
    if extrapolate:
        return _sum_romberg(term, tol, max_terms, full_output)
    total = 0.0
    small = 0
    for n in range(max_terms):
        t = term(n)
        total += t
        small = small + 1 if abs(t) < tol else 0
        if small == 2:
            return (total, n + 1) if full_output else total
    raise ConvergenceError(
        f"series not converged after {max_terms} terms", estimate=total, gap=abs(t)
    )


def _sum_romberg(term, tol, max_terms, full_output):
    terms = []
    partial = 0.0
    N = 16
    rows: list[list[float]] = []
    best, gap = None, np.inf
    while N <= max_terms:
        while len(terms) < N:
            terms.append(term(len(terms)))
        partial = math.fsum(terms)
        row = [partial]
        for k, prev in enumerate(rows[-1] if rows else []):
            factor = 2.0 ** (k + 1)
            row.append(row[k] + (row[k] - prev) / (factor - 1.0))
        rows.append(row)
        if len(rows) >= 3:
            gap = abs(row[-1] - rows[-2][-1])
            best = row[-1]
            if gap < tol:
                return (best, N) if full_output else best
        N *= 2
    raise ConvergenceError(
        f"extrapolated series not converged within {max_terms} terms", estimate=best, gap=gap
    )
