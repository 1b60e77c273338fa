"""Command-line front end: ``extcharge <command> [options]``.

Every command builds a :class:`~extcharge.export.ResultTable` through a
``cmd_*`` function, which can also be called directly, and writes it as
CSV or JSON.  Model parameters and command options may come from a flat
``key = value`` config file; options given on the command line win.

Exit codes: 0 success, 1 usage error, 2 numerical failure in at least one
row (the remaining rows are still written).
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import constants as _si

from . import __version__
from .balance import balance_at, critical_field, effective_mass_ratio, f0_of_f
from .config import ConfigError, read_key_value
from .export import OK, ResultTable, render
from .hyperbolic import HyperbolicWorldline, picard_iterate
from .lorentzdirac import COMPARISON_COLUMNS, compare_selfforce
from .magnetic import (
    SURFACE_COLUMNS,
    ValidityWarning,
    magnetic_force,
    memory_ode_solve,
    omega_physical,
    spiral,
    spiral_center,
    steady_memory_state,
    total_energy,
)
from .numerics import DEFAULT_CONFIG, BracketError, ConvergenceError, QuadratureConfig
from .particle import ParticleModel
from .selfforce import TABLE1_GRID, delta_fn, mu_r_approx

__all__ = [
    "main",
    "build_parser",
    "RunConfig",
    "UsageError",
    "cmd_table1",
    "cmd_curves",
    "cmd_hyperbola",
    "cmd_spiral",
    "cmd_compare_ld",
    "cmd_critical_field",
    "CURVES",
    "DEFAULT_MODEL",
]

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2

# q = 1, r1 = 1 and m_inf = 2 m1, so that mu1 = 1/3
DEFAULT_MODEL = ParticleModel(q=1.0, m_inf=1.0 / (4.0 * math.pi), r1=1.0)
CURVES = ("balance", "f0", "mass", "delta", "omega")
NONRELATIVISTIC_SPEED = 0.1

_NUMERICAL_ERRORS = (ConvergenceError, BracketError, ArithmeticError, FloatingPointError, ValueError)
_MODEL_KEYS = ("q", "m_inf", "r1")


class UsageError(Exception):
    """Bad command line, config file or parameter grid."""


@dataclass
class RunConfig:
    model: ParticleModel = DEFAULT_MODEL
    options: dict = field(default_factory=dict)
    fmt: str = "csv"
    out: str | None = None


def _status(exc: Exception) -> str:
    return f"error: {type(exc).__name__}: {exc}"


# ---------------------------------------------------------------------------
# commands


def cmd_table1(
    grid: Sequence[float] = TABLE1_GRID, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> ResultTable:
    """Rows ``(delta, Delta, mu_r, mu_r_approx)``; ``delta = 0`` gives zeros."""
    table = ResultTable(columns=("delta", "Delta", "mu_r", "mu_r_approx"))
    for d in grid:
        d = float(d)
        try:
            big = delta_fn(d, cfg)
            mr = 0.0 if d == 0 else 1.0 - big / d
            table.add((d, big, mr, float(mu_r_approx(d))))
        except _NUMERICAL_ERRORS as exc:
            table.fail((d,), _status(exc))
    return table


def cmd_curves(
    which: str,
    grid: Sequence[float],
    model: ParticleModel = DEFAULT_MODEL,
    mu1_values: Sequence[float] = (0.1, 0.3, 0.5, 0.7, 0.9),
    b_values: Sequence[float] = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0),
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ResultTable:
    """Curve families of the balance, mass and frequency relations.

    ``balance``
        ``(f, f0, f_inf, f_s, f_r)`` for the given model, ``grid`` = f.
    ``f0``
        ``(mu1, f, f0)`` per ``mu1``, lengths in units of ``r0``.
    ``mass``
        ``(mu1, delta0, mu)`` with ``mu = m/m0``, ``grid`` = ``delta0 = r0 f``.
    ``delta``
        ``(delta, Delta, mu_r, mu_r_approx)``, ``grid`` = delta.
    ``omega``
        ``(mu1, b, Omega_r, Omega_i)`` over ``mu1_values`` x ``b_values``.
    """
    if which not in CURVES:
        raise UsageError(f"unknown curve {which!r}; choose from {', '.join(CURVES)}")
    if which == "delta":
        return cmd_table1(grid, cfg)
    if which == "balance":
        table = ResultTable(columns=("f", "f0", "f_inf", "f_s", "f_r"))
        for f in grid:
            f = float(f)
            try:
                fields, _ = balance_at(f, model, cfg)
                table.add((f, fields.f0, fields.f_inf, fields.f_s, fields.f_r))
            except _NUMERICAL_ERRORS as exc:
                table.fail((f,), _status(exc))
        return table
    if which == "f0":
        table = ResultTable(columns=("mu1", "f", "f0"))
        for mu1 in mu1_values:
            mu1 = float(mu1)
            try:
                m = ParticleModel.from_mu1(mu1, q=model.q, r1=1.0 / mu1)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            for f in grid:
                f = float(f)
                try:
                    table.add((mu1, f, f0_of_f(f, m, cfg)))
                except _NUMERICAL_ERRORS as exc:
                    table.fail((mu1, f), _status(exc))
        return table
    if which == "mass":
        table = ResultTable(columns=("mu1", "delta0", "mu"))
        for mu1 in mu1_values:
            mu1 = float(mu1)
            if not 0 <= mu1 < 1:
                raise UsageError("mu1 values must lie in [0, 1)")
            for d0 in grid:
                d0 = float(d0)
                try:
                    table.add((mu1, d0, effective_mass_ratio(d0, mu1, cfg)))
                except _NUMERICAL_ERRORS as exc:
                    table.fail((mu1, d0), _status(exc))
        return table
    # omega
    table = ResultTable(columns=SURFACE_COLUMNS)
    for mu1 in mu1_values:
        mu1 = float(mu1)
        if not 0 <= mu1 < 1:
            raise UsageError("mu1 values must lie in [0, 1)")
        for b in b_values:
            b = float(b)
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", ValidityWarning)
                    Om = omega_physical(mu1, b).Omega
                status = OK if not caught else OK + ": continued beyond the closed-form domain"
                table.add((mu1, b, Om.real, Om.imag), status)
            except _NUMERICAL_ERRORS as exc:
                table.fail((mu1, b), _status(exc))
    return table


def cmd_hyperbola(
    f: float = 1.0,
    tau_max: float = 1.0,
    iters: int = 25,
    grid_n: int = 4096,
    samples: int = 17,
    tol: float = 1e-10,
) -> tuple[ResultTable, ResultTable]:
    """Worldline samples and the Picard convergence report.

    The sample table holds the closed-form worldline, the last Picard
    iterate and the space component of the second iterate next to its
    exact value ``f tau^2 / 2``.  The report lists the sup-norm distance
    to the closed form and the step size of every iteration.
    """
    if samples < 2 or grid_n % (samples - 1):
        raise UsageError("samples - 1 must divide grid_n")
    if iters < 2:
        raise UsageError("iters must be at least 2 to report the second iterate")
    try:
        result = picard_iterate(f, tau_max, grid_n=grid_n, iters=iters, tol=tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    stride = grid_n // (samples - 1)
    idx = np.arange(0, grid_n + 1, stride)
    closed = HyperbolicWorldline(f).samples(result.taus[idx])
    final = result.final[idx]
    second = result.iterates[1][idx, 1]
    table = ResultTable(columns=("tau", "t", "x", "u0", "u1", "t_picard", "x_picard", "x_iter2", "x_iter2_exact"))
    for k in range(idx.size):
        tau = float(closed["tau"][k])
        table.add(
            (
                tau,
                float(closed["t"][k]),
                float(closed["x"][k]),
                float(closed["u0"][k]),
                float(closed["u1"][k]),
                float(final[k, 0]),
                float(final[k, 1]),
                float(second[k]),
                0.5 * f * tau * tau,
            )
        )
    report = ResultTable(columns=("iteration", "distance", "step", "contraction"))
    for n, dist in enumerate(result.distances, start=1):
        step = float(result.steps[n - 1]) if n - 1 < len(result.steps) else None
        ratio = None
        if 2 <= n <= len(result.steps) and result.steps[n - 2] > 0:
            ratio = float(result.steps[n - 1] / result.steps[n - 2])
        report.add((n, float(dist), step, ratio))
    meta = {
        "f": f,
        "tau_max": tau_max,
        "grid_n": grid_n,
        "converged": result.converged,
        "converged_at": result.converged_at,
        "grid_error": result.grid_error,
    }
    table.meta = dict(meta)
    report.meta = dict(meta)
    if not result.converged:
        report.meta["note"] = f"no step below tol = {tol} within {iters} iterations"
    return table, report


def cmd_spiral(
    B_e: float | None = None,
    u0: float = 0.01,
    tau_max: float | None = None,
    steps: int | None = None,
    samples: int = 201,
    prehistory: str = "free",
    model: ParticleModel = DEFAULT_MODEL,
) -> ResultTable:
    """Closed-form spiral next to the memory-kernel trajectory.

    The charge starts at the origin with velocity ``u0`` along x when the
    field ``B_e`` is switched on at ``tau = 0``.  With ``prehistory =
    "free"`` the past is uniform motion; with ``"steady"`` the past is
    already the spiral, so both curves coincide from the start.
    ``deviation`` is ``|u_ode - u_spiral| / |u_spiral|``.  A free past
    leaves the solution on the spiral's frequency but with another
    amplitude and phase, so ``freq_deviation = |u_ode'/u_ode - i omega| /
    |omega|`` is the measure of having reached the attractor.

    ``B_e`` defaults to the field with ``b = r0 q B_e / m0 = 0.1``, and
    ``tau_max`` to ``40 r1 / mu1``, twice the time needed to settle.
    ``steps`` defaults to at least 8000 and 200 per radian of ``|omega|
    tau_max``, rounded up to a multiple of ``samples - 1``.
    """
    if prehistory not in ("free", "steady"):
        raise UsageError("prehistory must be 'free' or 'steady'")
    if samples < 2:
        raise UsageError("samples must be at least 2")
    if abs(u0) >= NONRELATIVISTIC_SPEED:
        print(f"extcharge: advisory: |u0| = {abs(u0)} is not small; the planar model is nonrelativistic", file=sys.stderr)
    if tau_max is None:
        tau_max = 40.0 * model.r1 / model.mu1
    if tau_max <= 0:
        raise UsageError("tau_max must be positive")
    if B_e is None:
        B_e = 0.1 * model.m0 / (model.r0 * model.q)
    qB = model.q * B_e
    omega0 = qB / model.m0
    b = model.r0 * omega0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        freq = omega_physical(model.mu1, b, model.r0)
    omega = freq.omega
    if steps is None:
        steps = max(8000, math.ceil(200 * abs(omega) * tau_max))
        steps = -(-steps // (samples - 1)) * (samples - 1)
    if steps < 1 or steps % (samples - 1):
        raise UsageError("samples - 1 must divide steps")
    S0 = steady_memory_state(u0, omega, model.r1) if prehistory == "steady" else 0j
    columns = (
        "tau", "x", "y", "ux", "uy", "W0",
        "x_ode", "y_ode", "ux_ode", "uy_ode", "W0_ode",
        "deviation", "freq_deviation", "z_inf_x", "z_inf_y",
    )
    table = ResultTable(columns=columns)
    table.meta = {
        "B_e": B_e, "u0": u0, "mu1": model.mu1, "b": b, "prehistory": prehistory,
        "omega_r": omega.real, "omega_i": omega.imag,
    }
    base_status = OK if not caught else OK + ": frequency continued beyond the closed-form domain"
    try:
        traj = memory_ode_solve(magnetic_force(qB), model, u0, (0.0, tau_max), steps, S_init=S0)
    except _NUMERICAL_ERRORS as exc:
        for tau in np.linspace(0.0, tau_max, samples):
            table.fail((float(tau),), _status(exc))
        return table
    idx = np.arange(0, steps + 1, steps // (samples - 1))
    taus = traj.taus[idx]
    z_cf = spiral(taus, u0, omega)
    u_cf = u0 * np.exp(1j * omega * taus)
    W_cf = total_energy(taus, u0, model, freq)
    center = spiral_center(u0, omega) if omega != 0 else None
    status = base_status if center is not None else base_status + ": no asymptotic point without a field"
    for k, i in enumerate(idx):
        u_ode = traj.u[i]
        z_ode = traj.z[i]
        W_ode = model.m0 * math.sqrt(1.0 + abs(u_ode) ** 2)
        dev = abs(u_ode - u_cf[k]) / abs(u_cf[k])
        fdev = 0.0 if omega == 0 else abs(traj.accel[i] / u_ode - 1j * omega) / abs(omega)
        table.add(
            (
                float(taus[k]),
                float(z_cf[k].real), float(z_cf[k].imag),
                float(u_cf[k].real), float(u_cf[k].imag), float(W_cf[k]),
                float(z_ode.real), float(z_ode.imag),
                float(u_ode.real), float(u_ode.imag), float(W_ode),
                float(dev),
                float(fdev),
                None if center is None else float(center.real),
                None if center is None else float(center.imag),
            ),
            status,
        )
    return table


def cmd_compare_ld(
    grid: Sequence[float] = (0.0, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0, 1000.0),
    model: ParticleModel = DEFAULT_MODEL,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> ResultTable:
    """Extended versus linear point-charge self-force on hyperbolic motion."""
    if any(float(d) < 0 for d in grid):
        raise UsageError("delta values must be non-negative")
    table = ResultTable(columns=COMPARISON_COLUMNS)
    for d in grid:
        try:
            table.add(compare_selfforce([d], model, cfg)[0])
        except _NUMERICAL_ERRORS as exc:
            table.fail((float(d),), _status(exc))
    return table


def cmd_critical_field(
    q_si: float = _si.e, m0_si: float = _si.m_e, ratio: float = 0.1
) -> ResultTable:
    """SI field strength and acceleration at which ``r1 a`` reaches ``ratio``."""
    try:
        E, a = critical_field(q_si, m0_si, ratio)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    table = ResultTable(columns=("q_SI", "m0_SI", "ratio_target", "E_field", "accel"))
    table.add((float(q_si), float(m0_si), float(ratio), E, a))
    return table


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise UsageError(f"not a comma-separated list of numbers: {text!r}") from exc
    if not values:
        raise UsageError("empty list")
    if not all(math.isfinite(v) for v in values):
        raise UsageError("list values must be finite")
    return values


# option name -> (type, default); shared by flags and config keys
_OPTIONS = {
    "table1": {"grid": (_float_list, list(TABLE1_GRID))},
    "curves": {
        "which": (str, None),
        "grid": (_float_list, None),
        "start": (float, 0.0),
        "stop": (float, 10.0),
        "num": (int, 41),
        "mu1": (_float_list, None),
        "b": (_float_list, [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0]),
    },
    "hyperbola": {
        "f": (float, 1.0),
        "tau_max": (float, 1.0),
        "iters": (int, 25),
        "grid_n": (int, 4096),
        "samples": (int, 17),
        "tol": (float, 1e-10),
        "report": (str, None),
    },
    "spiral": {
        "B_e": (float, None),
        "u0": (float, 0.01),
        "tau_max": (float, None),
        "steps": (int, None),
        "samples": (int, 201),
        "prehistory": (str, "free"),
    },
    "compare-ld": {"grid": (_float_list, [0.0, 0.01, 0.1, 0.5, 1.0, 5.0, 10.0, 100.0, 1000.0])},
    "critical-field": {"q_si": (float, _si.e), "m0_si": (float, _si.m_e), "ratio": (float, 0.1)},
}

_HELP = {
    "table1": "Delta, mu_r and the fitted mu_r on a delta grid",
    "curves": "curve families (balance, f0, mass, delta, omega)",
    "hyperbola": "Picard iteration against the closed-form hyperbola",
    "spiral": "magnetic spiral: closed form versus memory-kernel solver",
    "compare-ld": "extended self-force versus the linear point-charge force",
    "critical-field": "SI field strength where r1 a reaches a given ratio",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="extcharge", description="Extended-charge self-force calculations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value file with model parameters and options")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--q", type=float, default=None, help="charge")
    common.add_argument("--m-inf", dest="m_inf", type=float, default=None, help="bare mass")
    common.add_argument("--r1", type=float, default=None, help="quasi-radius")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, options in _OPTIONS.items():
        p = sub.add_parser(name, parents=[common], help=_HELP[name])
        for key, (kind, _default) in options.items():
            flag = "--" + key.replace("_", "-")
            if name == "spiral" and key == "B_e":
                flag = "--B-e"
            if kind is _float_list:
                p.add_argument(flag, dest=key, type=str, default=None, metavar="LIST")
            elif key == "which":
                p.add_argument(flag, dest=key, choices=CURVES, default=None)
            elif key == "prehistory":
                p.add_argument(flag, dest=key, choices=("free", "steady"), default=None)
            else:
                p.add_argument(flag, dest=key, type=kind, default=None)
    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags, in increasing priority."""
    spec = _OPTIONS[args.command]
    config: dict[str, str] = {}
    if args.config:
        try:
            config = read_key_value(args.config)
        except (OSError, ConfigError) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from exc
    allowed = set(spec) | set(_MODEL_KEYS) | {"format"}
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise UsageError(f"config keys not used by {args.command!r}: {', '.join(unknown)}")

    def pick(key, kind, default):
        value = getattr(args, key, None)
        if value is not None:
            return kind(value) if kind is _float_list else value
        if key in config:
            try:
                return kind(config[key])
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from exc
        return default

    params = {k: pick(k, float, v) for k, v in zip(_MODEL_KEYS, (DEFAULT_MODEL.q, DEFAULT_MODEL.m_inf, DEFAULT_MODEL.r1))}
    try:
        model = ParticleModel(**params)
    except ValueError as exc:
        raise UsageError(f"invalid model: {exc}") from exc
    options = {k: pick(k, kind, default) for k, (kind, default) in spec.items()}
    fmt = args.format or config.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    return RunConfig(model=model, options=options, fmt=fmt, out=args.out)


def _curve_grid(opts: dict) -> list[float]:
    if opts["grid"] is not None:
        return opts["grid"]
    if opts["num"] < 1:
        raise UsageError("num must be at least 1")
    if opts["stop"] < opts["start"]:
        raise UsageError("grid range must be ordered: start <= stop")
    return [float(v) for v in np.linspace(opts["start"], opts["stop"], opts["num"])]


def _run(run: RunConfig, command: str) -> tuple[ResultTable, ResultTable | None]:
    o = run.options
    if command == "table1":
        return cmd_table1(o["grid"]), None
    if command == "curves":
        if o["which"] is None:
            raise UsageError("curves needs --which")
        default_mu1 = [0.05 * k for k in range(1, 10)] if o["which"] == "omega" else [0.1, 0.3, 0.5, 0.7, 0.9]
        mu1 = o["mu1"] if o["mu1"] is not None else default_mu1
        return cmd_curves(o["which"], _curve_grid(o), run.model, mu1, o["b"]), None
    if command == "hyperbola":
        return cmd_hyperbola(o["f"], o["tau_max"], o["iters"], o["grid_n"], o["samples"], o["tol"])
    if command == "spiral":
        return cmd_spiral(o["B_e"], o["u0"], o["tau_max"], o["steps"], o["samples"], o["prehistory"], run.model), None
    if command == "compare-ld":
        return cmd_compare_ld(o["grid"], run.model), None
    if command == "critical-field":
        return cmd_critical_field(o["q_si"], o["m0_si"], o["ratio"]), None
    raise UsageError(f"unknown command {command!r}")


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        run = _resolve(args)
        table, report = _run(run, args.command)
    except UsageError as exc:
        print(f"extcharge: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(render(table, run.fmt), run.out)
    if report is not None:
        target = run.options.get("report")
        if target is None:
            sys.stderr.write(render(report, run.fmt))
        else:
            _write(render(report, run.fmt), target)
    failed = not table.ok or (report is not None and not report.ok)
    return EXIT_NUMERICAL if failed else EXIT_OK
