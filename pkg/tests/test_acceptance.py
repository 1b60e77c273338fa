"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Reference numbers below are the tabulated reference values.  Where they are known to
disagree with an accurate evaluation the test still checks against them, so
the disagreement shows up as a failure rather than being tuned away.
"""
import math
import random
from fractions import Fraction
import time

import numpy as np
import pytest

from extcharge.balance import critical_field
from extcharge.cli import cmd_table1
from extcharge.hyperbolic import hyperbola_arrays, picard_iterate, translation_invariance_check
from extcharge.lorentzdirac import LDState, compare_selfforce, ld_selfforce
from extcharge.magnetic import (
    MemoryKernel,
    magnetic_force,
    memory_ode_solve,
    omega_closed_form,
    omega_from_characteristic,
    omega_residual,
    switched,
)
from extcharge.numerics import sum_series
from extcharge.particle import (
    ParticleModel,
    StructureFunction,
    density_normalization,
    electrostatic_mass,
    electrostatic_mass_quadrature,
    mean_radius,
    mean_radius_quadrature,
    memory_function,
    memory_function_quadrature,
)
from extcharge.selfforce import (
    WorldlineHistory,
    delta_fn,
    delta_series,
    delta_series_coefficient,
    f_n,
    selfforce_second,
)

MODEL = ParticleModel(q=1.0, m_inf=1.0 / (4.0 * math.pi), r1=1.0)

# reference (delta, Delta, mu_r, mu_r_approx) rows
REFERENCE_TABLE = [
    (0.0, 0.0, 0.0, 0.0),
    (0.1, 0.099999, 0.000010, 0.000014),
    (0.2, 0.1995, 0.00236, 0.00237),
    (0.5, 0.4624, 0.0752, 0.0740),
    (1.0, 0.7418, 0.2582, 0.2582),
    (5.0, 1.2577, 0.7485, 0.7511),
    (10.0, 1.3667, 0.8633, 0.8650),
    (100.0, 1.4719, 0.98528, 0.98527),
]


class Criterion:
    """Collects named checks and prints one summary line for the criterion."""

    def __init__(self, number, title, capsys):
        self.number, self.title, self.capsys = number, title, capsys
        self.failures = []

    def check(self, ok, label):
        if not ok:
            self.failures.append(label)

    def finish(self):
        verdict = "PASS" if not self.failures else "FAIL"
        line = f"[acceptance {self.number:2d}] {verdict}: {self.title}"
        if self.failures:
            line += " | failed: " + "; ".join(self.failures)
        with self.capsys.disabled():
            print("\n" + line)
        assert not self.failures, line


def close(a, b, tol):
    return abs(a - b) <= tol


def test_criterion_01_table_regression(capsys):
    c = Criterion(1, "reference delta table rows within 1e-4 (1e-6 at delta = 0.1), under 10 s", capsys)
    start = time.perf_counter()
    table = cmd_table1([row[0] for row in REFERENCE_TABLE])
    elapsed = time.perf_counter() - start
    c.check(table.ok, "row status")
    c.check(elapsed < 10.0, f"runtime {elapsed:.2f} s")
    names = ("Delta", "mu_r", "mu_r_approx")
    for got, want in zip(table.rows, REFERENCE_TABLE):
        tol = 1e-6 if want[0] == 0.1 else 1e-4
        for name, g, w in zip(names, got[1:], want[1:]):
            if not close(g, w, tol):
                c.check(False, f"{name}({want[0]:g}) = {g:.6f} vs {w}")
    c.finish()


def test_criterion_02_series_cross_check(capsys):
    c = Criterion(2, "series and quadrature agree within 1e-4; weight sum 1.5 within 1e-10", capsys)
    for d in (0.1, 0.5, 1.0, 5.0, 10.0):
        s, q = delta_series(d), delta_fn(d)
        c.check(close(s, q, 1e-4), f"delta = {d}: {s} vs {q}")
    for n in range(8):
        exact = Fraction(6 * (1 + n), math.factorial(3 + 2 * n))
        c.check(close(delta_series_coefficient(n), float(exact), 1e-16 * float(exact)), f"coefficient {n}")

    def weighted(n):
        # exact rational product; the float coefficient underflows long before the sum converges
        return float(Fraction(6 * (1 + n), math.factorial(3 + 2 * n)) * math.factorial(2 * n))

    total = sum_series(weighted, 1e-12, extrapolate=True)
    c.check(close(total, 1.5, 1e-10), f"weight sum {total!r}")
    c.finish()


def test_criterion_03_asymptotes(capsys):
    c = Criterion(3, "small-delta slope, saturation and factorial limit of f_n", capsys)
    c.check(close(delta_fn(0.01) / 0.01, 1.0, 0.01), "Delta/delta at 0.01")
    c.check(close(delta_fn(1e3), 1.5, 0.03 * 1.5), "Delta(1e3)")
    for n in range(5):
        value = f_n(n, 1e6)
        c.check(close(value / math.factorial(n), 1.0, 1e-3), f"f_{n}(1e6) = {value}")
    c.finish()


def test_criterion_04_history_integral_equivalence(capsys):
    c = Criterion(4, "history-integral self-force on the hyperbola equals -(m1/r1) Delta within 1e-5", capsys)
    for d in (0.1, 1.0, 10.0):
        f = d / MODEL.r1
        got = selfforce_second(WorldlineHistory.hyperbolic(f), MODEL)[0]
        want = -(MODEL.m1 / MODEL.r1) * delta_fn(d)
        c.check(close(got / want, 1.0, 1e-5), f"delta = {d}: {got} vs {want}")
    c.finish()


def test_criterion_05_picard(capsys):
    c = Criterion(5, "Picard iterates reach 1e-8 within 25 iterations and match the first four polynomials", capsys)
    res = picard_iterate(1.0, 1.0, grid_n=4096, iters=25)
    c.check(bool(np.any(res.distances < 1e-8)), f"best distance {res.distances.min():.2e}")
    tau = res.taus
    expected = [
        (tau, 0 * tau),
        (tau, tau**2 / 2),
        (tau + tau**3 / 6, tau**2 / 2),
        (tau + tau**3 / 6, tau**2 / 2 + tau**4 / 24),
    ]
    # trapezoid error of the nested integrals: h^2/12 times the curvature, times tau_max^2
    h = tau[1] - tau[0]
    budget = 2 * h * h
    for k, (t, x) in enumerate(expected):
        z = res.iterates[k]
        err = max(np.max(np.abs(z[:, 0] - t)), np.max(np.abs(z[:, 1] - x)))
        c.check(err < budget, f"iterate {k + 1} error {err:.2e}")
    c.finish()


def test_criterion_06_translation_invariance(capsys):
    c = Criterion(6, "rebased hyperbola defect below 1e-10 over 1000 random samples", capsys)
    rng = random.Random(20261014)
    worst = max(
        translation_invariance_check(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(1000)
    )
    c.check(worst < 1e-10, f"max defect {worst:.2e}")
    c.finish()


def test_criterion_07_complex_frequency(capsys):
    c = Criterion(7, "frequency residuals, reference limits and two-path agreement", capsys)
    worst = 0.0
    for mu1 in np.arange(1, 10) * 0.05:
        for b in (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0):
            worst = max(worst, abs(omega_residual(omega_closed_form(mu1, b).Omega, mu1, b)))
            if b in (0.1, 1.0, 10.0):
                model = ParticleModel.from_mu1(mu1)
                a = omega_closed_form(mu1, b).Omega
                other = omega_from_characteristic(mu1, b, model).Omega
                c.check(abs(a - other) < 1e-10 * abs(a), f"two paths at mu1={mu1:.2f}, b={b}")
    c.check(worst < 1e-12, f"max residual {worst:.1e}")
    c.check(omega_closed_form(0.3, 0.0).omega == 0, "no field gives omega = 0")
    mu1, b = 1e-4, 1.0
    weak = omega_closed_form(mu1, b).Omega
    reference = 1 + (1 + 1j / b) * mu1
    c.check(abs(weak - reference) < 1e-6, f"weak self-force limit off by {abs(weak - reference):.1e}")
    strong = omega_closed_form(0.3, 1e6).Omega
    c.check(abs(strong - 1 / 0.7) < 1e-4, "strong-field limit")
    c.finish()


def test_criterion_08_memory_solver(capsys):
    c = Criterion(8, "memory-kernel solver: conservation, attractor, no pre- but postacceleration", capsys)
    kernel = MemoryKernel(m_inf=1.0, m1=0.0, r1=1.0)
    period = 2 * math.pi
    free = memory_ode_solve(magnetic_force(1.0), kernel, 0.01, (0.0, 10 * period), 4000)
    drift = np.max(np.abs(np.abs(free.u) - 0.01)) / 0.01
    c.check(drift < 1e-8, f"speed drift {drift:.1e}")

    freq = omega_closed_form(MODEL.mu1, 0.1, r0=MODEL.r0)
    qB = MODEL.m0 * freq.omega0
    tau_end = 20 * MODEL.r1 / MODEL.mu1
    traj = memory_ode_solve(magnetic_force(qB), MODEL, 0.01, (0.0, tau_end), 8000)
    rate = traj.accel[-1] / traj.u[-1]
    dev = abs(rate - 1j * freq.omega) / abs(freq.omega)
    c.check(dev < 1e-3, f"attractor deviation {dev:.1e}")

    on = memory_ode_solve(switched(magnetic_force(qB), on=0.0), MODEL, 0.01, (-5.0, 5.0), 1000)
    c.check(bool(np.all(on.accel[on.taus < 0] == 0)), "acceleration before the force is switched on")

    off = 5.0
    cut = memory_ode_solve(switched(magnetic_force(qB), on=0.0, off=off), MODEL, 0.01, (0.0, off + 10.0), 3000)
    after = np.abs(cut.accel[cut.taus >= off])
    c.check(after[0] > 1e-4 and after[-1] < 1e-3 * after[0], "postacceleration present and decaying")
    c.finish()


def test_criterion_09_structure_quadratures(capsys):
    c = Criterion(9, "mass, mean radius, normalisation and memory function against quadrature", capsys)
    structure = StructureFunction.rho1(MODEL.r1)
    m_quad = electrostatic_mass_quadrature(MODEL.q, structure)
    c.check(close(m_quad, electrostatic_mass(MODEL.q, MODEL.r1), 1e-9), f"mass {m_quad}")
    c.check(close(mean_radius_quadrature(MODEL.r1), mean_radius(MODEL.r1), 1e-8), "mean radius")
    c.check(close(density_normalization(MODEL.r1), 1.0, 1e-8), "normalisation")
    for t in (0.0, 0.5, 2.0):
        q_val = memory_function_quadrature(t, MODEL.q, structure)
        c.check(close(q_val, float(memory_function(t, MODEL)), 1e-8), f"memory function at t = {t}")
    c.finish()


def test_criterion_10_critical_field(capsys):
    from scipy import constants

    c = Criterion(10, "positron critical field and acceleration within 5%", capsys)
    E, a = critical_field(constants.e, constants.m_e)
    c.check(close(E / 2.6e17, 1.0, 0.05), f"E = {E:.3e} V/m")
    c.check(close(a / 4.6e28, 1.0, 0.05), f"a = {a:.3e} m/s^2")
    c.finish()


def test_criterion_11_point_charge_foil(capsys):
    c = Criterion(11, "point-charge force: 4/3 mass term, 3/4 ratio, bounded extended force", capsys)
    a = np.array([0.0, 0.7])
    state = LDState(u=np.array([1.0, 0.0]), a=a, a_dot=np.zeros(2))
    c.check(bool(np.all(ld_selfforce(state, MODEL) == -(4.0 / 3.0) * MODEL.m1 * a)), "zero-jerk force")
    rows = compare_selfforce([0.0, 1e-3, 0.01, 0.1, 1.0, 5.0, 10.0, 100.0, 1000.0], MODEL)
    c.check(close(rows[2][3], 0.75, 1e-3), f"ratio at 0.01 = {rows[2][3]}")
    bound = 1.5 * MODEL.m1 / MODEL.r1
    c.check(all(abs(r[1]) <= bound for r in rows), "extended force bound")
    c.finish()
