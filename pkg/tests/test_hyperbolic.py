import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FROZEN_DELTA
from extcharge.balance import delta_infinity_of_delta
from extcharge.hyperbolic import (
    HyperbolicWorldline,
    hyperbola,
    hyperbola_arrays,
    hyperbola_velocity,
    picard_iterate,
    position_time_law,
    selfforce_hyperbolic,
    time_of_position,
    translation_invariance_check,
)
from extcharge.particle import ParticleModel
from extcharge.selfforce import delta_fn


class TestClosedForm:
    def test_origin_and_free_motion(self):
        assert tuple(hyperbola(1.3, 0.0)) == (0.0, 0.0)
        assert tuple(hyperbola(0.0, 2.5)) == (2.5, 0.0)

    def test_series_branch_continuity(self):
        f = 1.0
        for tau in (0.999e-6, 1.001e-6):
            t, x = hyperbola(f, tau)
            assert t == pytest.approx(math.sinh(tau), rel=1e-14)
            assert x == pytest.approx(tau * tau / 2 * (1 + tau * tau / 12), rel=1e-9)

    def test_tiny_field_against_taylor(self):
        t, x = hyperbola(1e-9, 3.0)
        assert t == pytest.approx(3.0, rel=1e-15)
        assert x == pytest.approx(0.5e-9 * 9.0, rel=1e-12)

    @settings(max_examples=200)
    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_unit_velocity(self, f, tau):
        u = hyperbola_velocity(f, tau)
        assert abs(u.t**2 - u.x**2 - 1.0) < 1e-12 * u.t**2

    @pytest.mark.parametrize("f", [0.5, 1.0, 2.0])
    def test_finite_difference_motion(self, f):
        taus = np.linspace(-1, 1, 2001)
        h = 1e-4
        tp, xp = hyperbola_arrays(f, taus + h)
        tm, xm = hyperbola_arrays(f, taus - h)
        t0, x0 = hyperbola_arrays(f, taus)
        ut, ux = (tp - tm) / (2 * h), (xp - xm) / (2 * h)
        at, ax = (tp - 2 * t0 + tm) / h**2, (xp - 2 * x0 + xm) / h**2
        # central differences carry O(h^2) truncation and O(eps/h^2) round-off
        assert np.max(np.abs(ut**2 - ux**2 - 1)) < 1e-7
        assert np.max(np.abs(at * ut - ax * ux)) < 1e-5
        assert np.max(np.abs(at**2 - ax**2 + f**2)) < 1e-5

    def test_worldline_object(self):
        w = HyperbolicWorldline(0.8)
        cols = w.samples([0.0, 0.5, 1.0])
        assert set(cols) == {"tau", "t", "x", "u0", "u1"}
        assert np.allclose(cols["u0"] ** 2 - cols["u1"] ** 2, 1.0, atol=1e-14)
        a = w.acceleration(0.5)
        u = w.velocity(0.5)
        assert abs(a.t * u.t - a.x * u.x) < 1e-14
        assert np.isclose(a.t**2 - a.x**2, -0.64)

    @settings(max_examples=100)
    @given(st.floats(0.05, 5), st.floats(-5, 5))
    def test_worldline_obeys_position_time_law(self, f, tau):
        t, x = hyperbola(f, tau)
        assert position_time_law(f, t) == pytest.approx(x, rel=1e-10, abs=1e-13)


class TestPositionTimeLaw:
    def test_origin(self):
        assert position_time_law(2.0, 0.0) == 0.0

    def test_small_time(self):
        f = 1.5
        for t in np.linspace(-0.1 / f, 0.1 / f, 11)[[0, 1, 2, 3, 4, 6, 7, 8, 9, 10]]:
            assert position_time_law(f, t) == pytest.approx(f * t * t / 2, rel=0.01)

    @settings(max_examples=200)
    @given(st.floats(0.01, 10), st.floats(-100, 100))
    def test_round_trip(self, f, t):
        x = position_time_law(f, t)
        back = time_of_position(f, x, sign=t)
        assert back == pytest.approx(t, rel=1e-10, abs=1e-12)
        assert position_time_law(f, back) == pytest.approx(x, rel=1e-12, abs=1e-15)

    def test_zero_field_rejected(self):
        with pytest.raises(ValueError):
            position_time_law(0.0, 1.0)
        with pytest.raises(ValueError):
            time_of_position(0.0, 1.0)

    def test_arrays(self):
        out = position_time_law(1.0, np.array([0.0, 1.0]))
        assert out.shape == (2,)
        assert out[1] == pytest.approx(math.sqrt(2) - 1)


@pytest.fixture(scope="module")
def picard():
    return picard_iterate(1.0, 1.0, grid_n=4096, iters=25)


class TestPicard:
    def test_first_iterates(self, picard):
        tau = picard.taus
        f = 1.0
        # trapezoid error on polynomials of degree <= 4 at h = 1/4096
        budget = 1e-7
        expected = [
            (tau, 0 * tau),
            (tau, f * tau**2 / 2),
            (tau + f**2 * tau**3 / 6, f * tau**2 / 2),
            (tau + f**2 * tau**3 / 6, f * tau**2 / 2 + f**3 * tau**4 / 24),
        ]
        for z, (t, x) in zip(picard.iterates, expected):
            assert np.max(np.abs(z[:, 0] - t)) < budget
            assert np.max(np.abs(z[:, 1] - x)) < budget

    def test_first_iterate_is_exact(self, picard):
        np.testing.assert_allclose(picard.iterates[0][:, 0], picard.taus, rtol=0, atol=1e-15)
        assert np.all(picard.iterates[0][:, 1] == 0)

    def test_converges_to_hyperbola(self, picard):
        assert picard.converged
        assert picard.distances[-1] < 1e-8
        assert picard.grid_error < 1e-8

    def test_monotone_sup_norm(self, picard):
        d = picard.distances
        stop = int(np.argmax(d < 1e-8))  # beyond this only the grid error is left
        assert np.all(np.diff(d[: stop + 1]) < 0)

    def test_contraction_reported(self, picard):
        c = picard.contraction[:10]
        assert np.all(c < 1)
        # factorial decay: the step ratios keep shrinking
        assert np.all(np.diff(c[1:]) < 0)

    def test_future_directed_velocities(self, picard):
        for u in picard.velocities:
            assert np.all(u[:, 0] >= 1.0)

    def test_free_motion(self):
        res = picard_iterate(0.0, 2.0, grid_n=64, iters=5)
        assert res.converged_at == 1
        assert res.distances[0] < 1e-15

    def test_large_interval_reports_not_raises(self):
        res = picard_iterate(1.0, 10.0, grid_n=256, iters=5, richardson=False)
        assert not res.converged and res.grid_error is None

    def test_preconditions(self):
        with pytest.raises(ValueError):
            picard_iterate(1.0, 1.0, grid_n=8)
        with pytest.raises(ValueError):
            picard_iterate(1.0, 1.0, iters=0)
        with pytest.raises(ValueError):
            picard_iterate(1.0, -1.0)


class TestTranslationInvariance:
    def test_identity(self):
        assert translation_invariance_check(1.7, 0.0, 0.4) == 0.0

    def test_worked(self):
        assert translation_invariance_check(1.0, 0.7, 0.3) < 1e-12

    @settings(max_examples=1000)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
    def test_sweep(self, f, tau1, probe):
        assert translation_invariance_check(f, tau1, probe) < 1e-10


class TestSelfforceHyperbolic:
    def test_zero(self, model):
        assert selfforce_hyperbolic(0.0, model) == 0.0

    @pytest.mark.parametrize("delta", sorted(FROZEN_DELTA))
    def test_matches_frozen_values(self, model, delta):
        f = delta / model.r1
        expected = -(model.m1 / model.r1) * FROZEN_DELTA[delta]
        assert selfforce_hyperbolic(f, model) == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("f", [0.03, 0.4, 2.0, 25.0])
    def test_agrees_with_lab_time_path(self, f):
        m = ParticleModel.from_mu1(0.2, r1=1.7)
        assert selfforce_hyperbolic(f, m) == pytest.approx(-(m.m1 / m.r1) * delta_fn(m.r1 * f), rel=1e-9)

    def test_opposes_external_force(self, model):
        assert selfforce_hyperbolic(0.5, model) < 0
        assert selfforce_hyperbolic(-0.5, model) == -selfforce_hyperbolic(0.5, model)

    def test_saturation(self, model):
        f = 1e3 / model.r1
        assert selfforce_hyperbolic(f, model) == pytest.approx(-1.5 * model.m1 / model.r1, rel=0.03)

    @pytest.mark.parametrize("delta", [0.1, 1.0, 10.0])
    def test_balance_composition(self, model, delta):
        f = delta / model.r1
        # m_inf a = F_e + F_s with a = f and F_e = m0 f_0 = m0 (r0 ... ) expressed as m_inf f_inf
        f_inf = (model.m_inf * f - selfforce_hyperbolic(f, model)) / model.m_inf
        assert model.r1 * f_inf == pytest.approx(delta_infinity_of_delta(delta, model), rel=1e-9)
