import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from extcharge.particle import (
    ParticleModel,
    StructureFunction,
    bessel_k1,
    compton_quasi_radius,
    density,
    density_normalization,
    electrostatic_mass,
    electrostatic_mass_quadrature,
    mean_radius,
    mean_radius_quadrature,
    memory_function,
    memory_function_quadrature,
    structure_from_density,
    structure_function,
)


class TestParticleModel:
    def test_derived_quantities(self, model):
        assert model.m1 == pytest.approx(1 / (8 * math.pi), rel=1e-15)
        assert model.m0 == pytest.approx(model.m_inf + model.m1, rel=1e-15)
        assert model.mu1 == pytest.approx(1 / 3, rel=1e-14)
        assert model.mu1 == pytest.approx(model.r0 / model.r1, rel=1e-14)
        assert model.r_inf == pytest.approx(0.5, rel=1e-14)
        assert model.mean_r == pytest.approx(4 / math.pi, rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"q": 0.0, "m_inf": 1.0, "r1": 1.0},
            {"q": 1.0, "m_inf": 0.0, "r1": 1.0},
            {"q": 1.0, "m_inf": -0.01, "r1": 1.0},
            {"q": 1.0, "m_inf": 1.0, "r1": 0.0},
            {"q": math.inf, "m_inf": 1.0, "r1": 1.0},
        ],
    )
    def test_rejects_unphysical(self, kwargs):
        with pytest.raises(ValueError):
            ParticleModel(**kwargs)

    @given(st.floats(0.01, 0.99), st.floats(0.1, 10.0), st.floats(0.01, 100.0))
    def test_mu1_below_one(self, mu1, q, r1):
        m = ParticleModel.from_mu1(mu1, q=q, r1=r1)
        assert m.mu1 == pytest.approx(mu1, rel=1e-12)
        assert m.mu1 < 1 and m.r0 < m.r1

    def test_config_round_trip_stores_only_primaries(self, model):
        text = model.dumps()
        assert set(line.split("=")[0].strip() for line in text.splitlines()) == {"q", "m_inf", "r1"}
        assert ParticleModel.loads(text) == model

    def test_from_config_missing_key(self):
        with pytest.raises(KeyError):
            ParticleModel.from_config({"q": "1", "r1": "1"})

    def test_from_compton(self):
        m = ParticleModel.from_compton(q=0.3, m0=2.0)
        assert m.r1 == pytest.approx(0.25)
        assert m.m0 == pytest.approx(2.0, rel=1e-14)
        # m1 = q^2 m0 / (4 pi hbar)
        assert m.m1 == pytest.approx(0.3**2 * 2.0 / (4 * math.pi), rel=1e-14)


class TestStructureFunction:
    def test_values(self):
        assert structure_function(0.0, 2.0) == 1.0
        assert structure_function(0.5, 2.0) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        r1 = 0.7
        k = 1e6 / r1
        assert structure_function(k, r1) == pytest.approx(1 / (r1 * k), rel=1e-6)

    @given(st.floats(0, 1e3), st.floats(1e-3, 1e3))
    def test_even_and_decreasing(self, k, r1):
        assert structure_function(k, r1) == structure_function(-k, r1)
        assert structure_function(k * 1.1 + 1e-3, r1) < structure_function(k, r1)

    def test_wrapper(self):
        s = StructureFunction.rho1(2.0)
        assert s.family == "rho1" and s(0.0) == 1.0
        with pytest.raises(ValueError):
            StructureFunction.rho1(0.0)
        with pytest.raises(ValueError):
            structure_function(1.0, -1.0)


class TestBesselK1:
    def test_integral_oracle(self):
        assert bessel_k1(1.0, method="integral") == pytest.approx(0.6019072302, abs=1e-10)
        assert bessel_k1(10.0, method="integral") == pytest.approx(1.8649e-5, rel=1e-4)

    @pytest.mark.parametrize("x", [1e-6, 1e-3, 0.1, 0.5, 1.0, 1.9, 2.0, 3.0, 10.0, 50.0, 300.0])
    def test_against_reference(self, x):
        assert bessel_k1(x) == pytest.approx(special.k1(x), rel=1e-12)

    def test_small_argument(self):
        x = 1e-6
        assert x * bessel_k1(x) == pytest.approx(1.0, abs=1e-5)

    def test_branches_agree_around_crossover(self):
        xs = np.linspace(1.0, 4.0, 61)
        s = bessel_k1(xs, method="series")
        c = bessel_k1(xs, method="cf")
        np.testing.assert_allclose(s, c, rtol=1e-9)
        integral = bessel_k1(xs[::10], method="integral")
        np.testing.assert_allclose(c[::10], integral, rtol=1e-9)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            bessel_k1(x)

    def test_cf_refuses_small_x(self):
        with pytest.raises(ValueError):
            bessel_k1(0.5, method="cf")


class TestDensity:
    def test_formula(self):
        r, r1 = 0.8, 1.3
        expected = special.k1(r / r1) / (2 * math.pi**2 * r * r1**2)
        assert density(r, r1) == pytest.approx(expected, rel=1e-12)

    def test_normalization(self):
        assert density_normalization(1.0) == pytest.approx(1.0, abs=1e-8)

    def test_radial_density_at_origin(self):
        r1 = 2.0
        r = 1e-8 * r1
        assert 4 * math.pi * r**2 * r1 * density(r, r1) == pytest.approx(2 / math.pi, abs=1e-6)

    def test_rejects_origin(self):
        with pytest.raises(ValueError):
            density(0.0, 1.0)

    @pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
    def test_fourier_closure(self, k):
        r1 = 1.5
        assert structure_from_density(k / r1, r1) == pytest.approx(structure_function(k / r1, r1), abs=1e-6)


class TestRadiiAndMasses:
    def test_mean_radius(self):
        assert mean_radius(1.0) == pytest.approx(1.27324, abs=1e-5)
        assert mean_radius(math.pi / 4) == pytest.approx(1.0, rel=1e-15)
        assert mean_radius_quadrature(1.0) == pytest.approx(4 / math.pi, abs=1e-8)
        assert mean_radius_quadrature(3.0) == pytest.approx(mean_radius(3.0), abs=1e-8)

    def test_electrostatic_mass(self):
        assert electrostatic_mass(1.0, 1.0) == pytest.approx(0.0397887, abs=1e-7)
        assert electrostatic_mass(2.0, 1.0) == pytest.approx(4 * electrostatic_mass(1.0, 1.0), rel=1e-15)
        assert electrostatic_mass(1.0, 2.0) == pytest.approx(electrostatic_mass(1.0, 1.0) / 2, rel=1e-15)

    @pytest.mark.parametrize("q, r1", [(1.0, 1.0), (0.5, 3.0), (2.0, 0.01)])
    def test_mass_from_structure_quadrature(self, q, r1):
        got = electrostatic_mass_quadrature(q, StructureFunction.rho1(r1))
        assert got == pytest.approx(electrostatic_mass(q, r1), abs=1e-9)

    def test_custom_structure_function(self):
        # a Gaussian profile: int exp(-k^2) dk = sqrt(pi)
        s = StructureFunction(lambda k: np.exp(-0.5 * np.asarray(k) ** 2))
        assert electrostatic_mass_quadrature(1.0, s) == pytest.approx(math.sqrt(math.pi) / (8 * math.pi**2), rel=1e-9)

    def test_compton(self):
        assert compton_quasi_radius(1.0, 1.0) == 0.5
        assert compton_quasi_radius(2.0, 0.0) == 0.0
        with pytest.raises(ValueError):
            ParticleModel.from_compton(1.0, 1.0, hbar=0.0)
        with pytest.raises(ValueError):
            compton_quasi_radius(0.0)


class TestMemoryFunction:
    def test_values(self, model):
        assert memory_function(0.0, model) == pytest.approx(model.m1, rel=1e-15)
        assert memory_function(model.r1, model) == pytest.approx(model.m1 / math.e, rel=1e-15)
        assert memory_function(-2.0, model) == memory_function(2.0, model)

    @pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 7.0])
    def test_cosine_transform(self, model, t):
        got = memory_function_quadrature(t, model.q, model.structure)
        assert got == pytest.approx(model.m1 * math.exp(-t / model.r1), abs=1e-8)
