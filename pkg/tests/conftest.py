import math

import pytest

from extcharge.particle import ParticleModel

# Reference values of Delta, mu_r and the fitted mu_r on the tabulated grid.
# Delta and mu_r come from 30-digit mpmath quadrature of the lab-time
# integral (see test_selfforce.py::test_mpmath_oracle_reproduces_frozen
# for a live recomputation); mu_r_approx is algebraic.
FROZEN_DELTA = {
    0.01: 0.010000000001510637,
    0.1: 0.09999900877164535,
    0.2: 0.19953021149256472,
    0.5: 0.46246573818,
    1.0: 0.7418125260252231,
    5.0: 1.25829154672,
    10.0: 1.36791727755,
    100.0: 1.48529318927,
    1000.0: 1.49850408206291,
}
FROZEN_MU_R_APPROX = {
    0.1: 1.3859072570616204e-05,
    0.2: 0.0023737627427463004,
    0.5: 0.07404037013389946,
    1.0: 0.25819632744017523,
    5.0: 0.7511106549955183,
    10.0: 0.8649745769357446,
    100.0: 0.9852695459494162,
}


@pytest.fixture(scope="session")
def model():
    """q = 1, r1 = 1, m_inf = 2 m1, hence mu1 = 1/3 and r0 = 1/3."""
    return ParticleModel(q=1.0, m_inf=1.0 / (4.0 * math.pi), r1=1.0)
