import math

import numpy as np
import pytest

from ap_dynamics.exception.errors import DomainError, EligibilityError
from ap_dynamics.melnikov.homoclinic import homoclinic_orbit
from ap_dynamics.model.catalog import get_nonlinearity

SQRT1P = get_nonlinearity("sqrt1p")


@pytest.fixture(scope="module")
def q():
    return homoclinic_orbit(SQRT1P, 2.0)


def test_homoclinic_endpoints(q):
    assert q.q(0.0) == pytest.approx(q.frame.x_h, abs=1e-9)
    assert q.velocity(0.0) == pytest.approx(0.0, abs=1e-7)
    assert q.q(60.0) == pytest.approx(q.frame.x_u, abs=1e-12)


def test_homoclinic_stays_on_the_saddle_level(q):
    t = np.linspace(-20.0, 20.0, 401)
    energy = 0.5 * q.velocity(t) ** 2 + q.frame.phi(q.q(t))
    assert np.max(np.abs(energy - q.frame.phi_at_xu)) < 1e-8


def test_homoclinic_symmetry(q):
    t = np.linspace(0.1, 15.0, 50)
    assert np.allclose(q.q(t), q.q(-t))
    assert np.allclose(q.velocity(t), -q.velocity(-t))
    assert np.all(q.velocity(t) < 0)


def test_tail_decays_at_the_saddle_rate(q):
    assert q.lam == pytest.approx(math.sqrt(2.0 * math.sqrt(2.0) / 3.0))
    far = q.t_tail + 5.0
    assert q.qtilde(far + 1.0) / q.qtilde(far) == pytest.approx(math.exp(-q.lam), rel=1e-12)


def test_qtilde_integral_splits(q):
    total = q.qtilde_integral()
    assert q.qtilde_integral(0.0, 3.0) + q.qtilde_integral(3.0) == pytest.approx(total, rel=1e-12)
    assert total > 0


def test_homoclinic_needs_smooth_f_and_positive_k():
    with pytest.raises(EligibilityError):
        homoclinic_orbit(get_nonlinearity("abs"), 2.0)
    with pytest.raises(DomainError):
        homoclinic_orbit(SQRT1P, 0.0)
