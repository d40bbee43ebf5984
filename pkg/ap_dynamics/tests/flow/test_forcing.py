import math

import numpy as np
import pytest

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.forcing import Constant, Periodic, Step
from ap_dynamics.flow.waveforms import get_waveform, waveform_names
from ap_dynamics.model.catalog import get_nonlinearity


def test_step_values_and_period():
    s = Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0)
    assert s.period == 15.0
    assert s.p(0.0) == 0.0
    assert s.p(1.999) == 0.0
    assert s.p(2.0) == 2.0
    assert s.p(16.0) == 0.0
    assert s.p(-1.0) == 2.0


def test_step_switch_times():
    s = Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0)
    assert s.switch_times(0.0, 30.0) == [2.0, 15.0, 17.0]
    assert s.switch_times(2.0, 15.0) == []


@pytest.mark.parametrize("kwargs", [
    dict(k1=1.0, k2=1.0, t1=1.0, t2=1.0),
    dict(k1=0.0, k2=2.0, t1=0.0, t2=1.0),
    dict(k1=0.0, k2=2.0, t1=1.0, t2=1.0, c=-0.1),
])
def test_step_rejects(kwargs):
    with pytest.raises(DomainError):
        Step(**kwargs)


def test_periodic_forcing():
    p = Periodic(k=2.0, eps=0.01, omega=10.0)
    assert p.period == pytest.approx(2.0 * math.pi / 10.0)
    assert p.p(math.pi / 20.0) == pytest.approx(2.01)
    assert Constant(k=2.0).period is None


def test_periodic_rejects_bad_omega_and_unknown_waveform():
    with pytest.raises(DomainError):
        Periodic(k=2.0, eps=0.01, omega=0.0)
    with pytest.raises(ValueError, match="Unsupported waveform"):
        Periodic(k=2.0, eps=0.01, omega=1.0, p0="square")


def test_rhs_is_vectorized():
    field = Constant(k=2.0, c=0.5).rhs(get_nonlinearity("abs"))
    dz = field(0.0, np.array([[-1.0, 3.0], [2.0, 0.0]]))
    assert np.allclose(dz, [[2.0, 0.0], [-1.0 - 1.0 + 2.0, -3.0 + 2.0]])


@pytest.mark.parametrize("name", waveform_names())
def test_waveforms_have_zero_mean(name):
    assert abs(get_waveform(name).mean()) < 1e-12


def test_waveform_scaling():
    w = get_waveform("sin").scaled(omega=2.0, amplitude=3.0)
    assert w.period == pytest.approx(math.pi)
    assert float(w(math.pi / 4.0)) == pytest.approx(3.0)
    assert float(w.derivative(0.0)) == pytest.approx(6.0)
    assert w.sup_norm() == pytest.approx(3.0, abs=1e-6)
    assert get_waveform("zero").is_constant()
    assert not get_waveform("sin_sin2").is_constant()
