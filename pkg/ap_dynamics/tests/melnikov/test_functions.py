import math

import numpy as np
import pytest

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.waveforms import get_waveform
from ap_dynamics.melnikov.functions import (
    critical_points,
    delta,
    delta_damped,
    detect_zeros,
    eta,
    omega_threshold,
    sample_delta,
    threshold_margin,
    xi_partial_sums,
)
from ap_dynamics.melnikov.homoclinic import homoclinic_orbit
from ap_dynamics.model.catalog import get_nonlinearity


@pytest.fixture(scope="module")
def q():
    return homoclinic_orbit(get_nonlinearity("sqrt1p"), 2.0)


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_delta_closed_form(q, omega):
    p0 = get_waveform("sin").scaled(omega)
    alphas = np.linspace(0.0, p0.period, 32, endpoint=False)
    numeric = np.array([delta(q, p0, float(a)).value for a in alphas])
    closed = -2.0 * omega * np.cos(omega * alphas) * eta(q, omega)
    scale = np.max(np.abs(closed))
    assert np.max(np.abs(numeric - closed)) <= 1e-6 * scale


def test_delta_tail_bound_is_tiny(q):
    value = delta(q, get_waveform("sin"), 0.3)
    assert value.tail_bound < 1e-13
    assert float(value) == value.value


def test_eta_positive_and_decreasing(q):
    omegas = np.linspace(0.1, 10.0, 100)
    values = np.array([eta(q, w) for w in omegas])
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


def test_eta_at_low_frequency(q):
    assert eta(q, 1e-3) == pytest.approx(q.qtilde_integral(), rel=1e-4)
    with pytest.raises(DomainError):
        eta(q, 0.0)


def test_xi_positive_and_decreasing(q):
    values = xi_partial_sums(q, 1.0, 10)
    assert len(values) == 11
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


def test_sin_zeros(q):
    p0 = get_waveform("sin")
    alphas, values = sample_delta(q, p0, n=64)
    report = detect_zeros(alphas, values, p0.period, q=q, p0=p0)
    assert [z.alpha for z in report.simple_zeros] == pytest.approx([math.pi / 2.0, 3.0 * math.pi / 2.0], abs=1e-8)
    assert report.sign_change and not report.identically_zero
    assert len(report.evidence) == 3
    assert report.critical_points == pytest.approx([math.pi / 2.0, 3.0 * math.pi / 2.0], abs=1e-10)


def test_zero_forcing_is_identically_zero(q):
    p0 = get_waveform("zero")
    alphas, values = sample_delta(q, p0, n=64)
    report = detect_zeros(alphas, values, p0.period, q=q, p0=p0)
    assert report.identically_zero
    assert report.simple_zeros == []
    assert "disclaimer" in report.as_dict()


def test_zero_detection_needs_enough_samples():
    with pytest.raises(DomainError):
        detect_zeros(np.linspace(0.0, 1.0, 10), np.zeros(10), 1.0)


def test_damping_shifts_delta(q):
    p0 = get_waveform("sin")
    free = delta(q, p0, 0.7).value
    damped = delta_damped(q, p0, 0.7, c0=0.1).value
    assert damped < free
    assert critical_points(get_waveform("cos")) == pytest.approx([0.0, math.pi], abs=1e-10)


def test_omega_threshold(q):
    p0 = get_waveform("sin")
    threshold = omega_threshold(q, p0)
    assert threshold.omega0 > 0
    assert threshold.upper.delta_w == pytest.approx(0.5)
    left, right = threshold_margin(q, p0, threshold.upper, 0.5 * threshold.upper.omega)
    assert left > right
    with pytest.raises(DomainError):
        omega_threshold(q, get_waveform("zero"))
