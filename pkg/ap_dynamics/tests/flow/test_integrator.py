import math

import numpy as np
import pytest

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.flow.ensemble import EnsembleFlow
from ap_dynamics.flow.forcing import Constant, Step
from ap_dynamics.flow.integrator import FlowIntegrator, integrate
from ap_dynamics.model.catalog import get_nonlinearity
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.levels import classify_level


def _loop_points(frame: EnergyFrame, count: int, seed: int) -> np.ndarray:
    """Points strictly inside the homoclinic loop."""
    rng = np.random.default_rng(seed)
    width = frame.x_h - frame.x_u
    xs = rng.uniform(frame.x_u + 0.2 * width, frame.x_h - 0.2 * width, size=count)
    room = frame.phi_at_xu - 0.05 - frame.phi(xs)
    ys = rng.uniform(-0.5, 0.5, size=count) * np.sqrt(2.0 * np.maximum(room, 0.0))
    return np.column_stack([xs, ys])


@pytest.mark.parametrize("name", ["abs", "sqrt1p"])
def test_energy_conservation(name):
    f = get_nonlinearity(name)
    frame = EnergyFrame.of(f, 2.0)
    integrator = FlowIntegrator(f, Constant(k=2.0))
    for z0 in _loop_points(frame, 20, seed=3):
        trajectory = integrator.integrate(z0, (0.0, 50.0))
        assert not trajectory.blowup
        e0 = float(frame.energy(*z0))
        drift = np.abs(frame.energy(trajectory.z[:, 0], trajectory.z[:, 1]) - e0)
        assert np.max(drift) / max(1.0, abs(e0)) < 1e-7


def test_breakpoint_crossings_are_events():
    f = get_nonlinearity("abs")
    trajectory = integrate(f, Constant(k=2.0), (-1.0, 0.0), (0.0, 2.0 * math.pi))
    crossings = [event for event in trajectory.events if event.kind == "breakpoint"]
    assert len(crossings) == 2
    assert crossings[0].t == pytest.approx(math.acosh(2.0), abs=1e-8)
    assert crossings[0].point.x == 0.0


def test_switches_are_recorded():
    trajectory = integrate(get_nonlinearity("abs"), Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0), (1.0, 0.0), (0.0, 20.0))
    switches = [event.t for event in trajectory.events if event.kind == "switch"]
    assert switches == [2.0, 15.0, 17.0]


def test_dense_output():
    trajectory = integrate(get_nonlinearity("sqrt1p"), Constant(k=2.0), (1.0, 0.0), (0.0, 5.0))
    assert trajectory(5.0) == pytest.approx(np.array(trajectory.final), abs=1e-9)
    assert trajectory(np.linspace(0.0, 5.0, 7)).shape == (2, 7)


def test_blowup_is_flagged():
    trajectory = integrate(get_nonlinearity("abs"), Constant(k=2.0), (-10.0, -10.0), (0.0, 100.0))
    assert trajectory.blowup
    assert trajectory.events[-1].kind == "blowup"
    assert trajectory.t_end < 100.0


def test_ensemble_matches_single_integration():
    f = get_nonlinearity("sqrt1p")
    frame = EnergyFrame.of(f, 2.0)
    points = _loop_points(frame, 6, seed=5)
    result = EnsembleFlow(f, Constant(k=2.0)).flow(points, 0.0, 7.0)
    for z0, z1 in zip(points, result.points):
        single = integrate(f, Constant(k=2.0), z0, (0.0, 7.0)).final
        assert z1 == pytest.approx(np.array(single), abs=1e-7)


def test_ensemble_is_independent_of_threads():
    f = get_nonlinearity("abs")
    points = _loop_points(EnergyFrame.of(f, 2.0), 9, seed=8)
    forcing = Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0)
    serial = EnsembleFlow(f, forcing, settings=RuntimeSettings(threads=1, chunk_size=2)).flow(points, 0.0, 15.0)
    parallel = EnsembleFlow(f, forcing, settings=RuntimeSettings(threads=4, chunk_size=2)).flow(points, 0.0, 15.0)
    assert np.array_equal(serial.points, parallel.points)


def test_winding_angle_over_one_period():
    f = get_nonlinearity("abs")
    frame = EnergyFrame.of(f, 2.0)
    x_minus = classify_level(frame, -1.0)["x_-"]
    result = EnsembleFlow(f, Constant(k=2.0)).flow([[x_minus, 0.0]], 0.0, 2.0 * math.pi, center=frame.x_s)
    assert result.angles[0] == pytest.approx(2.0 * math.pi, abs=1e-6)


def test_backward_integration_retraces_forward_run():
    f = get_nonlinearity("abs")
    forward = integrate(f, Constant(k=2.0), (-1.0, 0.3), (0.0, 1.0))
    assert any(event.kind == "breakpoint" for event in forward.events)
    backward = integrate(f, Constant(k=2.0), forward.final, (1.0, 0.0))
    assert backward.t_end == 0.0
    assert len(backward.t) > 2
    assert np.array(backward.final) == pytest.approx(np.array([-1.0, 0.3]), abs=1e-8)
    assert backward(0.5) == pytest.approx(forward(0.5), abs=1e-7)


def test_backward_integration_across_switches():
    f = get_nonlinearity("abs")
    forcing = Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0)
    forward = integrate(f, forcing, (1.0, 0.0), (0.0, 4.0))
    backward = integrate(f, forcing, forward.final, (4.0, 0.0))
    switches = [event.t for event in backward.events if event.kind == "switch"]
    assert switches == [2.0]
    assert np.array(backward.final) == pytest.approx(np.array([1.0, 0.0]), abs=1e-6)


def test_ensemble_locates_kinks_of_abs():
    f = get_nonlinearity("abs")
    points = _loop_points(EnergyFrame.of(f, 2.0), 6, seed=11)
    forcing = Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0)
    result = EnsembleFlow(f, forcing, settings=RuntimeSettings(threads=2, chunk_size=4)).flow(points, 0.0, 9.0)
    for z0, z1 in zip(points, result.points):
        single = integrate(f, forcing, z0, (0.0, 9.0)).final
        assert z1 == pytest.approx(np.array(single), abs=1e-8)
