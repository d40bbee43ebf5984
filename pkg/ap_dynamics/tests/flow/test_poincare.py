import math

import numpy as np
import pytest

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.fixed_points import NewtonSolver, Window, deduplicate, fixed_point_scan
from ap_dynamics.flow.forcing import Constant, Periodic, Step
from ap_dynamics.flow.oscillation import moving_center, oscillation_count
from ap_dynamics.flow.integrator import integrate
from ap_dynamics.flow.poincare import IcLine, PoincareMap, scatter
from ap_dynamics.model.catalog import get_nonlinearity
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.levels import classify_level

ABS = get_nonlinearity("abs")
SQRT1P = get_nonlinearity("sqrt1p")


def test_constant_forcing_has_no_period():
    with pytest.raises(DomainError):
        PoincareMap(SQRT1P, Constant(k=2.0))
    assert PoincareMap(SQRT1P, Constant(k=2.0), period=1.0).period == 1.0


def test_stepwise_map_is_composition_of_half_maps():
    psi = PoincareMap(ABS, Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0))
    psi_1, psi_2 = psi.half_maps()
    z = (1.0, 0.5)
    assert np.array(psi(z)) == pytest.approx(np.array(psi_2(psi_1(z))), abs=1e-8)


def test_half_maps_need_stepwise_forcing():
    with pytest.raises(DomainError):
        PoincareMap(SQRT1P, Periodic(k=2.0, eps=0.01, omega=10.0)).half_maps()


def test_unforced_iterates_stay_on_their_level():
    frame = EnergyFrame.of(SQRT1P, 2.0)
    psi = PoincareMap(SQRT1P, Periodic(k=2.0, eps=0.0, omega=10.0))
    orbit = psi.iterate((1.0, 0.0), 50)
    energies = np.array([frame.energy(p.x, p.y) for p in orbit.points])
    assert len(orbit) == 51
    assert np.max(np.abs(energies - energies[0])) < 1e-7


def test_small_forcing_orbit_stays_bounded():
    psi = PoincareMap(SQRT1P, Periodic(k=2.0, eps=0.01, omega=10.0))
    orbit = psi.iterate((0.0, 0.0), 1000)
    assert not orbit.blowup
    assert len(orbit) == 1001


def test_scatter_rows():
    forcing = Periodic(k=2.0, eps=0.01, omega=10.0)
    rows = scatter(SQRT1P, forcing, IcLine(-4.0, 6.0, 5), n_iter=3)
    assert len(rows) == 5 * 4
    assert [(r.ic_index, r.iter) for r in rows[:4]] == [(0, 0), (0, 1), (0, 2), (0, 3)]
    assert rows[0].x == -4.0 and rows[0].y == 0.0
    assert {r.flag for r in rows} <= {"ok", "blowup"}


def test_scatter_stops_escaping_orbits():
    rows = scatter(ABS, Periodic(k=2.0, eps=0.5, omega=1.0), IcLine(-30.0, -30.0, 1, y0=-30.0), n_iter=20)
    assert rows[-1].flag == "blowup"
    assert len(rows) < 21


def test_scatter_rejects_negative_iterations():
    with pytest.raises(DomainError):
        scatter(SQRT1P, Periodic(k=2.0, eps=0.01, omega=10.0), IcLine(0.0, 1.0, 2), n_iter=-1)


def test_newton_solver_on_a_linear_map():
    def contraction(points):
        return 0.5 * points + np.array([1.0, -1.0]), np.zeros(len(points), dtype=bool)

    points, residuals, converged = NewtonSolver(contraction).solve(np.array([[0.0, 0.0], [5.0, 5.0]]))
    assert converged.all()
    assert points == pytest.approx(np.array([[2.0, -2.0], [2.0, -2.0]]), abs=1e-9)
    assert len(deduplicate(points, residuals)) == 1


@pytest.mark.parametrize("k, count", [(2.0, 2), (-0.5, 0)])
def test_fixed_point_multiplicity(k, count):
    window = Window(-6.0, 6.0, -4.0, 4.0)
    found = fixed_point_scan(SQRT1P, Periodic(k=k, eps=0.01, omega=10.0), window)
    assert len(found) == count
    for fp in found:
        assert fp.residual < 1e-9


def test_fixed_points_sit_near_equilibria():
    found = fixed_point_scan(SQRT1P, Periodic(k=2.0, eps=0.01, omega=10.0), Window(-6.0, 6.0, -4.0, 4.0))
    xs = sorted(fp.point.x for fp in found)
    assert xs == pytest.approx([-2.0 * math.sqrt(2.0), 2.0 * math.sqrt(2.0)], abs=0.05)


def test_oscillation_count_on_closed_orbit():
    frame = EnergyFrame.of(ABS, 2.0)
    forcing = Constant(k=2.0)
    x_minus = classify_level(frame, -1.0)["x_-"]
    trajectory = integrate(ABS, forcing, (x_minus, 0.0), (0.0, 7.0 * math.pi))
    counts = oscillation_count(trajectory, moving_center(ABS, forcing), [(0.0, 6.0 * math.pi + 0.5), (0.0, 1.0)])
    assert counts[0].count == 3
    assert counts[1].count == 0
    assert not counts[0].indeterminate
    assert counts[0].min_distance == pytest.approx(math.sqrt(2.0), abs=1e-6)



def test_oscillation_count_off_closed_orbits_is_never_negative():
    forcing = Constant(k=2.0)
    trajectory = integrate(ABS, forcing, (-6.0, 3.0), (0.0, 1.0))
    assert not trajectory.blowup
    [passing] = oscillation_count(trajectory, moving_center(ABS, forcing), [(0.0, 1.0)])
    assert passing.count == 0
    assert passing.min_distance > 0.0

def test_moving_center_needs_positive_forcing():
    with pytest.raises(DomainError):
        moving_center(SQRT1P, Constant(k=-1.0))(0.0)
    with pytest.raises(DomainError):
        oscillation_count(integrate(ABS, Constant(k=2.0), (1.0, 0.0), (0.0, 1.0)),
                          moving_center(ABS, Constant(k=2.0)), [(1.0, 0.5)])
