import math

import pytest

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.horseshoe.regions import EnergyLevels, build_regions
from ap_dynamics.horseshoe.thresholds import tau_stars
from ap_dynamics.model.catalog import get_nonlinearity

ABS = get_nonlinearity("abs")


@pytest.fixture(scope="module")
def abs_geometry():
    return build_regions(ABS, 0.0, 2.0, EnergyLevels(A=0.0, B=8.0, D=-0.195))


def test_abs_example_thresholds(abs_geometry):
    stars = tau_stars(abs_geometry, m=2)
    assert stars.tau_V_A is None
    assert stars.tau1 == pytest.approx(1.4454, abs=1e-4)
    assert stars.tau1 == stars.tau_U_B
    # linear restoring force on x > 0: every closed orbit of k2 has period 2 pi
    assert stars.period_O_D == pytest.approx(2.0 * math.pi, rel=1e-8)
    assert stars.tau_O_D == pytest.approx(2.0 * math.pi, rel=1e-8)
    assert stars.tau2 == pytest.approx(4.0 * math.pi, rel=1e-8)


def test_single_winding_threshold(abs_geometry):
    stars = tau_stars(abs_geometry, m=1)
    assert stars.tau2 == stars.tau_O_D
    assert stars.as_dict()["m"] == 1


def test_thresholds_grow_with_m(abs_geometry):
    two, three = tau_stars(abs_geometry, 2), tau_stars(abs_geometry, 3)
    assert three.tau2 - two.tau2 == pytest.approx(two.period_O_D)
    assert three.tau1 == two.tau1


def test_invalid_m(abs_geometry):
    with pytest.raises(DomainError):
        tau_stars(abs_geometry, 0)


def test_non_degenerate_thresholds():
    geom = build_regions(get_nonlinearity("sqrt1p"), 2.0, 4.0)
    stars = tau_stars(geom, 2)
    assert stars.tau_V_A is not None
    assert stars.tau1 == max(stars.tau_V_A, stars.tau_U_B)
    assert 0 < stars.tau_O_D < stars.period_O_D
    assert stars.tau2 == pytest.approx(stars.tau_O_D + stars.period_O_D)
