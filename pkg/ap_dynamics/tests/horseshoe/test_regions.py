import numpy as np
import pytest

from ap_dynamics.exception.errors import ConstraintViolation, DomainError
from ap_dynamics.horseshoe.decomposition import EnergySplit, WindingSectors
from ap_dynamics.horseshoe.paths import transversal_paths
from ap_dynamics.horseshoe.regions import EnergyLevels, auto_levels, build_regions
from ap_dynamics.model.catalog import get_nonlinearity

ABS = get_nonlinearity("abs")
SQRT1P = get_nonlinearity("sqrt1p")
ABS_LEVELS = EnergyLevels(A=0.0, B=8.0, D=-0.195)


@pytest.fixture(scope="module")
def abs_geometry():
    return build_regions(ABS, 0.0, 2.0, ABS_LEVELS)


@pytest.fixture(scope="module")
def sqrt1p_geometry():
    return build_regions(SQRT1P, 2.0, 4.0)


def test_abs_example_geometry(abs_geometry):
    g = abs_geometry
    assert g.is_degenerate
    assert g.a is None
    assert g.H2 == pytest.approx(2.0, abs=1e-9)
    assert g.x_plus_D == pytest.approx(3.9, abs=1e-6)
    assert g.d == pytest.approx(0.1, abs=1e-6)
    assert g.b == pytest.approx(4.0, abs=1e-6)
    assert g.winding_center == pytest.approx(2.0, abs=1e-9)
    assert g.winding_sector == pytest.approx(np.pi)
    assert g.first_symbols == 1


def test_rectangles_contain_their_arcs(abs_geometry):
    for rect in (abs_geometry.M, abs_geometry.N):
        lo, hi = rect.valid_band
        assert lo < hi
        s = np.linspace(0.0, 1.0, 33)
        arc = rect.arc(0.5 * (lo + hi), s)
        u = rect.side_coordinate(arc)
        assert u[0] == pytest.approx(0.0, abs=1e-9)
        assert u[-1] == pytest.approx(1.0, abs=1e-9)
        assert np.all(rect.tube_slack(arc[1:-1]) > 0)
    assert np.all(abs_geometry.M.arc(abs_geometry.M.valid_band[0], [0.5])[:, 1] > 0)
    assert np.all(abs_geometry.N.arc(abs_geometry.N.valid_band[0], [0.5])[:, 1] < 0)


def test_rectangle_points_lie_in_strip_and_annulus(abs_geometry):
    rect = abs_geometry.M
    arc = rect.arc(rect.valid_band[1], np.linspace(0.05, 0.95, 17))
    assert np.all(abs_geometry.in_strip(arc, tol=1e-9))
    assert np.all(abs_geometry.in_annulus(arc, tol=1e-9))


def test_k_order_is_enforced():
    with pytest.raises(ConstraintViolation, match="k1 < k2") as e:
        build_regions(ABS, 2.0, 2.0)
    assert e.value.inequality == "k1 < k2"
    with pytest.raises(ConstraintViolation, match="k1 >= 0"):
        build_regions(ABS, -1.0, 2.0)


def test_degenerate_strip_starts_at_zero():
    with pytest.raises(ConstraintViolation, match="A = 0 when k1 = 0"):
        build_regions(ABS, 0.0, 2.0, EnergyLevels(A=0.5, B=8.0, D=-0.195))


def test_level_outside_closed_band_is_rejected():
    with pytest.raises(ConstraintViolation, match="< D <"):
        build_regions(ABS, 0.0, 2.0, EnergyLevels(A=0.0, B=8.0, D=3.0))


def test_auto_levels_sqrt1p(sqrt1p_geometry):
    levels = auto_levels(SQRT1P, 2.0, 4.0)
    assert levels.A == pytest.approx(2.847, abs=5e-3)
    assert levels.D == pytest.approx(10.83, abs=2e-2)
    assert levels.B == pytest.approx(11.03, abs=2e-2)
    g = sqrt1p_geometry
    assert g.b == pytest.approx(8.26, abs=2e-2)
    assert g.frame2.x_u < g.d < g.a < g.frame1.x_u
    assert g.frame1.x_h < g.b < g.x_plus_D
    assert g.winding_center == g.b
    assert g.first_symbols == 2


def test_auto_levels_keep_given_values():
    levels = auto_levels(ABS, 0.0, 2.0, EnergyLevels(D=-0.195))
    assert levels.A == 0.0
    assert levels.D == -0.195
    assert levels.B > 0


def test_energy_split_labels(sqrt1p_geometry):
    g = sqrt1p_geometry
    split = EnergySplit(g)
    assert split.names == ["K_1,0", "K_1,1"]
    x = g.frame1.x_u
    low = np.array([[x - 1.0, 0.0]])
    high = np.array([[x, np.sqrt(2.0 * (g.U1 + 1.0 - g.frame1.phi_scalar(x)))]])
    assert split.labels(low)[0] == 0
    assert split.labels(high)[0] == 1
    on_saddle = np.array([[x, 0.0]])
    assert split.labels(on_saddle)[0] == -1
    assert EnergySplit(build_regions(ABS, 0.0, 2.0, ABS_LEVELS)).names == ["K_1"]


def test_winding_sector_labels(abs_geometry):
    sectors = WindingSectors(abs_geometry, m=2)
    assert sectors.names == ["K_2,0", "K_2,1"]
    angles = np.array([0.5 * np.pi, 1.5 * np.pi, 2.0 * np.pi + 0.1, 4.0 * np.pi + 0.2, -0.1])
    assert list(sectors.labels(np.zeros((5, 2)), angles)) == [0, -1, 1, 2, -1]
    assert sectors.label_name(1) == "K_2,1"


def test_transversal_paths(abs_geometry):
    paths = transversal_paths(abs_geometry.M, 16)
    assert len(paths) == 16
    lo, hi = abs_geometry.M.valid_band
    assert paths[0].level == pytest.approx(lo)
    assert paths[-1].level == pytest.approx(hi)
    assert [p.index for p in paths] == list(range(16))
    with pytest.raises(DomainError):
        transversal_paths(abs_geometry.M, 1)
