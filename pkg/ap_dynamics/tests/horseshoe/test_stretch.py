import pytest

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.horseshoe.decomposition import WindingSectors
from ap_dynamics.horseshoe.regions import EnergyLevels, build_regions
from ap_dynamics.horseshoe.stretch import StretchVerifier, verify_stretch
from ap_dynamics.model.catalog import get_nonlinearity

ABS = get_nonlinearity("abs")


@pytest.fixture(scope="module")
def geometry():
    return build_regions(ABS, 0.0, 2.0, EnergyLevels(A=0.0, B=8.0, D=-0.195))


def test_identity_map_does_not_stretch(geometry):
    certificate = verify_stretch(ABS, 2.0, 0.0, geometry.N, geometry.M, WindingSectors(geometry, 2),
                                 path_count=4, nodes=33, map_id="psi2")
    assert certificate.status == "failed"
    assert certificate.witness == 0
    assert certificate.crossing_number == 0
    assert all(path.status == "failed" for path in certificate.paths)
    assert certificate.path_count == 4


def test_verifier_arguments(geometry):
    sectors = WindingSectors(geometry, 2)
    with pytest.raises(DomainError):
        StretchVerifier(ABS, 2.0, -1.0, geometry.N, geometry.M, sectors)
    with pytest.raises(DomainError):
        StretchVerifier(ABS, 2.0, 1.0, geometry.N, geometry.M, sectors, nodes=1)
    verifier = StretchVerifier(ABS, 2.0, 1.0, geometry.N, geometry.M, sectors, path_count=3)
    assert len(verifier.paths) == 3
    assert verifier.spacing_limit == pytest.approx(1e-3 * geometry.M.diameter)


@pytest.mark.slow
def test_k2_leg_winds_twice(abs_certificate):
    psi2 = abs_certificate.psi2
    assert psi2.granted
    assert psi2.crossing_number == 2
    assert {"K_2,0", "K_2,1"} <= set(psi2.paths[0].labels)
    assert psi2.min_margin > 0
