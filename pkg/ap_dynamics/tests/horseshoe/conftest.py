import pytest

from ap_dynamics.flow.forcing import Step
from ap_dynamics.horseshoe.certify import certify_horseshoe
from ap_dynamics.horseshoe.regions import EnergyLevels
from ap_dynamics.model.catalog import get_nonlinearity


@pytest.fixture(scope="session")
def abs_certificate():
    return certify_horseshoe(
        get_nonlinearity("abs"),
        Step(k1=0.0, k2=2.0, t1=2.0, t2=13.0),
        EnergyLevels(A=0.0, B=8.0, D=-0.195),
        m=2,
    )
