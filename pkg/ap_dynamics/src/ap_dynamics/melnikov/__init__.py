from ap_dynamics.melnikov.area import (
    AreaInterval,
    AreaProfile,
    area_monotone_check,
    loop_area,
    loop_area_k,
    propose_intervals,
)
from ap_dynamics.melnikov.functions import (
    MelnikovValue,
    OmegaThreshold,
    SimpleZero,
    ThresholdWitness,
    ZeroReport,
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
from ap_dynamics.melnikov.homoclinic import HomoclinicOrbit, homoclinic_orbit

__all__ = [
    "AreaInterval",
    "AreaProfile",
    "HomoclinicOrbit",
    "MelnikovValue",
    "OmegaThreshold",
    "SimpleZero",
    "ThresholdWitness",
    "ZeroReport",
    "area_monotone_check",
    "critical_points",
    "delta",
    "delta_damped",
    "detect_zeros",
    "eta",
    "homoclinic_orbit",
    "loop_area",
    "loop_area_k",
    "omega_threshold",
    "propose_intervals",
    "sample_delta",
    "threshold_margin",
    "xi_partial_sums",
]
