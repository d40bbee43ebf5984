from ap_dynamics.horseshoe.certify import (
    CertificateReport,
    HorseshoeCertificate,
    HorseshoeCertifier,
    certify_horseshoe,
)
from ap_dynamics.horseshoe.decomposition import EnergySplit, WindingSectors
from ap_dynamics.horseshoe.paths import SamplePath, transversal_paths
from ap_dynamics.horseshoe.periodic import (
    Itinerary,
    PeriodicOrbit,
    PeriodicOrbitFinder,
    PeriodicSearch,
    SymbolicStep,
    find_periodic_orbit,
)
from ap_dynamics.horseshoe.regions import EnergyLevels, OrientedRectangle, RegionGeometry, auto_levels, build_regions
from ap_dynamics.horseshoe.stretch import CrossingRecord, PathRecord, StretchCertificate, StretchVerifier, verify_stretch
from ap_dynamics.horseshoe.thresholds import TauStars, tau_stars

__all__ = [
    "CertificateReport",
    "CrossingRecord",
    "EnergyLevels",
    "EnergySplit",
    "HorseshoeCertificate",
    "HorseshoeCertifier",
    "Itinerary",
    "OrientedRectangle",
    "PathRecord",
    "PeriodicOrbit",
    "PeriodicOrbitFinder",
    "PeriodicSearch",
    "RegionGeometry",
    "SamplePath",
    "StretchCertificate",
    "StretchVerifier",
    "SymbolicStep",
    "TauStars",
    "WindingSectors",
    "auto_levels",
    "build_regions",
    "certify_horseshoe",
    "find_periodic_orbit",
    "tau_stars",
    "transversal_paths",
    "verify_stretch",
]
