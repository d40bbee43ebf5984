from ap_dynamics.model.catalog import NonlinearityCatalog, get_nonlinearity
from ap_dynamics.model.frame import (
    EnergyFrame,
    PhasePoint,
    energy,
    equilibria,
    homoclinic_intercept,
    phi,
    solve_bracketed,
    solve_monotone,
)
from ap_dynamics.model.levels import LevelClassification, LevelKind, OrderingReport, classify_level, ordering_check
from ap_dynamics.model.nonlinearity import Nonlinearity, from_callable

__all__ = [
    "EnergyFrame",
    "LevelClassification",
    "LevelKind",
    "Nonlinearity",
    "NonlinearityCatalog",
    "OrderingReport",
    "PhasePoint",
    "classify_level",
    "energy",
    "equilibria",
    "from_callable",
    "get_nonlinearity",
    "homoclinic_intercept",
    "ordering_check",
    "phi",
    "solve_bracketed",
    "solve_monotone",
]
