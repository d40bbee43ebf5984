from ap_dynamics.flow.ensemble import EnsembleFlow, EnsembleResult, initial_angle
from ap_dynamics.flow.fixed_points import FixedPoint, FixedPointScanner, NewtonSolver, Window, fixed_point_scan
from ap_dynamics.flow.forcing import Constant, ForcingSpec, Periodic, Step
from ap_dynamics.flow.integrator import FlowIntegrator, Trajectory, TrajectoryEvent, integrate
from ap_dynamics.flow.oscillation import OscillationCount, moving_center, oscillation_count
from ap_dynamics.flow.poincare import IcLine, Orbit, PoincareMap, ScatterRow, scatter
from ap_dynamics.flow.waveforms import Waveform, get_waveform, waveform_names
from ap_dynamics.model.frame import PhasePoint

__all__ = [
    "Constant",
    "EnsembleFlow",
    "EnsembleResult",
    "FixedPoint",
    "FixedPointScanner",
    "FlowIntegrator",
    "ForcingSpec",
    "IcLine",
    "NewtonSolver",
    "Orbit",
    "OscillationCount",
    "Periodic",
    "PhasePoint",
    "PoincareMap",
    "ScatterRow",
    "Step",
    "Trajectory",
    "TrajectoryEvent",
    "Waveform",
    "Window",
    "fixed_point_scan",
    "get_waveform",
    "initial_angle",
    "integrate",
    "moving_center",
    "oscillation_count",
    "scatter",
    "waveform_names",
]
