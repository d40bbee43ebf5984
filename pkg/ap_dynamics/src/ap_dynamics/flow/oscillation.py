import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.forcing import ForcingSpec
from ap_dynamics.flow.integrator import Trajectory
from ap_dynamics.model.nonlinearity import Nonlinearity

_TURN_SLACK = 1e-9


@dataclass(frozen=True)
class OscillationCount:
    interval: tuple[float, float]
    count: int
    indeterminate: bool
    min_distance: float


def moving_center(f: Nonlinearity, forcing: ForcingSpec) -> Callable[[float], float]:
    """t -> x_s(p(t)), the center of the frozen system at time t. Requires p > 0."""

    def center(t: float) -> float:
        level = forcing.p(t)
        if level <= 0:
            raise DomainError(f"p({t}) = {level} <= 0: the frozen system has no center")
        return f.right_inverse(level)

    return center


def oscillation_count(
        trajectory: Trajectory,
        center_curve: Callable[[float], float],
        intervals: Sequence[tuple[float, float]],
        samples_per_unit: int = 200,
        tol: float = 1e-6,
) -> list[OscillationCount]:
    """
    Number of full clockwise turns of (x(t), y(t)) around (center_curve(t), 0) on each interval.

    The clockwise angle atan2(-y, x - c(t)) is unwrapped on a dense sampling of the
    trajectory and its total increase is floor-divided by 2 pi; a net counterclockwise drift,
    as on a V-branch passing the center, counts as zero turns. An interval where the
    trajectory comes closer than `tol` to the center is flagged indeterminate.
    """
    results = []
    for t_a, t_b in intervals:
        if t_b <= t_a:
            raise DomainError(f"empty interval [{t_a}, {t_b}]")
        n = max(64, int(math.ceil((t_b - t_a) * samples_per_unit)) + 1)
        times = np.linspace(t_a, t_b, n)
        states = trajectory(times)
        centers = np.array([center_curve(t) for t in times])
        u, y = states[0] - centers, states[1]
        angle = np.unwrap(np.arctan2(-y, u))
        distance = float(np.min(np.hypot(u, y)))
        turns = (angle[-1] - angle[0]) / (2.0 * math.pi)
        results.append(OscillationCount(
            interval=(float(t_a), float(t_b)),
            count=max(0, int(math.floor(turns + _TURN_SLACK))),
            indeterminate=distance < tol,
            min_distance=distance,
        ))
    return results
