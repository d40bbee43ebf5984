import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import NumericalError
from ap_dynamics.flow.forcing import ForcingSpec
from ap_dynamics.flow.integrator import DEFAULT_ATOL, DEFAULT_BLOWUP, DEFAULT_RTOL, METHOD, FlowIntegrator
from ap_dynamics.model.nonlinearity import Nonlinearity


@dataclass(frozen=True)
class EnsembleResult:
    """
    Final states of an ensemble flow. `angles` holds the unwrapped clockwise winding angle
    around the requested center, measured from the leftward horizontal ray, when requested.
    """

    points: np.ndarray
    blowup: np.ndarray
    angles: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.points)


def initial_angle(points: np.ndarray, center: float) -> np.ndarray:
    """Clockwise angle in (-pi, pi] of (x - center, y), zero on the ray {y = 0, x < center}."""
    return np.arctan2(points[:, 1], -(points[:, 0] - center))


class EnsembleFlow:
    """
    Flows many initial points at once by stacking them in one vectorized system.

    Points are cut into fixed chunks of `settings.chunk_size`, so that results do not depend
    on how many worker threads run the chunks. A point whose |x| + |y| exceeds the blow-up
    bound is frozen and flagged. When f has breakpoints the chunk is flowed point by point with
    [FlowIntegrator], which restarts at every crossing of a kink; the winding angle is then
    unwrapped along a dense sampling of each trajectory.
    """

    def __init__(
            self,
            f: Nonlinearity,
            forcing: ForcingSpec,
            rtol: float = DEFAULT_RTOL,
            atol: float = DEFAULT_ATOL,
            blowup_bound: float = DEFAULT_BLOWUP,
            settings: Optional[RuntimeSettings] = None,
            logger: Optional[logging.Logger] = None,
    ):
        self.f = f
        self.forcing = forcing
        self.rtol = rtol
        self.atol = atol
        self.blowup_bound = blowup_bound
        self.settings = settings or RuntimeSettings.from_env()
        self.logger = logger

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    def _field(self, m: int, center: Optional[float]):
        c, value, p, bound = self.forcing.c, self.f.value, self.forcing.p, self.blowup_bound

        def field(t, state):
            x, y = state[:m], state[m:2 * m]
            frozen = (np.abs(x) + np.abs(y)) > bound
            dx = y.copy()
            dy = -c * y - value(x) + p(t)
            dx[frozen] = 0.0
            dy[frozen] = 0.0
            if center is None:
                return np.concatenate([dx, dy])
            u = x - center
            r2 = u * u + y * y
            dtheta = np.where(r2 > 0, (y * dx - u * dy) / np.where(r2 > 0, r2, 1.0), 0.0)
            return np.concatenate([dx, dy, dtheta])

        return field

    def _flow_kinked_chunk(self, chunk: np.ndarray, t0: float, t1: float, center: Optional[float]):
        integrator = FlowIntegrator(self.f, self.forcing, self.rtol, self.atol, self.blowup_bound)
        points = np.empty_like(chunk)
        blowup = np.zeros(len(chunk), dtype=bool)
        angles = initial_angle(chunk, center) if center is not None else None
        for i, z0 in enumerate(chunk):
            trajectory = integrator.integrate(z0, (t0, t1))
            points[i] = trajectory.final
            blowup[i] = trajectory.blowup
            if center is not None and trajectory.t_end > t0:
                grid = np.linspace(t0, trajectory.t_end, max(64, int(np.ceil((trajectory.t_end - t0) * 200)) + 1))
                times = np.union1d(grid, trajectory.t)
                states = trajectory(times)
                swept = np.unwrap(np.arctan2(states[1], -(states[0] - center)))
                angles[i] += swept[-1] - swept[0]
        blowup |= ~np.all(np.isfinite(points), axis=1)
        return points, blowup, angles

    def _flow_chunk(self, chunk: np.ndarray, t0: float, t1: float, center: Optional[float]):
        if self.f.breakpoints:
            return self._flow_kinked_chunk(chunk, t0, t1, center)
        m = len(chunk)
        state = np.concatenate([chunk[:, 0], chunk[:, 1]])
        if center is not None:
            state = np.concatenate([state, initial_angle(chunk, center)])
        field = self._field(m, center)
        stops = [*self.forcing.switch_times(t0, t1), t1]
        t_cur = t0
        for t_stop in stops:
            if t_stop <= t_cur:
                continue
            sol = solve_ivp(field, (t_cur, t_stop), state, method=METHOD, rtol=self.rtol, atol=self.atol)
            if sol.status != 0:
                raise NumericalError(f"ensemble integration failed at t={sol.t[-1]}: {sol.message}")
            state = sol.y[:, -1]
            t_cur = t_stop
        points = np.column_stack([state[:m], state[m:2 * m]])
        blowup = (np.abs(points[:, 0]) + np.abs(points[:, 1])) > self.blowup_bound
        blowup |= ~np.all(np.isfinite(points), axis=1)
        angles = state[2 * m:] if center is not None else None
        return points, blowup, angles

    def flow(self, points, t0: float, t1: float, center: Optional[float] = None) -> EnsembleResult:
        """
        Flow every row of `points` (shape (n, 2)) from t0 to t1.

        Args:
            points: Initial states.
            t0 (float): Start time (matters for nonautonomous forcing).
            t1 (float): End time, t1 >= t0.
            center (float, optional): Abscissa c of the winding center (c, 0); when given the
                clockwise angle is integrated along.

        Returns:
            EnsembleResult: Final states in input order.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(points)
        if n == 0 or t1 == t0:
            angles = initial_angle(points, center) if center is not None and n else None
            return EnsembleResult(points.copy(), np.zeros(n, dtype=bool), angles)

        size = self.settings.chunk_size
        chunks = [points[i:i + size] for i in range(0, n, size)]
        workers = max(1, min(self.settings.threads, len(chunks)))
        self._log(logging.DEBUG, f"flowing {n} points over [{t0:.6g}, {t1:.6g}] in {len(chunks)} chunks")
        if workers == 1:
            results = [self._flow_chunk(chunk, t0, t1, center) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda chunk: self._flow_chunk(chunk, t0, t1, center), chunks))

        out_points = np.concatenate([r[0] for r in results])
        out_blowup = np.concatenate([r[1] for r in results])
        out_angles = np.concatenate([r[2] for r in results]) if center is not None else None
        return EnsembleResult(out_points, out_blowup, out_angles)

