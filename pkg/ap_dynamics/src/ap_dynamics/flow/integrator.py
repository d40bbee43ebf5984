import bisect
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ap_dynamics.exception.errors import DomainError, NumericalError
from ap_dynamics.flow.forcing import ForcingSpec
from ap_dynamics.model.frame import PhasePoint
from ap_dynamics.model.nonlinearity import Nonlinearity

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_BLOWUP = 1.0e6
METHOD = "DOP853"


@dataclass(frozen=True)
class TrajectoryEvent:
    t: float
    kind: str
    point: PhasePoint


@dataclass
class Trajectory:
    """
    Samples and dense output of one integration. Samples and `pieces` (t_start, t_end, OdeSolution)
    are in integration order, so `t` decreases for a backward run; a new piece starts at every
    forcing switch and breakpoint crossing.
    """

    t: np.ndarray
    z: np.ndarray
    pieces: list = field(default_factory=list)
    events: list[TrajectoryEvent] = field(default_factory=list)
    blowup: bool = False

    @property
    def final(self) -> PhasePoint:
        return PhasePoint(float(self.z[-1, 0]), float(self.z[-1, 1]))

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def __call__(self, t):
        """Dense evaluation; returns shape (2,) for scalar t and (2, n) for arrays."""
        scalar = np.ndim(t) == 0
        times = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = sorted((float(self.t[0]), float(self.t[-1])))
        if np.any(times < lo - 1e-12) or np.any(times > hi + 1e-12):
            raise DomainError(f"t outside the integrated span [{lo}, {hi}]")
        pieces = sorted(self.pieces, key=lambda piece: min(piece[0], piece[1]))
        starts = [min(piece[0], piece[1]) for piece in pieces]
        out = np.empty((2, times.size))
        for i, s in enumerate(times):
            index = max(0, bisect.bisect_right(starts, s) - 1)
            out[:, i] = pieces[index][2](s)
        return out[:, 0] if scalar else out


class FlowIntegrator:
    """
    Integrates x' = y, y' = -c y - f(x) + p(t) with an explicit Runge-Kutta 8(5,3) pair and
    dense output. Integration restarts at every forcing switch and at every crossing of a
    breakpoint of f, so that no step straddles a non-smooth instant. Orbits whose
    |x| + |y| exceeds `blowup_bound` stop with the `blowup` flag set.
    """

    def __init__(
            self,
            f: Nonlinearity,
            forcing: ForcingSpec,
            rtol: float = DEFAULT_RTOL,
            atol: float = DEFAULT_ATOL,
            blowup_bound: float = DEFAULT_BLOWUP,
            logger: Optional[logging.Logger] = None,
    ):
        self.f = f
        self.forcing = forcing
        self.rtol = rtol
        self.atol = atol
        self.blowup_bound = blowup_bound
        self.logger = logger
        self._field = forcing.rhs(f)

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    def _events(self, directions: Sequence[float]):
        events = []
        for b, direction in zip(self.f.breakpoints, directions):
            def crossing(t, z, b=b):
                return z[0] - b

            crossing.terminal = True
            crossing.direction = direction
            events.append(crossing)

        bound = self.blowup_bound

        def escape(t, z):
            return bound - (abs(z[0]) + abs(z[1]))

        escape.terminal = True
        escape.direction = -1
        events.append(escape)
        return events

    def _initial_directions(self, z: np.ndarray, sign: float) -> list[float]:
        directions = []
        for b in self.f.breakpoints:
            if z[0] == b and z[1] != 0:
                directions.append(-sign * float(np.sign(z[1])))
            else:
                directions.append(0.0)
        return directions

    def integrate(self, z0, span: Sequence[float]) -> Trajectory:
        """
        Integrate from z0 over span = [t0, t1]; t1 < t0 integrates backward in time.

        Raises:
            NumericalError: If the step size underflows.
        """
        t0, t_final = float(span[0]), float(span[1])
        z = np.asarray(z0, dtype=float).copy()
        if not np.all(np.isfinite(z)):
            raise DomainError(f"initial point {z0} is not finite")
        times, states = [t0], [z.copy()]
        pieces, events = [], []
        if t_final == t0:
            return Trajectory(np.array(times), np.array(states), pieces, events)

        sign = 1.0 if t_final > t0 else -1.0
        switches = self.forcing.switch_times(min(t0, t_final), max(t0, t_final))
        stops = [*(switches if sign > 0 else reversed(switches)), t_final]
        directions = self._initial_directions(z, sign)
        t_cur = t0
        for t_stop in stops:
            while sign * (t_stop - t_cur) > 0:
                sol = solve_ivp(
                    self._field, (t_cur, t_stop), z, method=METHOD,
                    rtol=self.rtol, atol=self.atol, dense_output=True,
                    events=self._events(directions),
                )
                if sol.status == -1:
                    raise NumericalError(f"integration failed at t={sol.t[-1]}: {sol.message}")
                pieces.append((t_cur, float(sol.t[-1]), sol.sol))
                times.extend(sol.t[1:])
                states.extend(sol.y[:, 1:].T)
                z = sol.y[:, -1].copy()
                t_new = float(sol.t[-1])
                if sol.status == 1:
                    escape_hits = sol.t_events[-1]
                    if len(escape_hits) > 0:
                        events.append(TrajectoryEvent(t_new, "blowup", PhasePoint(*z)))
                        self._log(logging.DEBUG, f"blow-up at t={t_new:.6g}")
                        return Trajectory(np.array(times), np.array(states), pieces, events, blowup=True)
                    for i, b in enumerate(self.f.breakpoints):
                        if len(sol.t_events[i]) > 0:
                            z[0] = b
                            states[-1] = z.copy()
                            # x moves along sign * y in integration order
                            heading = sign * (float(np.sign(z[1])) or 1.0)
                            directions[i] = -heading
                            events.append(TrajectoryEvent(t_new, "breakpoint", PhasePoint(*z)))
                if sign * (t_new - t_cur) <= 0:
                    raise NumericalError(f"integration stalled at t={t_cur}")
                t_cur = t_new
            if t_stop != t_final:
                events.append(TrajectoryEvent(t_stop, "switch", PhasePoint(*z)))
        return Trajectory(np.array(times), np.array(states), pieces, events)


def integrate(f: Nonlinearity, forcing: ForcingSpec, z0, span: Sequence[float], **kwargs) -> Trajectory:
    return FlowIntegrator(f, forcing, **kwargs).integrate(z0, span)
