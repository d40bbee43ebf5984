import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.ensemble import EnsembleFlow, EnsembleResult
from ap_dynamics.flow.forcing import Constant, ForcingSpec, Step
from ap_dynamics.flow.integrator import DEFAULT_ATOL, DEFAULT_BLOWUP, DEFAULT_RTOL, FlowIntegrator
from ap_dynamics.model.frame import PhasePoint
from ap_dynamics.model.nonlinearity import Nonlinearity


@dataclass
class Orbit:
    """Poincare iterates z0, Psi(z0), ...; `blowup` marks an orbit truncated by the bound."""

    points: list[PhasePoint] = field(default_factory=list)
    blowup: bool = False

    def __len__(self) -> int:
        return len(self.points)


class PoincareMap:
    """
    Time-T map of a T-periodic forcing. For stepwise forcing Psi = Psi_2 o Psi_1, where Psi_1 is
    the time-t1 flow of the k1 system and Psi_2 the time-t2 flow of the k2 system.

    Single points go through `FlowIntegrator` (event-located breakpoints); `map_many` uses the
    vectorized `EnsembleFlow`.
    """

    def __init__(
            self,
            f: Nonlinearity,
            forcing: ForcingSpec,
            period: Optional[float] = None,
            rtol: float = DEFAULT_RTOL,
            atol: float = DEFAULT_ATOL,
            blowup_bound: float = DEFAULT_BLOWUP,
            settings: Optional[RuntimeSettings] = None,
            logger: Optional[logging.Logger] = None,
    ):
        period = forcing.period if period is None else period
        if period is None or period <= 0:
            raise DomainError(f"{type(forcing).__name__} forcing has no period; pass one explicitly")
        self.f = f
        self.forcing = forcing
        self.period = float(period)
        self.rtol, self.atol, self.blowup_bound = rtol, atol, blowup_bound
        self.logger = logger
        self.integrator = FlowIntegrator(f, forcing, rtol, atol, blowup_bound, logger)
        self.ensemble = EnsembleFlow(f, forcing, rtol, atol, blowup_bound, settings, logger)

    def step(self, z) -> tuple[PhasePoint, bool]:
        trajectory = self.integrator.integrate(z, (0.0, self.period))
        return trajectory.final, trajectory.blowup

    def __call__(self, z) -> PhasePoint:
        image, blowup = self.step(z)
        if blowup:
            raise DomainError(f"orbit of {tuple(z)} leaves |x|+|y| <= {self.blowup_bound} within one period")
        return image

    def map_many(self, points, center: Optional[float] = None) -> EnsembleResult:
        return self.ensemble.flow(points, 0.0, self.period, center=center)

    def iterate(self, z0, n: int) -> Orbit:
        orbit = Orbit([PhasePoint(float(z0[0]), float(z0[1]))])
        z = orbit.points[0]
        for _ in range(n):
            z, blowup = self.step(z)
            orbit.points.append(z)
            if blowup:
                orbit.blowup = True
                break
        return orbit

    def half_maps(self) -> tuple[Callable, Callable]:
        """(Psi_1, Psi_2) for stepwise forcing."""
        if not isinstance(self.forcing, Step):
            raise DomainError("half maps exist only for stepwise forcing")
        s = self.forcing
        first = FlowIntegrator(self.f, Constant(k=s.k1, c=s.c), self.rtol, self.atol, self.blowup_bound, self.logger)
        second = FlowIntegrator(self.f, Constant(k=s.k2, c=s.c), self.rtol, self.atol, self.blowup_bound, self.logger)

        def psi_1(z) -> PhasePoint:
            return first.integrate(z, (0.0, s.t1)).final

        def psi_2(z) -> PhasePoint:
            return second.integrate(z, (0.0, s.t2)).final

        return psi_1, psi_2


@dataclass(frozen=True)
class IcLine:
    """Initial conditions (u0, y0) with u0 evenly spaced on [u0_min, u0_max]."""

    u0_min: float
    u0_max: float
    count: int
    y0: float = 0.0

    def points(self) -> np.ndarray:
        if self.count < 1:
            raise DomainError(f"count must be >= 1, got {self.count}")
        u0 = np.linspace(self.u0_min, self.u0_max, self.count) if self.count > 1 else np.array([self.u0_min])
        return np.column_stack([u0, np.full(self.count, self.y0)])


@dataclass(frozen=True)
class ScatterRow:
    ic_index: int
    iter: int
    x: float
    y: float
    flag: str


def scatter(
        f: Nonlinearity,
        forcing: ForcingSpec,
        ic_line: IcLine,
        n_iter: int,
        rtol: float = DEFAULT_RTOL,
        atol: float = DEFAULT_ATOL,
        blowup_bound: float = DEFAULT_BLOWUP,
        settings: Optional[RuntimeSettings] = None,
        logger: Optional[logging.Logger] = None,
) -> list[ScatterRow]:
    """
    Poincare iterates of a line of initial conditions, sorted by (ic_index, iter).

    Row ``iter = i`` holds Psi^i(z0), from i = 0 (the initial condition) up to n_iter. An orbit
    stops at the first iterate outside the blow-up bound, which is recorded with flag
    ``blowup``.
    """
    if n_iter < 0:
        raise DomainError(f"n_iter must be >= 0, got {n_iter}")
    psi = PoincareMap(f, forcing, rtol=rtol, atol=atol, blowup_bound=blowup_bound, settings=settings, logger=logger)
    current = ic_line.points()
    rows = [[ScatterRow(i, 0, float(x), float(y), "ok")] for i, (x, y) in enumerate(current)]
    alive = np.arange(len(current))
    for iteration in range(1, n_iter + 1):
        if alive.size == 0:
            break
        result = psi.map_many(current[alive])
        for index, (x, y), lost in zip(alive, result.points, result.blowup):
            rows[index].append(ScatterRow(int(index), iteration, float(x), float(y), "blowup" if lost else "ok"))
        current[alive] = result.points
        alive = alive[~result.blowup]
        if logger and iteration % 50 == 0:
            logger.info(f"scatter: iteration {iteration}/{n_iter}, {alive.size} orbits bounded")
    return [row for orbit in rows for row in orbit]
