import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import DomainError, PreconditionError
from ap_dynamics.flow.ensemble import EnsembleFlow
from ap_dynamics.flow.fixed_points import NewtonSolver, deduplicate
from ap_dynamics.flow.forcing import Constant
from ap_dynamics.flow.integrator import DEFAULT_ATOL, DEFAULT_RTOL
from ap_dynamics.flow.poincare import PoincareMap
from ap_dynamics.horseshoe.certify import HorseshoeCertificate
from ap_dynamics.horseshoe.decomposition import EnergySplit, WindingSectors
from ap_dynamics.model.frame import PhasePoint

RESIDUAL_TOL = 1e-8
FRESH_TOL = 1e-6
COARSE_TOL = 1e-6
POLISH_RTOL = 1e-12
POLISH_ATOL = 1e-14


@dataclass(frozen=True)
class Itinerary:
    """
    A periodic word over the alphabet {0, ..., n*m - 1}. Symbol s stands for the pair of
    labels (i, j) = (s // m, s % m): the orbit point lies in K_1,i and its k1 image in K_2,j.
    """

    symbols: tuple[int, ...]
    n: int
    m: int
    periodic: bool = True

    def __post_init__(self):
        if not self.symbols:
            raise DomainError("an itinerary needs at least one symbol")
        size = self.n * self.m
        for s in self.symbols:
            if not 0 <= s < size:
                raise DomainError(f"symbol {s} outside the alphabet {{0, ..., {size - 1}}} of {self.n}x{self.m} symbols")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]], n: int, m: int) -> "Itinerary":
        return cls(tuple(i * m + j for i, j in pairs), n, m)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [divmod(s, self.m) for s in self.symbols]

    def __len__(self) -> int:
        return len(self.symbols)


class SymbolicStep:
    """One period of the stepwise flow on a batch, with the symbol realized by every point (-1 if none)."""

    def __init__(self, certificate: HorseshoeCertificate, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                 settings: Optional[RuntimeSettings] = None, logger: Optional[logging.Logger] = None):
        geom, s = certificate.geometry, certificate.forcing
        self.geometry = geom
        self.forcing = s
        self.m = certificate.m
        self.split = EnergySplit(geom)
        self.sectors = WindingSectors(geom, certificate.m)
        self.first = EnsembleFlow(geom.f, Constant(k=s.k1), rtol, atol, settings=settings, logger=logger)
        self.second = EnsembleFlow(geom.f, Constant(k=s.k2), rtol, atol, settings=settings, logger=logger)

    def __call__(self, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        middle = self.first.flow(points, 0.0, self.forcing.t1)
        end = self.second.flow(middle.points, 0.0, self.forcing.t2, center=self.sectors.center)
        i = self.split.labels(points)
        j = self.sectors.labels(middle.points, end.angles)
        geom = self.geometry
        valid = (i >= 0) & (j >= 0) & (j < self.m) & geom.M.contains(points) & geom.N.contains(middle.points)
        symbols = np.where(valid, i * self.m + j, -1)
        return end.points, symbols, middle.blowup | end.blowup

    def iterate(self, z, count: int) -> tuple[np.ndarray, list[int]]:
        """Points z, Psi(z), ..., Psi^count(z) and the symbols of the first `count` of them."""
        points = [np.asarray(z, dtype=float)]
        symbols = []
        for _ in range(count):
            image, symbol, _ = self(points[-1])
            points.append(image[0])
            symbols.append(int(symbol[0]))
        return np.array(points), symbols


@dataclass(frozen=True)
class PeriodicOrbit:
    point: PhasePoint
    residual: float
    fresh_residual: float
    iterates: list[PhasePoint]
    itinerary: Itinerary
    verified: bool


@dataclass
class PeriodicSearch:
    """Outcome of a search. An empty outcome means the search was incomplete, not that no orbit exists."""

    itinerary: Itinerary
    orbit: Optional[PeriodicOrbit] = None
    seeds: int = 0
    candidates: int = 0
    rejected: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.orbit is not None


class PeriodicOrbitFinder:
    """
    Locates periodic points of Psi = Psi_2 o Psi_1 realizing a symbolic itinerary.

    Seeds on a grid of M whose first symbol matches go through a batched damped Newton iteration
    on Psi^L(z) - z, then a polish with single-point integrations at tight tolerance. A point is
    accepted when |Psi^L(z) - z| < `residual_tol`, its symbols match the word, and a fresh
    integration at a tenth of the tolerance reproduces the symbols and closes the orbit to
    within `fresh_tol`.
    """

    def __init__(
            self,
            certificate: HorseshoeCertificate,
            grid: tuple[int, int] = (12, 12),
            rtol: float = DEFAULT_RTOL,
            atol: float = DEFAULT_ATOL,
            residual_tol: float = RESIDUAL_TOL,
            fresh_tol: float = FRESH_TOL,
            settings: Optional[RuntimeSettings] = None,
            logger: Optional[logging.Logger] = None,
    ):
        if not certificate.granted:
            raise PreconditionError(f"periodic orbits need a granted certificate, got '{certificate.status}'")
        self.certificate = certificate
        self.grid = grid
        self.rtol, self.atol = rtol, atol
        self.residual_tol = residual_tol
        self.fresh_tol = fresh_tol
        self.settings = settings or RuntimeSettings.from_env()
        self.logger = logger
        self.step = SymbolicStep(certificate, rtol, atol, self.settings, logger)
        self.fresh = SymbolicStep(certificate, rtol / 10, atol / 10, self.settings, logger)
        self.poincare = PoincareMap(certificate.geometry.f, certificate.forcing, rtol=POLISH_RTOL, atol=POLISH_ATOL,
                                    settings=self.settings, logger=logger)

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    def itinerary(self, word: Union[Itinerary, Sequence[int]]) -> Itinerary:
        if isinstance(word, Itinerary):
            return word
        return Itinerary(tuple(int(s) for s in word), self.certificate.n, self.certificate.m)

    def seeds(self) -> np.ndarray:
        rect = self.certificate.geometry.M
        nx, ny = self.grid
        s = np.linspace(0.02, 0.98, nx)
        levels = np.linspace(*rect.valid_band, ny)
        return np.concatenate([rect.arc(e, s) for e in levels])

    def _power(self, step: SymbolicStep, length: int):
        def evaluate(points: np.ndarray):
            images = np.asarray(points, dtype=float)
            lost = np.zeros(len(images), dtype=bool)
            for _ in range(length):
                images, _, blown = step(images)
                lost |= blown
            return images, lost

        return evaluate

    def _scalar_power(self, length: int):
        def evaluate(points: np.ndarray):
            images = np.empty_like(points)
            lost = np.zeros(len(points), dtype=bool)
            for index, z in enumerate(points):
                for _ in range(length):
                    z, blowup = self.poincare.step(z)
                    if blowup:
                        lost[index] = True
                        break
                images[index] = z
            return images, lost

        return evaluate

    def _match(self, z: np.ndarray, word: tuple[int, ...]) -> Optional[tuple[int, np.ndarray]]:
        """(shift, iterate) at which the symbols realized from z read `word`, if any rotation does."""
        points, symbols = self.step.iterate(z, len(word))
        for shift in range(len(word)):
            if tuple(symbols[shift:] + symbols[:shift]) == word:
                return shift, points[shift]
        return None

    def find(self, word: Union[Itinerary, Sequence[int]]) -> PeriodicSearch:
        """
        Raises:
            DomainError: If a symbol lies outside the certified alphabet.
        """
        itinerary = self.itinerary(word)
        length = len(itinerary)
        seeds = self.seeds()
        _, first, _ = self.step(seeds)
        seeds = seeds[first == itinerary.symbols[0]]
        search = PeriodicSearch(itinerary, seeds=len(seeds))
        self._log(logging.INFO, f"periodic search for {itinerary.symbols}: {len(seeds)} seeds")
        if len(seeds) == 0:
            search.rejected.append("no grid seed realizes the first symbol")
            return search

        diameter = self.certificate.geometry.M.diameter
        coarse = NewtonSolver(self._power(self.step, length), residual_tol=COARSE_TOL, max_iter=30,
                              max_step=0.05 * diameter, logger=self.logger)
        points, residuals, converged = coarse.solve(seeds)
        candidates = deduplicate(points[converged], residuals[converged])
        search.candidates = len(candidates)

        polish = NewtonSolver(self._scalar_power(length), residual_tol=0.1 * self.residual_tol, max_iter=12,
                              max_step=1e-3 * diameter, logger=self.logger)
        for candidate in candidates:
            z0 = np.array([[candidate.point.x, candidate.point.y]])
            z, residual, _ = polish.solve(z0)
            z, residual = z[0], float(residual[0])
            if not residual < self.residual_tol:
                search.rejected.append(f"({z[0]:.6g}, {z[1]:.6g}): residual {residual:.2e}")
                continue
            match = self._match(z, itinerary.symbols)
            if match is None:
                search.rejected.append(f"({z[0]:.6g}, {z[1]:.6g}): itinerary mismatch")
                continue
            shift, start = match
            if shift:
                start, residual = self._repolish(polish, start)
            orbit = self._verify(start, residual, itinerary)
            if orbit.verified:
                search.orbit = orbit
                self._log(logging.INFO, f"periodic orbit {itinerary.symbols} at ({orbit.point.x:.10g}, "
                                        f"{orbit.point.y:.10g}), residual {orbit.residual:.2e}")
                return search
            search.rejected.append(f"({z[0]:.6g}, {z[1]:.6g}): fresh integration disagrees")
        self._log(logging.INFO, f"periodic search for {itinerary.symbols}: not found")
        return search

    def _repolish(self, polish: NewtonSolver, z: np.ndarray) -> tuple[np.ndarray, float]:
        points, residuals, _ = polish.solve(np.array([z]))
        return points[0], float(residuals[0])

    def _verify(self, z: np.ndarray, residual: float, itinerary: Itinerary) -> PeriodicOrbit:
        points, symbols = self.fresh.iterate(z, len(itinerary))
        fresh_residual = float(np.hypot(*(points[-1] - points[0])))
        verified = (tuple(symbols) == itinerary.symbols and residual < self.residual_tol
                    and fresh_residual < self.fresh_tol)
        return PeriodicOrbit(
            point=PhasePoint(float(z[0]), float(z[1])),
            residual=residual,
            fresh_residual=fresh_residual,
            iterates=[PhasePoint(float(p[0]), float(p[1])) for p in points[:-1]],
            itinerary=itinerary,
            verified=bool(verified),
        )


def find_periodic_orbit(certificate: HorseshoeCertificate, word: Union[Itinerary, Sequence[int]],
                        logger: Optional[logging.Logger] = None, **options) -> PeriodicSearch:
    return PeriodicOrbitFinder(certificate, logger=logger, **options).find(word)
