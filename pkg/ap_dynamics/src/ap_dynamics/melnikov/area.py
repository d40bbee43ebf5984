import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from ap_dynamics.exception.errors import DomainError, NumericalError
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.nonlinearity import Nonlinearity

AREA_RTOL = 1e-10
FLAT_TOL = 1e-9


def loop_area_k(f: Nonlinearity, k: float) -> float:
    """
    Area enclosed by the homoclinic loop of the frozen system at level k:
    S(k) = 2 * integral from x_u to x_h of sqrt(2 (Phi_k(x_u) - Phi_k(x))) dx.

    Raises:
        DomainError: If k <= 0.
    """
    if k <= 0:
        raise DomainError(f"the homoclinic loop exists for k > 0, got k={k}")
    return _cached_area(f, float(k))


@lru_cache(maxsize=4096)
def _cached_area(f: Nonlinearity, k: float) -> float:
    frame = EnergyFrame.of(f, k)
    x_u, x_h = frame.x_u, frame.x_h
    points = [b for b in (*f.breakpoints, frame.x_s) if x_u < b < x_h]

    def integrand(x: float) -> float:
        return math.sqrt(max(2.0 * frame.level_gap(x_u, x), 0.0))

    value, err = quad(integrand, x_u, x_h, points=points or None, epsabs=0.0, epsrel=AREA_RTOL, limit=400)
    if not math.isfinite(value) or err > 1e-6 * max(1.0, value):
        raise NumericalError(f"loop area quadrature at k={k} did not converge (err {err:.2e})")
    return 2.0 * value


def area_monotone_check(f: Nonlinearity, k_grid: Optional[Sequence[float]] = None) -> bool:
    """Whether S(k) is strictly increasing on the grid (default: 31 points on [0.5, 3.5])."""
    grid = np.linspace(0.5, 3.5, 31) if k_grid is None else np.asarray(k_grid, dtype=float)
    areas = np.array([loop_area_k(f, k) for k in grid])
    return bool(np.all(np.diff(areas) > 0))


@dataclass(frozen=True)
class AreaProfile:
    thetas: np.ndarray
    levels: np.ndarray
    areas: np.ndarray


def loop_area(f: Nonlinearity, p: Callable[[float], float], thetas: Sequence[float]) -> AreaProfile:
    """
    S(theta) = S(p(theta)) sampled on `thetas`.

    Raises:
        DomainError: If p(theta) <= 0 at any sample.
    """
    thetas = np.asarray(thetas, dtype=float)
    levels = np.array([float(p(theta)) for theta in thetas])
    bad = np.flatnonzero(levels <= 0)
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"p({thetas[i]:.6g}) = {levels[i]:.6g} <= 0: the frozen system has no homoclinic loop")
    areas = np.array([loop_area_k(f, k) for k in levels])
    return AreaProfile(thetas=thetas, levels=levels, areas=areas)


@dataclass(frozen=True)
class AreaInterval:
    """
    An interval [theta_minus, theta_plus] around an extremum of S. At a maximum
    S'(theta_minus) > 0 > S'(theta_plus), at a minimum the signs are reversed.
    """

    theta_minus: float
    theta_plus: float
    kind: Literal["max", "min"]
    index: int
    period: float

    def shifted(self, n: int) -> "AreaInterval":
        """The same interval n periods later; intervals of the same kind recur every period."""
        offset = n * self.period
        return AreaInterval(self.theta_minus + offset, self.theta_plus + offset, self.kind,
                            self.index + 2 * n, self.period)


def _one_period(thetas: np.ndarray, areas: np.ndarray, period: float) -> tuple[np.ndarray, np.ndarray]:
    if thetas.size < 8:
        raise DomainError(f"at least 8 samples of S are needed, got {thetas.size}")
    if not np.all(np.diff(thetas) > 0):
        raise DomainError("theta samples must be strictly increasing")
    if thetas[-1] - thetas[0] >= period * (1 - 1e-12):
        keep = thetas < thetas[0] + period * (1 - 1e-12)
        thetas, areas = thetas[keep], areas[keep]
    span = thetas[-1] - thetas[0]
    spacing = np.diff(thetas)
    if abs(span + spacing.mean() - period) > 1e-6 * period:
        raise DomainError(f"theta samples must cover one period {period:.6g} on a uniform grid")
    return thetas, areas


def propose_intervals(thetas: Sequence[float], areas: Sequence[float], period: float,
                      flat_tol: float = FLAT_TOL) -> list[AreaInterval]:
    """
    Intervals around the alternating extrema of a periodic area profile.

    Extrema come from sign changes of the cyclic forward differences. Each interval is centered
    at its extremum with half-width a quarter of the distance to the nearest neighbouring
    extremum, and kept only when the derivative (central differences, interpolated) has the
    required sign at both ends. A flat profile yields no intervals.
    """
    thetas, areas = _one_period(np.asarray(thetas, dtype=float), np.asarray(areas, dtype=float), period)
    scale = max(1.0, float(np.max(np.abs(areas))))
    if float(np.ptp(areas)) <= flat_tol * scale:
        return []

    h = period / thetas.size
    forward = np.roll(areas, -1) - areas
    slope = (np.roll(areas, -1) - np.roll(areas, 1)) / (2.0 * h)
    step_sign = np.sign(np.where(np.abs(forward) <= flat_tol * scale, 0.0, forward))
    extrema = []
    previous = step_sign[np.flatnonzero(step_sign)[-1]] if np.any(step_sign) else 0.0
    for i, s in enumerate(step_sign):
        if s != 0 and previous != 0 and s != previous:
            extrema.append((i, "max" if previous > 0 else "min"))
        if s != 0:
            previous = s
    if not extrema:
        return []

    centers = np.array([thetas[i] for i, _ in extrema])
    intervals = []
    for n, (i, kind) in enumerate(extrema):
        before = centers[n] - centers[n - 1] if len(centers) > 1 else period
        after = centers[(n + 1) % len(centers)] - centers[n] if len(centers) > 1 else period
        before, after = before % period or period, after % period or period
        half = 0.25 * min(before, after)
        lo, hi = centers[n] - half, centers[n] + half
        s_lo = np.interp(lo, thetas, slope, period=period)
        s_hi = np.interp(hi, thetas, slope, period=period)
        sign = 1.0 if kind == "max" else -1.0
        if sign * s_lo > 0 > sign * s_hi:
            intervals.append(AreaInterval(float(lo), float(hi), kind, len(intervals), period))
    return intervals
