import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ap_dynamics.flow.forcing import ForcingSpec
from ap_dynamics.flow.poincare import PoincareMap
from ap_dynamics.model.frame import PhasePoint
from ap_dynamics.model.nonlinearity import Nonlinearity

FD_STEP = 1e-6
DEDUP_RADIUS = 1e-6
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class Window:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.x_max - self.x_min, self.y_max - self.y_min))

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return ((points[:, 0] >= self.x_min) & (points[:, 0] <= self.x_max)
                & (points[:, 1] >= self.y_min) & (points[:, 1] <= self.y_max))

    def grid(self, nx: int, ny: int) -> np.ndarray:
        xs = np.linspace(self.x_min, self.x_max, nx)
        ys = np.linspace(self.y_min, self.y_max, ny)
        return np.array([(x, y) for x in xs for y in ys])


@dataclass(frozen=True)
class FixedPoint:
    point: PhasePoint
    residual: float


def deduplicate(points: np.ndarray, residuals: np.ndarray, radius: float = DEDUP_RADIUS) -> list[FixedPoint]:
    """Keep the lowest-residual representative of every cluster of points closer than `radius`."""
    kept: list[FixedPoint] = []
    for index in np.argsort(residuals, kind="stable"):
        z = points[index]
        if all(np.hypot(z[0] - k.point.x, z[1] - k.point.y) >= radius for k in kept):
            kept.append(FixedPoint(PhasePoint(float(z[0]), float(z[1])), float(residuals[index])))
    return sorted(kept, key=lambda fp: (fp.point.x, fp.point.y))


class NewtonSolver:
    """
    Damped Newton iteration on G(z) = Phi(z) - z for a batch of seeds, where Phi is evaluated on
    whole batches (`evaluate(points) -> (images, lost)`). The Jacobian comes from central
    differences; when it is near-singular the step falls back to a Broyden secant matrix
    (minus identity at start, i.e. a Picard step). Each seed keeps its own damping factor.
    """

    def __init__(self, evaluate, residual_tol: float = RESIDUAL_TOL, max_iter: int = 40,
                 max_step: float = 1.0, logger: Optional[logging.Logger] = None):
        self.evaluate = evaluate
        self.residual_tol = residual_tol
        self.max_iter = max_iter
        self.max_step = max_step
        self.logger = logger

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    def _jacobians(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = len(z)
        offsets = np.array([(FD_STEP, 0.0), (-FD_STEP, 0.0), (0.0, FD_STEP), (0.0, -FD_STEP)])
        stencil = (z[:, None, :] + offsets[None, :, :]).reshape(-1, 2)
        images, lost = self.evaluate(stencil)
        images = images.reshape(n, 4, 2)
        lost = lost.reshape(n, 4).any(axis=1)
        jac = np.empty((n, 2, 2))
        jac[:, :, 0] = (images[:, 0] - images[:, 1]) / (2 * FD_STEP)
        jac[:, :, 1] = (images[:, 2] - images[:, 3]) / (2 * FD_STEP)
        return jac - np.eye(2)[None, :, :], lost

    def solve(self, seeds: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Returns:
            (points, residuals, converged) for every seed, in seed order.
        """
        z = np.array(seeds, dtype=float)
        n = len(z)
        images, lost = self.evaluate(z)
        g = images - z
        residual = np.where(lost, np.inf, np.linalg.norm(g, axis=1))
        damping = np.ones(n)
        broyden = np.repeat(-np.eye(2)[None, :, :], n, axis=0)
        active = np.isfinite(residual) & (residual >= self.residual_tol)

        for iteration in range(self.max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            jac, jac_lost = self._jacobians(z[idx])
            steps = np.empty((idx.size, 2))
            for j, i in enumerate(idx):
                matrix = jac[j]
                if jac_lost[j] or abs(np.linalg.det(matrix)) < 1e-12 * max(1.0, np.sum(matrix * matrix)):
                    matrix = broyden[i]
                step = np.linalg.lstsq(matrix, -g[i], rcond=None)[0]
                norm = np.linalg.norm(step)
                if norm > self.max_step:
                    step *= self.max_step / norm
                steps[j] = damping[i] * step

            trial = z[idx] + steps
            trial_images, trial_lost = self.evaluate(trial)
            trial_g = trial_images - trial
            trial_res = np.where(trial_lost, np.inf, np.linalg.norm(trial_g, axis=1))
            for j, i in enumerate(idx):
                if trial_res[j] < residual[i]:
                    dz, dg = steps[j], trial_g[j] - g[i]
                    broyden[i] += np.outer(dg - broyden[i] @ dz, dz) / max(dz @ dz, 1e-300)
                    z[i], g[i], residual[i] = trial[j], trial_g[j], trial_res[j]
                    damping[i] = min(1.0, 2.0 * damping[i])
                else:
                    damping[i] *= 0.5
                    if damping[i] < 1.0 / 64:
                        active[i] = False
                if residual[i] < self.residual_tol:
                    active[i] = False
            self._log(logging.DEBUG, f"newton iteration {iteration}: {int(active.sum())} seeds active")

        return z, residual, residual < self.residual_tol


class FixedPointScanner:
    """Grid-seeded search for fixed points of a Poincare map inside a window."""

    def __init__(self, psi: PoincareMap, logger: Optional[logging.Logger] = None):
        self.psi = psi
        self.logger = logger

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    def _evaluate(self, points: np.ndarray):
        result = self.psi.map_many(points)
        return result.points, result.blowup

    def scan(self, window: Window, grid: tuple[int, int] = (9, 7)) -> list[FixedPoint]:
        seeds = window.grid(*grid)
        solver = NewtonSolver(self._evaluate, max_step=0.25 * window.diameter, logger=self.logger)
        points, residuals, converged = solver.solve(seeds)
        keep = converged & window.contains(points)
        found = deduplicate(points[keep], residuals[keep])
        self._log(logging.INFO, f"fixed point scan: {int(keep.sum())} converged seeds, {len(found)} distinct")
        return found


def fixed_point_scan(f: Nonlinearity, forcing: ForcingSpec, window: Window, grid: tuple[int, int] = (9, 7),
                     logger: Optional[logging.Logger] = None, **map_options) -> list[FixedPoint]:
    """
    Fixed points of the Poincare map of `forcing` inside `window`, each with |Psi(z) - z| < 1e-9,
    deduplicated within 1e-6. An empty list is a valid answer.
    """
    psi = PoincareMap(f, forcing, logger=logger, **map_options)
    return FixedPointScanner(psi, logger).scan(window, grid)
