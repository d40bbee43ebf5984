from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from ap_dynamics.exception.errors import DomainError, NumericalError
from ap_dynamics.model.nonlinearity import Nonlinearity

ROOT_XTOL = 1e-13
ROOT_RTOL = 4 * np.finfo(float).eps

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_SPAN = 1.0


class PhasePoint(NamedTuple):
    """A point (x, y) = (u, u') of the phase plane."""

    x: float
    y: float


def solve_monotone(func: Callable[[float], float], target: float, anchor: float, direction: float) -> float:
    """
    Solve func(x) = target on the ray from `anchor` in `direction`, func monotone on the ray.

    The bracket is grown geometrically from `anchor` until the sign flips, then refined by
    Brent's method (bisection safeguarded secant/inverse quadratic steps).

    Raises:
        NumericalError: If no sign change is found before |x| exceeds 1e15.
    """
    inner = func(anchor) - target
    if inner == 0:
        return float(anchor)
    step = max(1.0, abs(anchor))
    outer = anchor + direction * step
    while np.sign(func(outer) - target) == np.sign(inner):
        step *= 2.0
        outer = anchor + direction * step
        if abs(outer) > 1e15:
            raise NumericalError(f"no root of level {target} found from {anchor} toward {direction:+.0f}")
    lo, hi = sorted((anchor, outer))
    return float(brentq(lambda s: func(s) - target, lo, hi, xtol=ROOT_XTOL, rtol=ROOT_RTOL, maxiter=500))


def solve_bracketed(func: Callable[[float], float], target: float, lo: float, hi: float) -> float:
    """
    Solve func(x) = target on [lo, hi], func monotone there and the level between its end values.

    Raises:
        NumericalError: If the end values do not straddle the level.
    """
    a, b = func(lo) - target, func(hi) - target
    if a == 0:
        return float(lo)
    if b == 0:
        return float(hi)
    if np.sign(a) == np.sign(b):
        raise NumericalError(f"level {target} is not bracketed by [{lo}, {hi}]")
    return float(brentq(lambda s: func(s) - target, lo, hi, xtol=ROOT_XTOL, rtol=ROOT_RTOL, maxiter=500))


def equilibria(f: Nonlinearity, k: float) -> tuple[float, float]:
    """
    Equilibria (x_u, 0) and (x_s, 0) of u'' + f(u) = k: the saddle x_u = f_l^-1(k) <= 0 and the
    center x_s = f_r^-1(k) >= 0. Both collapse to the origin when k = 0.

    Raises:
        DomainError: If k < 0 (no equilibria).
    """
    if k < 0:
        raise DomainError(f"equilibria require k >= 0, got k={k}")
    return f.left_inverse(k), f.right_inverse(k)


def phi(frame: "EnergyFrame", x):
    return frame.phi(x)


def energy(frame: "EnergyFrame", z) -> float:
    x, y = z
    return frame.energy(x, y)


def homoclinic_intercept(f: Nonlinearity, k: float) -> float:
    """
    x_h(k): the solution of Phi_k(x) = Phi_k(x_u) with x > x_s.

    Raises:
        DomainError: If k <= 0, where the saddle loop degenerates.
    """
    if k <= 0:
        raise DomainError(f"homoclinic intercept requires k > 0, got k={k}")
    return EnergyFrame.of(f, k).x_h


@dataclass(frozen=True)
class EnergyFrame:
    """
    The autonomous system x' = y, y' = -f(x) + k frozen at a level k >= 0, with
    Phi_k(x) = F(x) - k x and energy E_k(x, y) = y^2/2 + Phi_k(x).

    For k > 0, Phi_k is N-shaped: increasing up to the saddle x_u, decreasing to the
    center x_s, increasing afterwards. x_h is where the homoclinic loop of the saddle
    meets the x-axis to the right of the center.
    """

    f: Nonlinearity
    k: float
    x_u: float
    x_s: float
    phi_at_xu: float
    phi_at_xs: float
    x_h: Optional[float]

    @classmethod
    def of(cls, f: Nonlinearity, k: float) -> "EnergyFrame":
        x_u, x_s = equilibria(f, k)
        phi_u = float(f.potential(x_u) - k * x_u)
        phi_s = float(f.potential(x_s) - k * x_s)
        if k == 0:
            return cls(f=f, k=0.0, x_u=0.0, x_s=0.0, phi_at_xu=0.0, phi_at_xs=0.0, x_h=None)
        if not (x_u < 0 < x_s and phi_u > 0 > phi_s):
            raise NumericalError(
                f"{f.name}, k={k}: equilibria ({x_u}, {x_s}) with Phi ({phi_u}, {phi_s}) are not saddle-center"
            )

        def _phi(x: float) -> float:
            return float(f.potential(x) - k * x)

        x_h = solve_monotone(_phi, phi_u, anchor=x_s, direction=1.0)
        if not x_h > x_s:
            raise NumericalError(f"{f.name}, k={k}: x_h={x_h} does not lie right of x_s={x_s}")
        return cls(f=f, k=float(k), x_u=x_u, x_s=x_s, phi_at_xu=phi_u, phi_at_xs=phi_s, x_h=x_h)

    @property
    def is_degenerate(self) -> bool:
        return self.k == 0

    def phi(self, x):
        return self.f.potential(x) - self.k * x

    def phi_scalar(self, x: float) -> float:
        return float(self.phi(x))

    def energy(self, x, y):
        return 0.5 * np.square(y) + self.phi(x)

    def level_gap(self, x_ref: float, s):
        """
        Phi_k(x_ref) - Phi_k(s), accurate when s is close to x_ref.

        Short intervals free of breakpoints are integrated as the integral of (f - k) from s
        to x_ref by 16-point Gauss-Legendre, which avoids the cancellation of the direct
        difference near turning points and near the saddle.
        """
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        gap = self.phi_scalar(x_ref) - np.asarray(self.phi(s_arr), dtype=float)
        close = np.abs(s_arr - x_ref) <= _GL_SPAN
        for b in self.f.breakpoints:
            close &= ~((np.minimum(s_arr, x_ref) < b) & (b < np.maximum(s_arr, x_ref)))
        if np.any(close):
            sc = s_arr[close]
            half = 0.5 * (x_ref - sc)
            nodes = 0.5 * (x_ref + sc)[:, None] + half[:, None] * _GL_NODES[None, :]
            integrand = np.asarray(self.f.value(nodes), dtype=float) - self.k
            gap[close] = half * (integrand @ _GL_WEIGHTS)
        if np.ndim(s) == 0:
            return float(gap[0])
        return gap

    @property
    def saddle_eigenvalue(self) -> float:
        """lambda = sqrt(-f'(x_u)), the unstable eigenvalue of the saddle."""
        if self.is_degenerate:
            raise DomainError("the origin is not a hyperbolic saddle when k = 0")
        slope = float(self.f.derivative(self.x_u))
        if not slope < 0:
            raise NumericalError(f"f'(x_u) = {slope} is not negative")
        return float(np.sqrt(-slope))
