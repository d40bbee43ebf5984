import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import OdeSolution, solve_ivp

from ap_dynamics.exception.errors import DomainError, EligibilityError, NumericalError
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.nonlinearity import Nonlinearity
from ap_dynamics.timemap.integrals import tau

SEED_FRACTION = 1e-8
ODE_RTOL = 1e-13
CROSSCHECK_TOL = 1e-7
ENERGY_TOL = 1e-9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class HomoclinicOrbit:
    """
    The even homoclinic solution q of u'' + f(u) = k with q(0) = x_h, q'(0) = 0 and
    q(t) -> x_u as |t| -> inf.

    On |t| <= t_tail, q comes from the dense output of the unstable branch integrated from
    x_u + seed to x_h. Beyond t_tail, q - x_u = C exp(-lambda |t|) exactly, with
    C = seed * exp(lambda t_tail).
    """

    frame: EnergyFrame
    lam: float
    seed: float
    t_tail: float
    branch: OdeSolution
    nodes: np.ndarray
    energy_defect: float

    @property
    def tail_constant(self) -> float:
        return self.seed * math.exp(self.lam * self.t_tail)

    @property
    def times(self) -> np.ndarray:
        return self.nodes

    @property
    def samples(self) -> np.ndarray:
        return self.q(self.nodes)

    def qtilde(self, t):
        """q(t) - x_u, computed without cancellation."""
        s = np.abs(np.asarray(t, dtype=float))
        core = s <= self.t_tail
        out = np.empty_like(s)
        if np.any(core):
            out[core] = self.branch(self.t_tail - s[core])[0]
        if np.any(~core):
            out[~core] = self.tail_constant * np.exp(-self.lam * s[~core])
        return out if out.ndim else float(out)

    def q(self, t):
        return self.frame.x_u + self.qtilde(t)

    def velocity(self, t):
        """
        q'(t) = -sign(t) sqrt(2 (Phi_k(x_u) - Phi_k(q(t)))), read from the branch velocity, which
        stays on that energy level within `energy_defect`.
        """
        t_arr = np.asarray(t, dtype=float)
        s = np.abs(t_arr)
        core = s <= self.t_tail
        speed = np.empty_like(s)
        if np.any(core):
            speed[core] = np.abs(self.branch(self.t_tail - s[core])[1])
        if np.any(~core):
            speed[~core] = self.lam * self.tail_constant * np.exp(-self.lam * s[~core])
        out = -np.sign(t_arr) * speed
        return out if out.ndim else float(out)

    def panel_edges(self, a: float, b: float, max_width: float) -> np.ndarray:
        """Split [a, b] (0 <= a < b) at integration nodes and at least every `max_width`."""
        inner = self.nodes[(self.nodes > a) & (self.nodes < b)]
        count = max(1, int(math.ceil((b - a) / max_width)))
        regular = np.linspace(a, b, count + 1)
        return np.unique(np.concatenate([regular, inner]))

    def integrate(self, func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  max_width: float = 0.5) -> float:
        """Integral of a vectorized func on [a, b] by 20-point Gauss-Legendre panels, summed with fsum."""
        if b <= a:
            return 0.0
        edges = self.panel_edges(a, b, max_width)
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        points = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
        values = np.asarray(func(points.ravel()), dtype=float).reshape(points.shape)
        return math.fsum(half * (values @ _GL_WEIGHTS))

    def qtilde_integral(self, a: float = 0.0, b: float = math.inf) -> float:
        """Integral of q - x_u over [a, b], with the exponential tail integrated exactly."""
        upper = min(b, self.t_tail)
        core = self.integrate(self.qtilde, a, upper) if upper > a else 0.0
        tail_from = max(a, self.t_tail)
        if b <= tail_from:
            return core
        c, lam = self.tail_constant, self.lam
        tail = c / lam * (math.exp(-lam * tail_from) - (0.0 if math.isinf(b) else math.exp(-lam * b)))
        return core + tail


def homoclinic_orbit(f: Nonlinearity, k: float, seed_fraction: float = SEED_FRACTION,
                     rtol: float = ODE_RTOL, crosscheck_nodes: int = 8) -> HomoclinicOrbit:
    """
    Compute the homoclinic orbit of the saddle x_u(k).

    The unstable branch starts at xi = x - x_u = seed on the exact energy level of the saddle
    and is integrated until y = 0, which happens at x_h. Node times are then compared with
    the time-map inversion t(x) = integral from x to x_h of ds / sqrt(2 (Phi_k(x_u) - Phi_k(s))).

    Raises:
        EligibilityError: If f is not tagged C2+.
        DomainError: If k <= 0.
        NumericalError: If the branch misses x_h, the energy drifts or the time-map check fails.
    """
    if not f.is_smooth:
        raise EligibilityError(f"{f.name} is {f.smoothness}; the homoclinic analysis needs a C2+ nonlinearity")
    if k <= 0:
        raise DomainError(f"homoclinic orbit requires k > 0, got k={k}")
    frame = EnergyFrame.of(f, k)
    lam = frame.saddle_eigenvalue
    x_u, x_h = frame.x_u, frame.x_h
    seed = seed_fraction * (x_h - x_u)
    y_seed = math.sqrt(2.0 * frame.level_gap(x_u, x_u + seed))

    def field(s, z):
        return [z[1], -(float(f.value(x_u + z[0])) - k)]

    def turn(s, z):
        return z[1]

    turn.terminal = True
    turn.direction = -1

    horizon = 50.0 / lam + 10.0 * (x_h - x_u)
    sol = solve_ivp(field, (0.0, horizon), [seed, y_seed], method="DOP853", rtol=rtol,
                    atol=1e-16 * (x_h - x_u), dense_output=True, events=turn)
    if sol.status != 1 or len(sol.t_events[0]) == 0:
        raise NumericalError(f"unstable branch of x_u={x_u} did not turn back within t={horizon:.3g}")
    t_tail = float(sol.t_events[0][0])
    landing = x_u + float(sol.y_events[0][0][0])
    if abs(landing - x_h) > CROSSCHECK_TOL * (x_h - x_u):
        raise NumericalError(f"unstable branch lands at {landing}, expected x_h={x_h}")

    steps = sol.t[sol.t <= t_tail]
    nodes = np.unique(np.concatenate([[0.0], t_tail - steps, [t_tail]]))
    nodes = nodes[(nodes >= 0.0) & (nodes <= t_tail)]

    xi = sol.sol(steps)
    defect = 0.5 * xi[1] ** 2 - frame.level_gap(x_u, x_u + xi[0])
    energy_defect = float(np.max(np.abs(defect)))
    if energy_defect > ENERGY_TOL:
        raise NumericalError(f"homoclinic energy drifts by {energy_defect:.3e}")

    orbit = HomoclinicOrbit(frame=frame, lam=lam, seed=seed, t_tail=t_tail, branch=sol.sol,
                            nodes=nodes, energy_defect=energy_defect)
    _crosscheck(orbit, crosscheck_nodes)
    return orbit


def _crosscheck(orbit: HomoclinicOrbit, count: int) -> None:
    frame = orbit.frame
    span = frame.x_h - frame.x_u
    usable = orbit.nodes[(orbit.qtilde(orbit.nodes) > 1e-3 * span) & (orbit.nodes > 0)]
    if usable.size == 0 or count <= 0:
        return
    picks = usable[np.linspace(0, usable.size - 1, min(count, usable.size)).astype(int)]
    for t in picks:
        x = float(orbit.q(t))
        t_map = float(tau(frame, frame.phi_at_xu, x, frame.x_h))
        if abs(t_map - t) > CROSSCHECK_TOL * max(1.0, t):
            raise NumericalError(f"homoclinic time {t:.12g} at x={x:.12g} disagrees with time map {t_map:.12g}")
