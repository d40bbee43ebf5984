from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.model.frame import EnergyFrame, solve_bracketed, solve_monotone
from ap_dynamics.model.nonlinearity import Nonlinearity

LEVEL_TOL = 1e-12


class LevelKind(str, Enum):
    SADDLE_LOOP = "SaddleLoop"
    THREE_ROOTS = "ThreeRoots"
    CENTER_TANGENT = "CenterTangent"
    OUTER_U = "OuterU"
    INNER_V = "InnerV"
    DEGENERATE_SINGLE = "DegenerateSingle"


@dataclass(frozen=True)
class LevelClassification:
    """
    Shape of the level set E_k = rho and its x-axis crossings.

    Root keys: ``x_*`` (left branch, the V-shaped line), ``x_-`` and ``x_+`` (closed orbit
    around the center), ``x^*`` (U-shaped line), ``x_u``/``x_h`` (saddle loop), ``x_s``
    (center, tangent level) and ``x_0`` (origin, k = 0).
    """

    rho: float
    kind: LevelKind
    roots: Mapping[str, float] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.roots[key]


def _level_tol(value: float, tol: float) -> float:
    return tol * max(1.0, abs(value))


def classify_level(frame: EnergyFrame, rho: float, tol: float = LEVEL_TOL) -> LevelClassification:
    """
    Classify the level rho of E_k and locate its roots on the monotone branches of Phi_k.

    For k = 0, Phi_0 = F is increasing and every level crosses the axis once. For k > 0, levels
    below Phi_k(x_s) are V-shaped, levels strictly between the equilibria values give a
    V-shaped line plus a closed orbit, Phi_k(x_u) is the saddle loop and higher levels are
    U-shaped.
    """
    phi = frame.phi_scalar
    if frame.is_degenerate:
        if abs(rho) <= _level_tol(0.0, tol):
            return LevelClassification(rho, LevelKind.DEGENERATE_SINGLE, MappingProxyType({"x_0": 0.0}))
        if rho > 0:
            return LevelClassification(rho, LevelKind.OUTER_U,
                                       MappingProxyType({"x^*": solve_monotone(phi, rho, 0.0, 1.0)}))
        return LevelClassification(rho, LevelKind.INNER_V,
                                   MappingProxyType({"x_*": solve_monotone(phi, rho, 0.0, -1.0)}))

    top, bottom = frame.phi_at_xu, frame.phi_at_xs
    if abs(rho - top) <= _level_tol(top, tol):
        return LevelClassification(rho, LevelKind.SADDLE_LOOP, MappingProxyType({"x_u": frame.x_u, "x_h": frame.x_h}))
    if rho > top:
        return LevelClassification(rho, LevelKind.OUTER_U,
                                   MappingProxyType({"x^*": solve_monotone(phi, rho, frame.x_s, 1.0)}))

    x_star = solve_monotone(phi, rho, frame.x_u, -1.0)
    if abs(rho - bottom) <= _level_tol(bottom, tol):
        return LevelClassification(rho, LevelKind.CENTER_TANGENT, MappingProxyType({"x_*": x_star, "x_s": frame.x_s}))
    if rho < bottom:
        return LevelClassification(rho, LevelKind.INNER_V, MappingProxyType({"x_*": x_star}))

    # Phi_k is decreasing on [x_u, x_s] and increasing on [x_s, x_h]
    x_minus = solve_bracketed(phi, rho, frame.x_u, frame.x_s)
    x_plus = solve_bracketed(phi, rho, frame.x_s, frame.x_h)
    return LevelClassification(
        rho, LevelKind.THREE_ROOTS, MappingProxyType({"x_*": x_star, "x_-": x_minus, "x_+": x_plus})
    )


@dataclass(frozen=True)
class OrderingReport:
    x_u_k1: float
    x_u_k2: float
    x_h_k1: float
    x_h_k2: float
    holds: bool

    @property
    def chain(self) -> tuple[float, float, float, float]:
        return self.x_u_k2, self.x_u_k1, self.x_h_k1, self.x_h_k2


def ordering_check(f: Nonlinearity, k1: float, k2: float) -> OrderingReport:
    """
    Nesting of saddle loops: x_u(k2) < x_u(k1) < x_h(k1) < x_h(k2) for 0 <= k1 < k2.

    For k1 = 0 the loop collapses to the origin (x_u(0) = x_h(0) = 0), so the middle relation
    is an equality and the outer two must hold strictly.

    Raises:
        DomainError: If k1 < 0 or k1 >= k2.
    """
    if k1 < 0:
        raise DomainError(f"ordering check requires k1 >= 0, got k1={k1}")
    if k1 >= k2:
        raise DomainError(f"ordering check requires k1 < k2, got k1={k1}, k2={k2}")
    low, high = EnergyFrame.of(f, k1), EnergyFrame.of(f, k2)
    x_h_k1 = 0.0 if low.is_degenerate else low.x_h
    middle = (low.x_u == x_h_k1) if low.is_degenerate else (low.x_u < x_h_k1)
    holds = high.x_u < low.x_u and middle and x_h_k1 < high.x_h
    return OrderingReport(x_u_k1=low.x_u, x_u_k2=high.x_u, x_h_k1=x_h_k1, x_h_k2=high.x_h, holds=bool(holds))
