import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from scipy.integrate import quad

from ap_dynamics.exception.errors import DivergentIntegral, DomainError, NumericalError
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.levels import LevelKind, classify_level

DEFAULT_RTOL = 1e-10
_TURN_TOL = 1e-8
_EQUILIBRIUM_TOL = 1e-8


@dataclass(frozen=True)
class TimeValue:
    """
    Result of a time-map quadrature. A divergent value refuses conversion to float so that
    a truncated infinity is never consumed by mistake.
    """

    value: float
    err_estimate: float
    diverges: bool = False

    def __float__(self) -> float:
        if self.diverges:
            raise DivergentIntegral("time map diverges (level through the saddle)")
        return self.value

    def scaled(self, factor: float) -> "TimeValue":
        return TimeValue(self.value * factor, self.err_estimate * abs(factor), self.diverges)

    def __add__(self, other: "TimeValue") -> "TimeValue":
        return TimeValue(self.value + other.value, self.err_estimate + other.err_estimate,
                         self.diverges or other.diverges)


DIVERGENT = TimeValue(math.inf, math.inf, True)
ZERO = TimeValue(0.0, 0.0, False)


def _half_integral(frame: EnergyFrame, rho: float, a: float, b: float, turning: Optional[float],
                   rtol: float) -> tuple[float, float]:
    """Integral of 1/sqrt(2(rho - Phi)) over [a, b]; `turning` is a or b when it is a turning point."""
    special = [p for p in (*frame.f.breakpoints, frame.x_u) if a < p < b]

    if turning is None:
        def integrand(s: float) -> float:
            return 1.0 / math.sqrt(2.0 * (rho - frame.phi_scalar(s)))

        value, err = quad(integrand, a, b, points=special or None, epsabs=0.0, epsrel=rtol, limit=500)
        return value, err

    # s = e + dir * sigma^2 removes the inverse square root at the turning point e
    direction = 1.0 if turning == a else -1.0
    offset = rho - frame.phi_scalar(turning)
    slope = abs(float(frame.f.value(turning)) - frame.k)
    linear = 2.0 / math.sqrt(2.0 * slope)

    def integrand_sigma(sigma: float) -> float:
        s = turning + direction * sigma * sigma
        gap = offset + frame.level_gap(turning, s)
        if sigma == 0.0 or gap <= 0.0:
            return linear
        return 2.0 * sigma / math.sqrt(2.0 * gap)

    upper = math.sqrt(b - a)
    points = [math.sqrt(abs(p - turning)) for p in special] or None
    value, err = quad(integrand_sigma, 0.0, upper, points=points, epsabs=0.0, epsrel=rtol, limit=500)
    return value, err


def tau(frame: EnergyFrame, rho: float, x1: float, x2: float, rtol: float = DEFAULT_RTOL) -> TimeValue:
    """
    Travel time along the level line E_k = rho between the abscissas x1 and x2:
    the integral of ds / sqrt(2 (rho - Phi_k(s))).

    Endpoints may be turning points (rho = Phi_k there). A turning point that is also an
    equilibrium (the saddle at its own level, or the origin when k = 0) makes the integral
    diverge, which is reported as a divergent `TimeValue`.

    Raises:
        DomainError: If rho - Phi_k is negative at an endpoint or at an interior saddle.
    """
    if x1 == x2:
        return ZERO
    a, b = sorted((float(x1), float(x2)))
    scale = max(1.0, abs(rho))
    gaps = {a: rho - frame.phi_scalar(a), b: rho - frame.phi_scalar(b)}
    for endpoint, gap in gaps.items():
        if gap < -_TURN_TOL * scale:
            raise DomainError(f"level rho={rho} lies below Phi_k at x={endpoint} (gap {gap:.3e})")

    turning = [e for e, g in gaps.items() if g <= _TURN_TOL * scale]
    for e in turning:
        if abs(float(frame.f.value(e)) - frame.k) <= _EQUILIBRIUM_TOL * (1.0 + frame.k):
            return DIVERGENT
    if not frame.is_degenerate and a < frame.x_u < b:
        gap_u = rho - frame.phi_at_xu
        if gap_u < -_TURN_TOL * scale:
            raise DomainError(f"level rho={rho} does not pass over the saddle between {a} and {b}")
        if gap_u <= _TURN_TOL * scale:
            return DIVERGENT

    mid = 0.5 * (a + b)
    left = _half_integral(frame, rho, a, mid, a if a in turning else None, rtol)
    right = _half_integral(frame, rho, mid, b, b if b in turning else None, rtol)
    value = left[0] + right[0]
    if not math.isfinite(value):
        raise NumericalError(f"time map quadrature returned {value} on [{a}, {b}] at rho={rho}")
    return TimeValue(value, left[1] + right[1])


def _closed_band(frame: EnergyFrame, rho: float):
    if frame.is_degenerate or not frame.phi_at_xs < rho < frame.phi_at_xu:
        raise DomainError(
            f"rho={rho} outside the closed-orbit band ({frame.phi_at_xs}, {frame.phi_at_xu}) at k={frame.k}"
        )
    return classify_level(frame, rho)


def tau_O(frame: EnergyFrame, rho: float, r: float, rtol: float = DEFAULT_RTOL) -> TimeValue:
    """Time from (x_-(rho), 0) to abscissa r along the closed orbit O_rho (upper or lower half)."""
    level = _closed_band(frame, rho)
    x_minus, x_plus = level["x_-"], level["x_+"]
    if not x_minus < r <= x_plus + 1e-12 * max(1.0, abs(x_plus)):
        raise DomainError(f"r={r} outside (x_-, x_+] = ({x_minus}, {x_plus}]")
    return tau(frame, rho, x_minus, min(r, x_plus), rtol)


def period_O(frame: EnergyFrame, rho: float, rtol: float = DEFAULT_RTOL) -> TimeValue:
    level = _closed_band(frame, rho)
    return tau(frame, rho, level["x_-"], level["x_+"], rtol).scaled(2.0)


def _doubled_branch(frame: EnergyFrame, rho: float, r: float, turning: float, rtol: float) -> TimeValue:
    if abs(r - turning) <= 1e-12 * max(1.0, abs(turning)):
        return ZERO
    if r > turning:
        raise DomainError(f"r={r} must lie left of the turning point {turning}")
    return tau(frame, rho, r, turning, rtol).scaled(2.0)


def tau_V(frame: EnergyFrame, rho: float, r: float, rtol: float = DEFAULT_RTOL) -> TimeValue:
    """Time from (r, y>0) to (r, y<0) along the V-shaped line through x_*(rho)."""
    if not rho < frame.phi_at_xu:
        raise DomainError(f"no V-shaped level line at rho={rho} >= Phi_k(x_u)={frame.phi_at_xu}")
    return _doubled_branch(frame, rho, r, classify_level(frame, rho)["x_*"], rtol)


def tau_U(frame: EnergyFrame, rho: float, r: float, rtol: float = DEFAULT_RTOL) -> TimeValue:
    """Time from (r, y>0) to (r, y<0) along the U-shaped line through x^*(rho)."""
    if not rho > frame.phi_at_xu:
        raise DomainError(f"no U-shaped level line at rho={rho} <= Phi_k(x_u)={frame.phi_at_xu}")
    level = classify_level(frame, rho)
    if level.kind is not LevelKind.OUTER_U:
        raise DomainError(f"rho={rho} is classified {level.kind.value}, not OuterU")
    return _doubled_branch(frame, rho, r, level["x^*"], rtol)


class TimeMapKind(str, Enum):
    GENERIC = "Generic"
    O = "O"
    V = "V"
    U = "U"


@dataclass(frozen=True)
class TimeMapQuery:
    """
    A time-map request. For kind Generic, `x1` and `x2` are the integration limits; for O, V and
    U, `x1` is the abscissa r of the corresponding formula and `x2` is ignored.
    """

    frame: EnergyFrame
    rho: float
    x1: float
    x2: Optional[float] = None
    kind: TimeMapKind = TimeMapKind.GENERIC
    rtol: float = DEFAULT_RTOL

    def evaluate(self) -> TimeValue:
        if self.kind is TimeMapKind.GENERIC:
            if self.x2 is None:
                raise DomainError("a Generic time-map query needs both x1 and x2")
            return tau(self.frame, self.rho, self.x1, self.x2, self.rtol)
        handler = {
            TimeMapKind.O: tau_O,
            TimeMapKind.V: tau_V,
            TimeMapKind.U: tau_U,
        }.get(self.kind)
        return handler(self.frame, self.rho, self.x1, self.rtol)
