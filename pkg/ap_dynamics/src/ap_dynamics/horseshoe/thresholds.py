from dataclasses import asdict, dataclass
from typing import Optional

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.horseshoe.regions import RegionGeometry
from ap_dynamics.timemap.integrals import DEFAULT_RTOL, tau_O, tau_U, tau_V


@dataclass(frozen=True)
class TauStars:
    """
    Switching-time thresholds. tau1 = max(tau_V_A, tau_U_B) bounds the k1 phase,
    tau2 = tau_O_D + (m - 1) * period_O_D the k2 phase.
    """

    tau1: float
    tau2: float
    tau_V_A: Optional[float]
    tau_U_B: float
    tau_O_D: float
    period_O_D: float
    m: int

    def as_dict(self) -> dict:
        return asdict(self)


def tau_stars(geom: RegionGeometry, m: int, rtol: float = DEFAULT_RTOL) -> TauStars:
    """
    Thresholds for the stepwise system with levels A, B, D.

    tau_V_A = tau_V(A; x_u(k2)) and tau_U_B = tau_U(B; x_u(k2)) are taken in frame k1, tau_O_D =
    tau_O(D; b) and period_O_D = 2 tau_O(D; x_+(D)) in frame k2.

    With k1 = 0 the strip has no V-shaped part, so tau_V_A is None; tau_U_B is measured from
    the corner (B - Phi_k2(x_u(k2))) / k2 of M, and winding is counted around x_s(k2), which
    makes tau_O_D one full period.

    Raises:
        DomainError: If m < 1.
        DivergentIntegral: If a component diverges (a level touching a saddle).
    """
    if m < 1:
        raise DomainError(f"the number of k2 symbols must be >= 1, got m={m}")
    frame1, frame2 = geom.frame1, geom.frame2
    period = 2.0 * float(tau_O(frame2, geom.D, geom.x_plus_D, rtol))

    if geom.is_degenerate:
        tau_v = None
        corner = (geom.B - geom.H2) / (geom.k2 - geom.k1)
        tau_u = float(tau_U(frame1, geom.B, corner, rtol))
        tau_o = period
    else:
        tau_v = float(tau_V(frame1, geom.A, frame2.x_u, rtol))
        tau_u = float(tau_U(frame1, geom.B, frame2.x_u, rtol))
        tau_o = float(tau_O(frame2, geom.D, geom.b, rtol))

    tau1 = max(v for v in (tau_v, tau_u) if v is not None)
    return TauStars(
        tau1=tau1,
        tau2=tau_o + (m - 1) * period,
        tau_V_A=tau_v,
        tau_U_B=tau_u,
        tau_O_D=tau_o,
        period_O_D=period,
        m=m,
    )
