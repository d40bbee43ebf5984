from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from ap_dynamics.exception.errors import ConstraintViolation
from ap_dynamics.model.frame import EnergyFrame
from ap_dynamics.model.levels import classify_level
from ap_dynamics.model.nonlinearity import Nonlinearity

STABLE_MARGIN = 1e-3
ARC_SAMPLES = 129
BAND_SCAN = 401
BISECTION_STEPS = 48


@dataclass(frozen=True)
class EnergyLevels:
    """Energy levels A, B (frame k1) and D (frame k2). Missing levels are chosen automatically."""

    A: Optional[float] = None
    B: Optional[float] = None
    D: Optional[float] = None


class Hole(NamedTuple):
    """Interior of the k1 saddle loop, removed from the strip: E_k1 < level and x > x_u."""

    frame: EnergyFrame
    x_u: float
    level: float
    width: float


def _points(points) -> np.ndarray:
    return np.atleast_2d(np.asarray(points, dtype=float))


@dataclass(frozen=True)
class OrientedRectangle:
    """
    A curvilinear rectangle cut from the strip and the annulus by one half-plane.

    The [-]-sides are the level lines E_side = side_from (u = 0) and E_side = side_to (u = 1);
    the [+]-sides are the band levels band_lo and band_hi of the other energy. Points are
    charted by (side level h, band level e): x = (h - e) / (k_band - k_side), which follows
    from E_k1 - E_k2 = (k2 - k1) x, and y = sign * sqrt(2 (e - Phi_band(x))).
    """

    name: str
    side_frame: EnergyFrame
    side_from: float
    side_to: float
    band_frame: EnergyFrame
    band_lo: float
    band_hi: float
    sign: float
    x_floor: float
    hole: Optional[Hole] = None
    valid_band: tuple[float, float] = (0.0, 0.0)
    bbox: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    @property
    def diameter(self) -> float:
        x0, x1, y0, y1 = self.bbox
        return float(np.hypot(x1 - x0, y1 - y0))

    def side_coordinate(self, points) -> np.ndarray:
        """u = 0 on the first [-]-side, u = 1 on the second."""
        z = _points(points)
        energy = self.side_frame.energy(z[:, 0], z[:, 1])
        return (energy - self.side_from) / (self.side_to - self.side_from)

    def tube_slack(self, points) -> np.ndarray:
        """
        Normalized distance to the [+]-sides, the half-plane edge, the saddle abscissa of the
        annulus and the hole; positive strictly inside.
        """
        z = _points(points)
        x, y = z[:, 0], z[:, 1]
        scale = max(self.diameter, 1e-12)
        band = self.band_frame.energy(x, y)
        width = self.band_hi - self.band_lo
        slack = np.minimum((band - self.band_lo) / width, (self.band_hi - band) / width)
        slack = np.minimum(slack, self.sign * y / scale)
        slack = np.minimum(slack, (x - self.x_floor) / scale)
        if self.hole is not None:
            level = self.hole.frame.energy(x, y)
            outside = np.maximum((level - self.hole.level) / self.hole.width, (self.hole.x_u - x) / scale)
            slack = np.minimum(slack, outside)
        return np.where(np.isfinite(slack), slack, -np.inf)

    def contains(self, points) -> np.ndarray:
        u = self.side_coordinate(points)
        return (u >= 0) & (u <= 1) & (self.tube_slack(points) >= 0)

    def chart(self, side_level, band_level) -> tuple[np.ndarray, np.ndarray]:
        """(points, y_squared) for the chart; y is set to 0 where y_squared < 0."""
        h = np.asarray(side_level, dtype=float)
        e = np.asarray(band_level, dtype=float)
        x = (h - e) / (self.band_frame.k - self.side_frame.k)
        y2 = 2.0 * (e - np.asarray(self.band_frame.phi(x), dtype=float))
        y = self.sign * np.sqrt(np.maximum(y2, 0.0))
        return np.column_stack(np.broadcast_arrays(x, y)), np.broadcast_to(y2, np.shape(x))

    def arc(self, band_level: float, s) -> np.ndarray:
        """Points of the band level line at side parameter s in [0, 1], running from u = 0 to u = 1."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        points, _ = self.chart(self.side_from + s * (self.side_to - self.side_from), band_level)
        return points

    def arc_valid(self, band_level: float, samples: int = ARC_SAMPLES) -> bool:
        """Whether the whole band level arc from one [-]-side to the other lies in the rectangle."""
        s = np.linspace(0.0, 1.0, samples)
        h = self.side_from + s * (self.side_to - self.side_from)
        points, y2 = self.chart(h, band_level)
        if not np.all(y2 > 0):
            return False
        x = points[:, 0]
        if not np.all(x > self.x_floor):
            return False
        if self.hole is not None:
            level = self.hole.frame.energy(x, points[:, 1])
            if not np.all((level >= self.hole.level) | (x <= self.hole.x_u)):
                return False
        return True


@dataclass(frozen=True)
class RegionGeometry:
    """
    Strip S = {A <= E_k1 <= B} without the interior of the k1 saddle loop, annulus
    {D <= E_k2 <= Phi_k2(x_u(k2))} inside the k2 saddle loop, and the rectangles
    M = S n annulus n {y > 0}, N = S n annulus n {y < 0}.

    For k1 = 0 the strip is {0 <= E_0 <= B} with no hole and `a` is None.
    """

    f: Nonlinearity
    frame1: EnergyFrame
    frame2: EnergyFrame
    A: float
    B: float
    D: float
    a: Optional[float]
    d: float
    x_plus_D: float
    b: float
    M: OrientedRectangle = field(repr=False)
    N: OrientedRectangle = field(repr=False)

    @property
    def k1(self) -> float:
        return self.frame1.k

    @property
    def k2(self) -> float:
        return self.frame2.k

    @property
    def is_degenerate(self) -> bool:
        return self.frame1.is_degenerate

    @property
    def U1(self) -> float:
        return self.frame1.phi_at_xu

    @property
    def H2(self) -> float:
        return self.frame2.phi_at_xu

    @property
    def delta_E(self) -> float:
        return STABLE_MARGIN * (self.B - self.A)

    @property
    def winding_center(self) -> float:
        """Abscissa of the center of rotation for the k2 flow."""
        return self.frame2.x_s if self.is_degenerate else self.b

    @property
    def winding_sector(self) -> float:
        """Angular width, clockwise from the leftward ray, of the sector holding M."""
        return np.pi if self.is_degenerate else 0.5 * np.pi

    @property
    def first_symbols(self) -> int:
        return 1 if self.is_degenerate else 2

    def E1(self, points) -> np.ndarray:
        z = _points(points)
        return self.frame1.energy(z[:, 0], z[:, 1])

    def E2(self, points) -> np.ndarray:
        z = _points(points)
        return self.frame2.energy(z[:, 0], z[:, 1])

    def in_strip(self, points, tol: float = 0.0) -> np.ndarray:
        z = _points(points)
        energy = self.E1(z)
        inside = (energy >= self.A - tol) & (energy <= self.B + tol)
        if not self.is_degenerate:
            inside &= (energy >= self.U1 - tol) | (z[:, 0] <= self.frame1.x_u)
        return inside

    def in_annulus(self, points, tol: float = 0.0) -> np.ndarray:
        z = _points(points)
        energy = self.E2(z)
        return (energy >= self.D - tol) & (energy <= self.H2 + tol) & (z[:, 0] >= self.frame2.x_u)

    def summary(self) -> dict:
        return {
            "nonlinearity": self.f.name,
            "k1": self.k1,
            "k2": self.k2,
            "A": self.A,
            "B": self.B,
            "D": self.D,
            "a": self.a,
            "d": self.d,
            "x_plus_D": self.x_plus_D,
            "b": self.b,
            "U1": self.U1,
            "H2": self.H2,
            "x_u_k1": self.frame1.x_u,
            "x_u_k2": self.frame2.x_u,
            "x_h_k1": self.frame1.x_h,
            "x_h_k2": self.frame2.x_h,
            "winding_center": self.winding_center,
            "M_band": list(self.M.valid_band),
            "N_band": list(self.N.valid_band),
        }


def _require(holds: bool, inequality: str, detail: str) -> None:
    if not holds:
        raise ConstraintViolation(inequality, detail)


def auto_levels(f: Nonlinearity, k1: float, k2: float, levels: Optional[EnergyLevels] = None) -> EnergyLevels:
    """
    Fill missing levels at fixed fractions of their admissible ranges.

    For k1 > 0: A sits a quarter of the way from Phi_k1(x_u(k1)) down to Phi_k1(x_u(k2)); D at the
    middle of the closed-orbit band of k2, pushed toward the saddle level until d < a and
    x_+(D) > x_h(k1); B a quarter of the way from Phi_k1(x_u(k1)) up to Phi_k1(x_+(D)).
    For k1 = 0: A = 0, D as above, B a quarter of the way from F(x_+(D)) to F(x_h(k2)).
    """
    levels = levels or EnergyLevels()
    frame1, frame2 = EnergyFrame.of(f, k1), EnergyFrame.of(f, k2)
    H2 = frame2.phi_at_xu

    if frame1.is_degenerate:
        A = 0.0 if levels.A is None else levels.A
        D = 0.5 * (frame2.phi_at_xs + H2) if levels.D is None else levels.D
        if levels.B is None:
            low = frame1.phi_scalar(classify_level(frame2, D)["x_+"])
            B = low + 0.25 * (frame1.phi_scalar(frame2.x_h) - low)
        else:
            B = levels.B
        return EnergyLevels(A=A, B=B, D=D)

    U1 = frame1.phi_at_xu
    A = U1 - 0.25 * (U1 - frame1.phi_scalar(frame2.x_u)) if levels.A is None else levels.A
    D = levels.D
    if D is None:
        D = 0.5 * (frame2.phi_at_xs + H2)
        a = classify_level(frame1, A)["x_*"] if A < U1 else frame1.x_u
        if D <= frame2.phi_scalar(a):
            D = 0.5 * (frame2.phi_scalar(a) + H2)
        for _ in range(60):
            if classify_level(frame2, D)["x_+"] > frame1.x_h:
                break
            D = 0.5 * (D + H2)
    if levels.B is None:
        x_plus = classify_level(frame2, D)["x_+"] if frame2.phi_at_xs < D < H2 else frame2.x_h
        B = U1 + 0.25 * (frame1.phi_scalar(x_plus) - U1)
    else:
        B = levels.B
    return EnergyLevels(A=A, B=B, D=D)


def _valid_range(rect: OrientedRectangle) -> tuple[float, float]:
    grid = np.linspace(rect.band_lo, rect.band_hi, BAND_SCAN)
    valid = np.array([rect.arc_valid(e) for e in grid])
    if not valid.any():
        raise ConstraintViolation(f"{rect.name} admits a transversal arc",
                                  f"no band level in [{rect.band_lo:.6g}, {rect.band_hi:.6g}] joins its [-]-sides")
    # longest run of valid levels
    best, start = (0, 0), None
    for i, ok in enumerate([*valid, False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    first, last = best[0], best[1] - 1

    def refine(good: float, bad: float) -> float:
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (good + bad)
            if rect.arc_valid(mid):
                good = mid
            else:
                bad = mid
        return good

    lo = grid[first] if first == 0 else refine(grid[first], grid[first - 1])
    hi = grid[last] if last == len(grid) - 1 else refine(grid[last], grid[last + 1])
    shrink = 1e-9 * (rect.band_hi - rect.band_lo)
    lo, hi = lo + shrink, hi - shrink
    if not rect.arc_valid(lo):
        lo = grid[first]
    if not rect.arc_valid(hi):
        hi = grid[last]
    return float(lo), float(hi)


def _bbox(rect: OrientedRectangle, band: tuple[float, float]) -> tuple[float, float, float, float]:
    s = np.linspace(0.0, 1.0, ARC_SAMPLES)
    points = np.concatenate([rect.arc(e, s) for e in np.linspace(band[0], band[1], 33)])
    x0, x1 = float(points[:, 0].min()), float(points[:, 0].max())
    y0, y1 = float(points[:, 1].min()), float(points[:, 1].max())
    pad_x, pad_y = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    return x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y


def _finish(rect: OrientedRectangle) -> OrientedRectangle:
    band = _valid_range(rect)
    return replace(rect, valid_band=band, bbox=_bbox(rect, band))


def build_regions(f: Nonlinearity, k1: float, k2: float, levels: Optional[EnergyLevels] = None) -> RegionGeometry:
    """
    Build and check the strip, the annulus and the rectangles M and N.

    Raises:
        ConstraintViolation: Naming the first inequality of the construction that fails.
    """
    _require(k1 >= 0, "k1 >= 0", f"k1={k1}")
    _require(k1 < k2, "k1 < k2", f"k1={k1}, k2={k2}")
    lv = auto_levels(f, k1, k2, levels)
    A, B, D = lv.A, lv.B, lv.D
    frame1, frame2 = EnergyFrame.of(f, k1), EnergyFrame.of(f, k2)
    H2, U1 = frame2.phi_at_xu, frame1.phi_at_xu

    _require(frame2.phi_at_xs < D < H2, "Phi_k2(x_s(k2)) < D < Phi_k2(x_u(k2))",
             f"D={D:.6g} outside ({frame2.phi_at_xs:.6g}, {H2:.6g})")
    band = classify_level(frame2, D)
    d, x_plus = band["x_-"], band["x_+"]
    _require(frame2.x_s < x_plus < frame2.x_h, "x_s(k2) < x_+(D) < x_h(k2)",
             f"x_+(D)={x_plus:.6g}, x_s={frame2.x_s:.6g}, x_h={frame2.x_h:.6g}")

    if frame1.is_degenerate:
        _require(A == 0, "A = 0 when k1 = 0", f"A={A}")
        _require(B > 0, "B > 0", f"B={B}")
        b = classify_level(frame1, B)["x^*"]
        _require(b < frame2.x_h, "b < x_h(k2)", f"b={b:.6g}, x_h(k2)={frame2.x_h:.6g}")
        a, hole = None, None
    else:
        _require(A < U1, "A < Phi_k1(x_u(k1))", f"A={A:.6g}, Phi_k1(x_u)={U1:.6g}")
        a = classify_level(frame1, A)["x_*"]
        _require(frame2.x_u < a < frame1.x_u, "x_u(k2) < a < x_u(k1)",
                 f"a={a:.6g}, x_u(k2)={frame2.x_u:.6g}, x_u(k1)={frame1.x_u:.6g}")
        _require(frame2.x_u < d < a, "x_u(k2) < d < a", f"d={d:.6g}, a={a:.6g}")
        _require(B > U1, "B > Phi_k1(x_u(k1))", f"B={B:.6g}, Phi_k1(x_u)={U1:.6g}")
        b = classify_level(frame1, B)["x^*"]
        _require(frame1.x_h < b < x_plus, "x_h(k1) < b < x_+(D)",
                 f"b={b:.6g}, x_h(k1)={frame1.x_h:.6g}, x_+(D)={x_plus:.6g}")
        hole = Hole(frame1, frame1.x_u, U1, B - A)

    M = _finish(OrientedRectangle(
        name="M", side_frame=frame1, side_from=A, side_to=B, band_frame=frame2, band_lo=D, band_hi=H2,
        sign=1.0, x_floor=frame2.x_u, hole=hole,
    ))
    N = _finish(OrientedRectangle(
        name="N", side_frame=frame2, side_from=H2, side_to=D, band_frame=frame1, band_lo=A, band_hi=B,
        sign=-1.0, x_floor=frame2.x_u, hole=hole,
    ))
    return RegionGeometry(f=f, frame1=frame1, frame2=frame2, A=A, B=B, D=D, a=a, d=d, x_plus_D=x_plus, b=b, M=M, N=N)
