import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ap_dynamics.exception.errors import DomainError, NumericalError
from ap_dynamics.flow.waveforms import Waveform
from ap_dynamics.melnikov.homoclinic import HomoclinicOrbit

TAIL_TOL = 1e-14


@dataclass(frozen=True)
class MelnikovValue:
    """Delta(alpha) with a bound on the neglected part of the integral beyond `t_cut`."""

    value: float
    tail_bound: float
    t_cut: float

    def __float__(self) -> float:
        return self.value


def _panel_width(period: float) -> float:
    return min(0.5, period / 8.0)


def cut_time(q: HomoclinicOrbit, p0: Waveform, tol: float = TAIL_TOL) -> float:
    """Time beyond which 2 ||p0|| q~(t) drops below tol (at least the end of the integrated branch)."""
    sup = p0.sup_norm()
    if sup == 0:
        return q.t_tail
    target = tol / (2.0 * sup)
    c = q.tail_constant
    if c <= target:
        return q.t_tail
    return max(q.t_tail, math.log(c / target) / q.lam)


def delta(q: HomoclinicOrbit, p0: Waveform, alpha: float, c0: float = 0.0) -> MelnikovValue:
    """
    Melnikov function Delta(alpha) = integral over R of q'(t) p0(t + alpha) dt, minus
    c0 * integral of q'^2 in the damped case.

    q' is odd, so the integral is folded onto [0, inf) as q'(t) (p0(alpha + t) - p0(alpha - t)),
    integrated by Gauss-Legendre panels up to `t_cut`. The neglected rest is bounded by
    2 ||p0|| q~(t_cut).

    Raises:
        NumericalError: If the saddle eigenvalue is not positive (tail cannot be bounded).
    """
    if not q.lam > 0:
        raise NumericalError(f"decay rate lambda={q.lam} does not bound the tail")
    t_cut = cut_time(q, p0)

    def folded(t):
        return q.velocity(t) * (p0.value(alpha + t) - p0.value(alpha - t))

    value = q.integrate(folded, 0.0, t_cut, _panel_width(p0.period))
    bound = 2.0 * p0.sup_norm() * float(q.qtilde(t_cut))
    if c0:
        value -= c0 * velocity_energy(q)
    return MelnikovValue(value, bound, t_cut)


def delta_damped(q: HomoclinicOrbit, p0: Waveform, alpha: float, c0: float) -> MelnikovValue:
    return delta(q, p0, alpha, c0)


def velocity_energy(q: HomoclinicOrbit) -> float:
    """Integral over R of q'(t)^2, the tail integrated in closed form."""
    core = q.integrate(lambda t: q.velocity(t) ** 2, 0.0, q.t_tail)
    c, lam = q.tail_constant, q.lam
    tail = lam * c * c * math.exp(-2.0 * lam * q.t_tail) / 2.0
    return 2.0 * (core + tail)


def sample_delta(q: HomoclinicOrbit, p0: Waveform, n: int = 64, c0: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Delta on the grid alpha_i = i T / n, i < n, over one period T of p0."""
    alphas = np.arange(n) * (p0.period / n)
    values = np.array([delta(q, p0, float(a), c0).value for a in alphas])
    return alphas, values


def eta(q: HomoclinicOrbit, omega: float) -> float:
    """eta(omega) = integral over [0, inf) of q~(t) cos(omega t) dt."""
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega}")
    width = min(0.5, math.pi / (2.0 * omega))
    core = q.integrate(lambda t: q.qtilde(t) * np.cos(omega * t), 0.0, q.t_tail, width)
    lam, t = q.lam, q.t_tail
    tail = q.tail_constant * math.exp(-lam * t) * (lam * math.cos(omega * t) - omega * math.sin(omega * t))
    return core + tail / (lam * lam + omega * omega)


def xi_partial_sums(q: HomoclinicOrbit, omega: float, count: int) -> np.ndarray:
    """
    Xi_j = integral over [0, pi] of q~((t + j pi) / omega) sin(t) dt for j = 0..count.

    Raises:
        NumericalError: If the sequence is not positive and decreasing.
    """
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega}")
    values = []
    for j in range(count + 1):
        a, b = j * math.pi / omega, (j + 1) * math.pi / omega
        width = min(0.5, math.pi / (4.0 * omega))
        integral = q.integrate(lambda s: q.qtilde(s) * np.abs(np.sin(omega * s)), a, b, width)
        values.append(omega * integral)
    values = np.array(values)
    if not (np.all(values > 0) and np.all(np.diff(values) < 0)):
        raise NumericalError(f"Xi sequence is not positive and decreasing: {values}")
    return values


@dataclass(frozen=True)
class SimpleZero:
    alpha: float
    slope_sign: int
    slope: float


@dataclass(frozen=True)
class ZeroReport:
    """
    Zeros of a sampled Melnikov function over one period, and the hypotheses for which they
    give numerical evidence. The evidence is floating point, not a proof.
    """

    simple_zeros: list[SimpleZero]
    sign_change: bool
    identically_zero: bool
    critical_points: list[float]
    evidence: list[str]
    max_abs: float

    def as_dict(self) -> dict:
        return {
            "simple_zeros": [{"alpha": z.alpha, "slope_sign": z.slope_sign, "slope": z.slope}
                             for z in self.simple_zeros],
            "sign_change": self.sign_change,
            "identically_zero": self.identically_zero,
            "critical_points": self.critical_points,
            "evidence": self.evidence,
            "max_abs": self.max_abs,
            "disclaimer": "numerical evidence from floating point sampling, not a proof",
        }


def critical_points(p0: Waveform, samples: int = 4096, tol: float = 1e-8) -> list[float]:
    """Points alpha in [0, T) with p0'(alpha) = 0 != p0''(alpha)."""
    grid = np.linspace(0.0, p0.period, samples + 1)
    slope = np.asarray(p0.derivative(grid), dtype=float)
    scale = max(p0.derivative_sup_norm(), 1e-300)
    found = []
    for i in range(samples):
        a, b = grid[i], grid[i + 1]
        sa, sb = slope[i], slope[i + 1]
        if abs(sa) <= 1e-14 * scale:
            root = a
        elif sa * sb < 0:
            root = brentq(lambda s: float(p0.derivative(s)), a, b, xtol=1e-14)
        else:
            continue
        if abs(float(p0.second_derivative(root))) > tol * scale and root < p0.period:
            if not found or abs(root - found[-1]) > 1e-9:
                found.append(float(root))
    return found


def detect_zeros(
        alphas: np.ndarray,
        values: np.ndarray,
        period: float,
        q: HomoclinicOrbit | None = None,
        p0: Waveform | None = None,
        c0: float = 0.0,
        tol: float = 1e-9,
) -> ZeroReport:
    """
    Locate zeros of Delta sampled on a uniform grid over one period.

    Sign changes between neighbours (cyclically) bracket zeros. When `q` and `p0` are given,
    brackets are refined by bisection on Delta itself and Delta' is taken by central differences;
    otherwise linear interpolation and grid differences are used. Delta counts as identically
    zero when max |Delta| < tol * 2 ||p0|| q~(0), an upper bound of |Delta|.

    Raises:
        DomainError: If fewer than 64 samples per period are given.
    """
    alphas = np.asarray(alphas, dtype=float)
    values = np.asarray(values, dtype=float)
    if alphas.size < 64:
        raise DomainError(f"zero detection needs >= 64 samples per period, got {alphas.size}")
    refine = q is not None and p0 is not None
    reference = 2.0 * p0.sup_norm() * float(q.qtilde(0.0)) if refine else max(float(np.max(np.abs(values))), 1.0)
    max_abs = float(np.max(np.abs(values)))
    crit = critical_points(p0) if p0 is not None else []
    if max_abs <= tol * reference:
        evidence = ["Delta vanishes identically: no horseshoe can be inferred from the Melnikov function"]
        return ZeroReport([], False, True, crit, evidence, max_abs)

    def evaluate(a: float) -> float:
        if refine:
            return delta(q, p0, a, c0).value
        return float(np.interp(a, np.append(alphas, alphas[0] + period), np.append(values, values[0])))

    zeros: list[SimpleZero] = []
    n = alphas.size
    spacing = period / n
    for i in range(n):
        a, b = alphas[i], alphas[i] + spacing
        va, vb = values[i], values[(i + 1) % n]
        if va == 0.0:
            lo = hi = a
        elif va * vb < 0:
            lo, hi, f_lo = a, b, va
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                f_mid = evaluate(mid)
                if f_mid == 0.0:
                    lo = hi = mid
                    break
                if f_mid * f_lo < 0:
                    hi = mid
                else:
                    lo, f_lo = mid, f_mid
                if hi - lo < 1e-12 * period:
                    break
        else:
            continue
        root = 0.5 * (lo + hi)
        h = 1e-5 * period
        slope = (evaluate(root + h) - evaluate(root - h)) / (2.0 * h)
        if abs(slope) > tol * reference / period:
            zeros.append(SimpleZero(float(math.fmod(root, period)), int(np.sign(slope)), float(slope)))

    sign_change = bool(np.any(values > 0) and np.any(values < 0))
    evidence = []
    if zeros:
        evidence.append("simple zero of Delta: numerical evidence for a Smale horseshoe of an iterate "
                        "of the Poincare map for small eps")
    if sign_change:
        evidence.append("Delta changes sign: numerical evidence for a topological horseshoe of an iterate "
                        "of the Poincare map for small eps")
    if crit:
        evidence.append("p0 has a nondegenerate critical point: numerical evidence for a Smale horseshoe "
                        "under slow forcing eps^2 p0(eps t) for small eps")
    return ZeroReport(zeros, sign_change, False, crit, evidence, max_abs)


@dataclass(frozen=True)
class ThresholdWitness:
    """Where p0' stays beyond +-delta_w on [s - r, s + r], and the omega it allows."""

    s: float
    delta_w: float
    r: float
    omega: float


@dataclass(frozen=True)
class OmegaThreshold:
    omega0: float
    upper: ThresholdWitness
    lower: ThresholdWitness

    def as_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "rising": vars(self.upper),
            "falling": vars(self.lower),
            "disclaimer": "numerical evidence from floating point quadrature, not a proof",
        }


def _half_width(p0: Waveform, s: float, level: float, sign: float) -> float:

    def excess(x):
        return sign * float(p0.derivative(x)) - level

    widths = []
    for direction in (-1.0, 1.0):
        step = p0.period / 512
        r = step
        while r < p0.period and excess(s + direction * r) > 0:
            r += step
        widths.append(brentq(lambda w: excess(s + direction * w), r - step, r, xtol=1e-13))
    return min(widths)


def threshold_margin(q: HomoclinicOrbit, p0: Waveform, witness: ThresholdWitness, omega: float) -> tuple[float, float]:
    """(left, right) sides of the slow-forcing inequality at omega."""
    u = witness.r / omega
    left = q.qtilde_integral(0.0, u)
    right = p0.derivative_sup_norm() / witness.delta_w * q.qtilde_integral(u, math.inf)
    return left, right


def omega_threshold(q: HomoclinicOrbit, p0: Waveform, fraction: float = 0.5) -> OmegaThreshold:
    """
    Largest Omega for which the slow-forcing argument shows Delta changes sign, for
    p(t) = k + eps p0(Omega t).

    For the rising branch, s* maximises p0', delta* = fraction * p0'(s*), and r* is the half
    width of the interval around s* where p0' >= delta*. Then Omega_1 solves
    int_0^{r*/Omega} q~ = (||p0'|| / delta*) int_{r*/Omega}^inf q~. The falling branch does
    the same with -p0'. Omega_0 = min(Omega_1, Omega_2).

    Raises:
        DomainError: If p0 is constant.
    """

    if p0.is_constant():
        raise DomainError(f"{p0.name} is constant: no slow-forcing threshold exists")
    grid = np.linspace(0.0, p0.period, 4097)[:-1]
    slope = np.asarray(p0.derivative(grid), dtype=float)
    total = q.qtilde_integral()
    sup = p0.derivative_sup_norm()

    witnesses = []
    for sign in (1.0, -1.0):
        s = float(grid[int(np.argmax(sign * slope))])
        peak = sign * float(p0.derivative(s))
        level = fraction * peak
        r = _half_width(p0, s, level, sign)
        kappa = sup / level
        target = kappa / (1.0 + kappa) * total
        hi = q.t_tail
        while q.qtilde_integral(0.0, hi) < target:
            hi *= 2.0
        u_star = brentq(lambda u: q.qtilde_integral(0.0, u) - target, 1e-12, hi, xtol=1e-13)
        witnesses.append(ThresholdWitness(s=s, delta_w=level, r=r, omega=r / u_star))

    upper, lower = witnesses
    return OmegaThreshold(omega0=min(upper.omega, lower.omega), upper=upper, lower=lower)
