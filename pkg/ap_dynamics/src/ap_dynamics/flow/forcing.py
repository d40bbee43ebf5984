import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.flow.waveforms import Waveform, get_waveform

_ZERO_MEAN_TOL = 1e-10


@dataclass(frozen=True, kw_only=True)
class ForcingSpec:
    """
    Right-hand side p(t) of u'' + c u' + f(u) = p(t), with damping c >= 0.
    """

    c: float = 0.0

    def __post_init__(self):
        if self.c < 0:
            raise DomainError(f"damping c must be >= 0, got {self.c}")

    def p(self, t):
        raise NotImplementedError

    @property
    def period(self) -> Optional[float]:
        return None

    def switch_times(self, t0: float, t1: float) -> list[float]:
        """Instants in the open interval (t0, t1) where p jumps."""
        return []

    def rhs(self, f):
        """Vector field (t, z) -> z' for z of shape (2,) or (2, n)."""
        c = self.c
        value = f.value
        p = self.p

        def field(t, z):
            x, y = z[0], z[1]
            return np.array([y, -c * y - value(x) + p(t)])

        return field


@dataclass(frozen=True, kw_only=True)
class Constant(ForcingSpec):
    k: float

    def p(self, t):
        return self.k


@dataclass(frozen=True, kw_only=True)
class Step(ForcingSpec):
    """p = k1 on [nT, nT + t1) and k2 on [nT + t1, (n+1)T), with T = t1 + t2."""

    k1: float
    k2: float
    t1: float
    t2: float

    def __post_init__(self):
        super().__post_init__()
        if self.k1 == self.k2:
            raise DomainError(f"stepwise forcing needs k1 != k2, got {self.k1}")
        if self.t1 <= 0 or self.t2 <= 0:
            raise DomainError(f"stepwise forcing needs t1 > 0 and t2 > 0, got t1={self.t1}, t2={self.t2}")

    @property
    def period(self) -> float:
        return self.t1 + self.t2

    def p(self, t):
        phase = math.fmod(t, self.period)
        if phase < 0:
            phase += self.period
        return self.k1 if phase < self.t1 else self.k2

    def switch_times(self, t0: float, t1: float) -> list[float]:
        period = self.period
        times = []
        n = math.floor(t0 / period)
        while n * period < t1:
            for s in (n * period, n * period + self.t1):
                if t0 < s < t1:
                    times.append(s)
            n += 1
        return times


@dataclass(frozen=True, kw_only=True)
class Periodic(ForcingSpec):
    """p(t) = k + eps * p0(omega * t + phase), p0 a zero-mean waveform from the catalog."""

    k: float
    eps: float
    omega: float
    p0: str = "sin"
    phase: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        if self.omega <= 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        waveform = get_waveform(self.p0)
        mean = waveform.mean()
        if abs(mean) > _ZERO_MEAN_TOL * (1.0 + waveform.sup_norm()):
            raise DomainError(f"waveform {self.p0} has mean {mean:.3e} over its period, expected 0")

    @property
    def waveform(self) -> Waveform:
        return get_waveform(self.p0)

    @property
    def period(self) -> float:
        return self.waveform.period / self.omega

    def p(self, t):
        return self.k + self.eps * self.waveform.value(self.omega * t + self.phase)
