from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Literal, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ap_dynamics.exception.errors import DomainError, NumericalError

Smoothness = Literal["C0-Lipschitz", "C2+"]

_CHECK_GRID = np.linspace(-10.0, 10.0, 401)
_GROWTH_PROBE = 1.0e6
_FD_STEP = 1.0e-6


@dataclass(frozen=True)
class Nonlinearity:
    """
    A nonlinearity f of Ambrosetti-Prodi type: f(0) = 0, strictly decreasing on the
    negative half-line, strictly increasing on the positive one, f(s) -> +inf as |s| -> inf.

    `value`, `potential` and `derivative` accept floats and numpy arrays.
    `left_inverse(k)` and `right_inverse(k)` return the two solutions of f(s) = k for k >= 0,
    the first non-positive and the second non-negative. When omitted they are found by
    bracketed root finding.

    Attributes:
        name (str): Catalog identifier.
        value (Callable): s -> f(s).
        potential (Callable): s -> F(s), the primitive with F(0) = 0.
        derivative (Callable): s -> f'(s), meaningful away from `breakpoints`.
        breakpoints (tuple[float, ...]): Abscissas where f is not differentiable.
        smoothness (str): "C0-Lipschitz" or "C2+".
    """

    name: str
    value: Callable
    potential: Callable
    derivative: Callable
    breakpoints: tuple[float, ...] = ()
    smoothness: Smoothness = "C2+"
    left_inverse_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)
    right_inverse_fn: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __call__(self, s):
        return self.value(s)

    def left_inverse(self, k: float) -> float:
        if k < 0:
            raise DomainError(f"f_l^-1 is defined for k >= 0, got k={k}")
        if self.left_inverse_fn is not None:
            return float(self.left_inverse_fn(k))
        return self._invert(k, direction=-1.0)

    def right_inverse(self, k: float) -> float:
        if k < 0:
            raise DomainError(f"f_r^-1 is defined for k >= 0, got k={k}")
        if self.right_inverse_fn is not None:
            return float(self.right_inverse_fn(k))
        return self._invert(k, direction=1.0)

    def _invert(self, k: float, direction: float) -> float:
        if k == 0:
            return 0.0
        step = 1.0
        outer = direction * step
        while self.value(outer) < k:
            step *= 2.0
            if step > 1.0e12:
                raise NumericalError(f"{self.name}: no preimage of {k} found on the {direction:+.0f} branch")
            outer = direction * step
        lo, hi = sorted((0.0, outer))
        return float(brentq(lambda s: self.value(s) - k, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps))

    @property
    def is_smooth(self) -> bool:
        return self.smoothness == "C2+"

    def validate(self) -> None:
        """
        Finite sample check of the sign and growth conditions and of F' = f.

        The check is not exhaustive: it inspects a grid on [-10, 10] and probes growth at +-1e6.

        Raises:
            DomainError: Naming the first condition found violated.
        """
        if abs(float(self.value(0.0))) > 1e-12:
            raise DomainError(f"{self.name}: f(0) = {float(self.value(0.0))} is not 0")
        if abs(float(self.potential(0.0))) > 1e-12:
            raise DomainError(f"{self.name}: F(0) = {float(self.potential(0.0))} is not 0")

        values = np.asarray(self.value(_CHECK_GRID), dtype=float)
        left = values[_CHECK_GRID <= 0]
        right = values[_CHECK_GRID >= 0]
        if not np.all(np.diff(left) < 0):
            raise DomainError(f"{self.name}: f is not strictly decreasing on [-10, 0]")
        if not np.all(np.diff(right) > 0):
            raise DomainError(f"{self.name}: f is not strictly increasing on [0, 10]")
        edge = max(values[0], values[-1])
        for probe in (-_GROWTH_PROBE, _GROWTH_PROBE):
            if not float(self.value(probe)) > edge:
                raise DomainError(f"{self.name}: f does not grow at s={probe:g}")

        smooth = np.array([all(abs(s - b) > 10 * _FD_STEP for b in self.breakpoints) for s in _CHECK_GRID])
        s = _CHECK_GRID[smooth]
        fd = (np.asarray(self.potential(s + _FD_STEP)) - np.asarray(self.potential(s - _FD_STEP))) / (2 * _FD_STEP)
        mismatch = np.abs(fd - values[smooth])
        if np.any(mismatch > 1e-5 * (1.0 + np.abs(values[smooth]))):
            worst = s[int(np.argmax(mismatch))]
            raise DomainError(f"{self.name}: F' differs from f near s={worst:.6g}")

    def check_convexity(self) -> bool:
        """Sample check that f' is strictly increasing away from breakpoints (strict convexity)."""
        if not self.is_smooth:
            return False
        slopes = np.asarray(self.derivative(_CHECK_GRID), dtype=float)
        return bool(np.all(np.diff(slopes) > 0))


def _abs_nonlinearity() -> Nonlinearity:
    return Nonlinearity(
        name="abs",
        value=np.abs,
        potential=lambda s: 0.5 * s * np.abs(s),
        derivative=np.sign,
        breakpoints=(0.0,),
        smoothness="C0-Lipschitz",
        left_inverse_fn=lambda k: -k,
        right_inverse_fn=lambda k: k,
    )


def _sqrt1p_value(s):
    # sqrt(1+s^2) - 1 without cancellation near 0
    s2 = np.square(s)
    return s2 / (np.sqrt(1.0 + s2) + 1.0)


def _sqrt1p_potential(s):
    root = np.sqrt(1.0 + np.square(s))
    return 0.5 * (s * root + np.arcsinh(s)) - s


def _sqrt1p_nonlinearity() -> Nonlinearity:
    return Nonlinearity(
        name="sqrt1p",
        value=_sqrt1p_value,
        potential=_sqrt1p_potential,
        derivative=lambda s: s / np.sqrt(1.0 + np.square(s)),
        breakpoints=(),
        smoothness="C2+",
        left_inverse_fn=lambda k: -np.sqrt(k * (k + 2.0)),
        right_inverse_fn=lambda k: np.sqrt(k * (k + 2.0)),
    )


def from_callable(
        name: str,
        value: Callable[[float], float],
        derivative: Optional[Callable[[float], float]] = None,
        breakpoints: tuple[float, ...] = (),
        smoothness: Smoothness = "C2+",
) -> Nonlinearity:
    """
    Wrap a user supplied scalar f. F is computed by cached adaptive quadrature and f' by
    central differences unless given.

    Args:
        name (str): Identifier used by the catalog.
        value (Callable): Scalar f.
        derivative (Callable, optional): Scalar f'.
        breakpoints (tuple[float, ...]): Non-smooth abscissas, passed to quadrature.
        smoothness (str): Smoothness tag.

    Returns:
        Nonlinearity: The wrapped function, not yet validated.
    """
    scalar_value = np.vectorize(value, otypes=[float])

    @lru_cache(maxsize=65536)
    def _potential_scalar(s: float) -> float:
        if s == 0:
            return 0.0
        points = [b for b in breakpoints if min(0.0, s) < b < max(0.0, s)] or None
        result, _ = quad(value, 0.0, s, points=points, epsabs=1e-13, epsrel=1e-12, limit=200)
        return result

    potential = np.vectorize(lambda s: _potential_scalar(float(s)), otypes=[float])

    if derivative is None:
        def _derivative(s, h=1e-6):
            return (scalar_value(np.asarray(s) + h) - scalar_value(np.asarray(s) - h)) / (2 * h)
    else:
        _derivative = np.vectorize(derivative, otypes=[float])

    return Nonlinearity(
        name=name,
        value=scalar_value,
        potential=potential,
        derivative=_derivative,
        breakpoints=tuple(breakpoints),
        smoothness=smoothness,
    )
