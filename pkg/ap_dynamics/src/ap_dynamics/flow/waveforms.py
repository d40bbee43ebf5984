import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

_SUP_SAMPLES = 4097


@dataclass(frozen=True)
class Waveform:
    """A periodic forcing shape p0 with its first two derivatives."""

    name: str
    value: Callable
    derivative: Callable
    second_derivative: Callable
    period: float = 2.0 * math.pi

    def __call__(self, t):
        return self.value(t)

    def scaled(self, omega: float = 1.0, amplitude: float = 1.0) -> "Waveform":
        """t -> amplitude * p0(omega * t), with period divided by omega."""
        if omega <= 0:
            raise ValueError(f"omega must be positive, got {omega}")
        value, d1, d2 = self.value, self.derivative, self.second_derivative
        return Waveform(
            name=f"{amplitude:g}*{self.name}({omega:g}t)",
            value=lambda t: amplitude * value(omega * t),
            derivative=lambda t: amplitude * omega * d1(omega * t),
            second_derivative=lambda t: amplitude * omega * omega * d2(omega * t),
            period=self.period / omega,
        )

    def mean(self) -> float:
        integral, _ = quad(self.value, 0.0, self.period, epsabs=1e-13, epsrel=1e-12, limit=200)
        return integral / self.period

    def _grid(self) -> np.ndarray:
        return np.linspace(0.0, self.period, _SUP_SAMPLES)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.value(self._grid()))))

    def derivative_sup_norm(self) -> float:
        return float(np.max(np.abs(self.derivative(self._grid()))))

    def is_constant(self, tol: float = 1e-12) -> bool:
        return self.derivative_sup_norm() <= tol


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


_WAVEFORMS = {
    "sin": Waveform("sin", np.sin, np.cos, lambda t: -np.sin(t)),
    "cos": Waveform("cos", np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t)),
    "zero": Waveform("zero", _zero, _zero, _zero),
    "sin_sin2": Waveform(
        "sin_sin2",
        lambda t: np.sin(t) + 0.5 * np.sin(2.0 * t),
        lambda t: np.cos(t) + np.cos(2.0 * t),
        lambda t: -np.sin(t) - 2.0 * np.sin(2.0 * t),
    ),
}


def get_waveform(name: str) -> Waveform:
    waveform = _WAVEFORMS.get(name)
    if waveform is None:
        raise ValueError(f"Unsupported waveform: {name}")
    return waveform


def waveform_names() -> list[str]:
    return sorted(_WAVEFORMS)
