from dataclasses import dataclass

import numpy as np

from ap_dynamics.exception.errors import DomainError
from ap_dynamics.horseshoe.regions import OrientedRectangle

DEFAULT_PATHS = 16


@dataclass(frozen=True)
class SamplePath:
    """A band level arc of a rectangle, joining its [-]-sides as s runs over [0, 1]."""

    index: int
    level: float
    rectangle: OrientedRectangle

    def points(self, s) -> np.ndarray:
        return self.rectangle.arc(self.level, s)


def transversal_paths(rect: OrientedRectangle, count: int = DEFAULT_PATHS) -> list[SamplePath]:
    """
    The two extreme valid band level arcs plus `count - 2` evenly spaced ones between them.

    Raises:
        DomainError: If count < 2.
    """
    if count < 2:
        raise DomainError(f"at least 2 paths are needed, got {count}")
    lo, hi = rect.valid_band
    return [SamplePath(i, float(level), rect) for i, level in enumerate(np.linspace(lo, hi, count))]
