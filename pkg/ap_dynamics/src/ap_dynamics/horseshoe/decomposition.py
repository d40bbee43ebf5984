import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ap_dynamics.horseshoe.regions import RegionGeometry


@dataclass(frozen=True)
class EnergySplit:
    """
    Compact sets of the k1 leg, split by the stable manifold of the k1 saddle:
    K_1,0 = {E_k1 <= Phi_k1(x_u) - delta_E}, K_1,1 = {E_k1 >= Phi_k1(x_u) + delta_E}.
    With k1 = 0 there is a single set {E_0 >= delta_E}.
    """

    geometry: RegionGeometry

    @property
    def center(self) -> Optional[float]:
        return None

    @property
    def names(self) -> list[str]:
        if self.geometry.is_degenerate:
            return ["K_1"]
        return ["K_1,0", "K_1,1"]

    @property
    def required(self) -> int:
        return len(self.names)

    def labels(self, sources: np.ndarray, angles: Optional[np.ndarray] = None) -> np.ndarray:
        geom = self.geometry
        energy = geom.E1(sources)
        delta = geom.delta_E
        if geom.is_degenerate:
            return np.where(energy >= delta, 0, -1)
        return np.where(energy <= geom.U1 - delta, 0, np.where(energy >= geom.U1 + delta, 1, -1))

    def label_name(self, label: int) -> str:
        return self.names[label]


@dataclass(frozen=True)
class WindingSectors:
    """
    Compact sets of the k2 leg, K_2,j: points whose clockwise angle around the winding
    center ends in [2 j pi, 2 j pi + sector] after the flow.
    """

    geometry: RegionGeometry
    m: int

    @property
    def center(self) -> float:
        return self.geometry.winding_center

    @property
    def names(self) -> list[str]:
        return [f"K_2,{j}" for j in range(self.m)]

    @property
    def required(self) -> int:
        return self.m

    def labels(self, sources: np.ndarray, angles: Optional[np.ndarray] = None) -> np.ndarray:
        turns = np.floor(angles / (2.0 * math.pi))
        remainder = angles - 2.0 * math.pi * turns
        inside = (turns >= 0) & (remainder <= self.geometry.winding_sector)
        return np.where(inside, turns, -1).astype(int)

    def label_name(self, label: int) -> str:
        return f"K_2,{label}"
