import json
import os
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ap_dynamics.config.partial import make_partial_model, merge_overrides
from ap_dynamics.exception.errors import ConfigError
from ap_dynamics.flow.fixed_points import Window
from ap_dynamics.flow.forcing import Constant, ForcingSpec, Periodic, Step
from ap_dynamics.flow.poincare import IcLine
from ap_dynamics.horseshoe.regions import EnergyLevels
from ap_dynamics.timemap.integrals import TimeMapKind

PRESET_DIR = Path(__file__).parent / "presets"

_REQUIRED = {
    "constant": ("k",),
    "step": ("k1", "k2", "t1", "t2"),
    "periodic": ("k", "eps", "omega"),
}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ToleranceConfig(_Strict):
    rtol: float = Field(default=1e-10, gt=0)
    atol: float = Field(default=1e-12, gt=0)


class ForcingConfig(_Strict):
    """One of the three forcing variants; only the fields of the chosen variant are read."""

    variant: Literal["constant", "step", "periodic"]
    k: Optional[float] = None
    k1: Optional[float] = None
    k2: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    eps: Optional[float] = None
    omega: Optional[float] = None
    p0: str = "sin"
    phase: float = 0.0

    def build(self, c: float = 0.0) -> ForcingSpec:
        """
        Raises:
            ConfigError: If a field of the variant is missing.
            DomainError: If the forcing rejects the values.
        """
        for name in _REQUIRED[self.variant]:
            if getattr(self, name) is None:
                raise ConfigError(f"forcing.{name}", f"required for the {self.variant} variant")
        if self.variant == "constant":
            return Constant(k=self.k, c=c)
        if self.variant == "step":
            return Step(k1=self.k1, k2=self.k2, t1=self.t1, t2=self.t2, c=c)
        return Periodic(k=self.k, eps=self.eps, omega=self.omega, p0=self.p0, phase=self.phase, c=c)


class IcLineConfig(_Strict):
    u0_min: float
    u0_max: float
    count: int = Field(ge=1)
    y0: float = 0.0

    def build(self) -> IcLine:
        return IcLine(self.u0_min, self.u0_max, self.count, self.y0)


class WindowConfig(_Strict):
    x_min: float = -6.0
    x_max: float = 6.0
    y_min: float = -4.0
    y_max: float = 4.0

    def build(self) -> Window:
        return Window(self.x_min, self.x_max, self.y_min, self.y_max)


class LevelsConfig(_Strict):
    A: Optional[float] = None
    B: Optional[float] = None
    D: Optional[float] = None

    def build(self) -> EnergyLevels:
        return EnergyLevels(A=self.A, B=self.B, D=self.D)


class AnalyzeConfig(_Strict):
    f: str = "sqrt1p"
    k: list[float] = Field(min_length=1)
    rho: list[float] = Field(default_factory=list)


class TimemapConfig(_Strict):
    """For kind Generic, `x1` and `x2` are the limits; otherwise `r` is the abscissa."""

    f: str = "sqrt1p"
    k: float
    rho: list[float] = Field(min_length=1)
    kind: TimeMapKind = TimeMapKind.O
    r: Optional[float] = None
    x1: Optional[float] = None
    x2: Optional[float] = None
    rtol: float = Field(default=1e-10, gt=0)


class MelnikovConfig(_Strict):
    f: str = "sqrt1p"
    k: float = 2.0
    p0: str = "sin"
    omega: float = Field(default=1.0, gt=0)
    c0: float = Field(default=0.0, ge=0)
    samples: int = Field(default=64, ge=64)
    eta_omegas: list[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
    threshold: bool = False


class ScatterConfig(ToleranceConfig):
    f: str = "sqrt1p"
    forcing: ForcingConfig
    c: float = Field(default=0.0, ge=0)
    blowup_bound: float = Field(default=1.0e6, gt=0)
    n_iter: int = Field(default=300, ge=0)
    ic: IcLineConfig


class HorseshoeConfig(_Strict):
    """
    Stepwise certification. Missing t1 or t2 default to `t_factor` times the matching
    threshold; missing levels are chosen automatically.
    """

    f: str = "abs"
    k1: float
    k2: float
    t1: Optional[float] = None
    t2: Optional[float] = None
    t_factor: Optional[float] = Field(default=None, gt=1)
    m: int = Field(default=2, ge=1)
    levels: LevelsConfig = Field(default_factory=LevelsConfig)
    paths: int = Field(default=16, ge=2)
    nodes: int = Field(default=257, ge=2)
    image_tol: float = Field(default=1e-3, gt=0)
    max_nodes: int = Field(default=20000, ge=2)
    rtol: float = Field(default=1e-9, gt=0)
    atol: float = Field(default=1e-11, gt=0)
    itineraries: list[list[int]] = Field(default_factory=lambda: [[0], [0, 1]])
    grid: tuple[int, int] = (12, 12)


class ApScanConfig(ToleranceConfig):
    f: str = "sqrt1p"
    ks: list[float] = Field(min_length=1)
    eps: float = 0.01
    omega: float = Field(default=10.0, gt=0)
    p0: str = "sin"
    c: float = Field(default=0.0, ge=0)
    window: WindowConfig = Field(default_factory=WindowConfig)
    grid: tuple[int, int] = (9, 7)


_ConfigT = TypeVar("_ConfigT", bound=BaseModel)


def _config_error(e: ValidationError, prefix: str = "") -> ConfigError:
    error = e.errors()[0]
    key = ".".join(str(part) for part in error["loc"]) or "<root>"
    return ConfigError(f"{prefix}{key}", error["msg"])


def load_preset(name: str, preset_dir: Path = PRESET_DIR) -> dict:
    """
    Read a shipped preset by name, with or without the ``.json`` suffix.

    Raises:
        FileNotFoundError: If no such preset exists.
    """
    path = preset_dir / (name if name.endswith(".json") else f"{name}.json")
    if not path.exists():
        raise FileNotFoundError(f"Cannot find the preset file: {path}")
    with open(path, "r") as f:
        return json.load(f)


def read_config(source: str) -> dict:
    """A config file path, or the name of a shipped preset when no such file exists."""
    if os.path.exists(source):
        with open(source, "r") as f:
            return json.load(f)
    return load_preset(os.path.basename(source))


def validate_overrides(model: Type[BaseModel], overrides: Mapping[str, Any]) -> dict:
    """
    Check flag values against a partial version of `model` and return the ones that were set.

    Raises:
        ConfigError: Naming the first rejected flag.
    """
    partial = make_partial_model(model)
    try:
        return partial.model_validate(overrides).model_dump(exclude_none=True)
    except ValidationError as e:
        raise _config_error(e) from e


def resolve_config(model: Type[_ConfigT], data: Optional[Mapping[str, Any]],
                   overrides: Optional[Mapping[str, Any]] = None) -> _ConfigT:
    """
    Validate a config read from file, then apply flag overrides on top of it.

    Raises:
        ConfigError: With the dotted key of the first failing field.
    """
    overrides = {key: value for key, value in (overrides or {}).items() if value not in (None, {})}
    try:
        if data is None:
            return model.model_validate(overrides)
        return merge_overrides(model.model_validate(data), overrides)
    except ValidationError as e:
        raise _config_error(e) from e
