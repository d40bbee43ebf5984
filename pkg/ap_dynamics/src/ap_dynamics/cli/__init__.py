from ap_dynamics.cli.config import (
    AnalyzeConfig,
    ApScanConfig,
    ForcingConfig,
    HorseshoeConfig,
    IcLineConfig,
    LevelsConfig,
    MelnikovConfig,
    ScatterConfig,
    TimemapConfig,
    ToleranceConfig,
    WindowConfig,
    load_preset,
    read_config,
    resolve_config,
)
from ap_dynamics.cli.main import build_parser, main, run

__all__ = [
    "AnalyzeConfig",
    "ApScanConfig",
    "ForcingConfig",
    "HorseshoeConfig",
    "IcLineConfig",
    "LevelsConfig",
    "MelnikovConfig",
    "ScatterConfig",
    "TimemapConfig",
    "ToleranceConfig",
    "WindowConfig",
    "build_parser",
    "load_preset",
    "main",
    "read_config",
    "resolve_config",
    "run",
]
