from ap_dynamics.timemap.integrals import (
    DEFAULT_RTOL,
    TimeMapKind,
    TimeMapQuery,
    TimeValue,
    period_O,
    tau,
    tau_O,
    tau_U,
    tau_V,
)

__all__ = [
    "DEFAULT_RTOL",
    "TimeMapKind",
    "TimeMapQuery",
    "TimeValue",
    "period_O",
    "tau",
    "tau_O",
    "tau_U",
    "tau_V",
]
