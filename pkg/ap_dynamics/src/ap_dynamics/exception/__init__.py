from ap_dynamics.exception.errors import (
    ApDynamicsError,
    ConfigError,
    ConstraintViolation,
    DivergentIntegral,
    DomainError,
    EligibilityError,
    NumericalError,
    PreconditionError,
)
from ap_dynamics.exception.exception_handler import exception_handler

__all__ = [
    "ApDynamicsError",
    "ConfigError",
    "ConstraintViolation",
    "DivergentIntegral",
    "DomainError",
    "EligibilityError",
    "NumericalError",
    "PreconditionError",
    "exception_handler",
]
