class ApDynamicsError(Exception):
    """Base class for every error raised by ap_dynamics."""


class DomainError(ApDynamicsError, ValueError):
    """A physical parameter lies outside the domain of an operation."""


class EligibilityError(DomainError):
    """The nonlinearity lacks the regularity an operation requires."""


class ConstraintViolation(DomainError):
    """
    A region geometry inequality does not hold.

    Attributes:
        inequality (str): Human readable form of the failed relation, e.g. ``"a < x_u(k1)"``.
    """

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        message = f"Constraint violated: {inequality}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class DivergentIntegral(ApDynamicsError, ArithmeticError):
    """A divergent time-map value was consumed as a finite number."""


class NumericalError(ApDynamicsError, RuntimeError):
    """A numerical routine failed to converge or a self-check did not hold."""


class PreconditionError(ApDynamicsError):
    """An operation was called on an object in the wrong state."""


class ConfigError(ApDynamicsError, ValueError):
    """
    A configuration value was rejected.

    Attributes:
        key (str): Dotted path of the offending key.
    """

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"Invalid configuration at '{key}': {message}")
