import threading

from ap_dynamics.config.singleton import Singleton
from ap_dynamics.model.nonlinearity import Nonlinearity, _abs_nonlinearity, _sqrt1p_nonlinearity


class NonlinearityCatalog(metaclass=Singleton):
    """
    Process-wide registry of nonlinearities, selected by name in configs (``{"f": "sqrt1p"}``).

    Ships with ``abs`` (f(s) = |s|) and ``sqrt1p`` (f(s) = sqrt(1+s^2) - 1).
    """

    def __init__(self):
        self._entries: dict[str, Nonlinearity] = {}
        self._lock = threading.Lock()
        for builtin in (_abs_nonlinearity(), _sqrt1p_nonlinearity()):
            self.register(builtin)

    def register(self, nonlinearity: Nonlinearity, replace: bool = False) -> Nonlinearity:
        """
        Validate and add a nonlinearity.

        Raises:
            DomainError: If the sample check of the sign and growth conditions fails.
            ValueError: If the name is taken and `replace` is False.
        """
        nonlinearity.validate()
        with self._lock:
            if nonlinearity.name in self._entries and not replace:
                raise ValueError(f"Nonlinearity already registered: {nonlinearity.name}")
            self._entries[nonlinearity.name] = nonlinearity
        return nonlinearity

    def get(self, name: str) -> Nonlinearity:
        nonlinearity = self._entries.get(name)
        if nonlinearity is None:
            raise ValueError(f"Unsupported nonlinearity: {name}")
        return nonlinearity

    def names(self) -> list[str]:
        return sorted(self._entries)


def get_nonlinearity(name: str) -> Nonlinearity:
    return NonlinearityCatalog().get(name)
