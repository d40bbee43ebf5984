import functools
import logging
import time
from contextlib import contextmanager
from typing import Optional


class BaseExecutionWrapper:
    """
    A base class that serves as a wrapper for synchronous callables, through `__call__`.

    Subclasses override `wrapping_logic` to add pre- and post-execution steps.
    """

    @contextmanager
    def wrapping_logic(self, *args, **kwargs):
        """
        Default wrapping logic: no pre- or post-execution steps.

        Args:
            *args: Positional arguments of the wrapped call.
            **kwargs: Keyword arguments of the wrapped call.

        Yields:
            None
        """
        yield

    def __call__(self, func):
        """
        Wraps `func` so that every call runs inside `wrapping_logic`.

        Args:
            func (Callable): The function to be wrapped.

        Returns:
            Callable: The wrapped function.
        """
        @functools.wraps(func)
        def sync_wrapper(*args, **kwargs):
            with self.wrapping_logic(*args, **kwargs):
                result = func(*args, **kwargs)
            return result

        return sync_wrapper


class Timer(BaseExecutionWrapper):
    """Logs start, wall time and failures of the wrapped call."""

    def __init__(self, name: str, logger: Optional[logging.Logger] = None):
        self.name = name
        self.logger = logger
        self.elapsed: Optional[float] = None

    def _log(self, level: int, message: str):
        if self.logger:
            self.logger.log(level, message)

    @contextmanager
    def wrapping_logic(self, *args, **kwargs):
        self._log(logging.INFO, f"{self.name}: started")
        start = time.perf_counter()
        try:
            yield
        except Exception as e:
            self.elapsed = time.perf_counter() - start
            self._log(logging.ERROR, f"{self.name}: failed after {self.elapsed:.3f}s with {type(e).__name__}")
            raise
        self.elapsed = time.perf_counter() - start
        self._log(logging.INFO, f"{self.name}: finished in {self.elapsed:.3f}s")
