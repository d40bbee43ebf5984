import time
from contextlib import contextmanager

import pytest

from ap_dynamics.execution.base import BaseExecutionWrapper, Timer


class MockLogger:
    def __init__(self):
        self.logs = []

    def log(self, level, message):
        self.logs.append((level, message))


class Counter(BaseExecutionWrapper):
    def __init__(self):
        self.calls = 0

    @contextmanager
    def wrapping_logic(self, *args, **kwargs):
        self.calls += 1
        yield


def test_base_wrapper_passes_result():
    counter = Counter()

    @counter
    def add(x, y):
        return x + y

    assert add(3, 4) == 7
    assert add(1, 1) == 2
    assert counter.calls == 2


def test_timer_logs_elapsed():
    logger = MockLogger()
    timer = Timer("scatter", logger)

    @timer
    def work(x):
        time.sleep(0.01)
        return 2 * x

    assert work(3) == 6
    assert timer.elapsed >= 0.01
    assert "scatter: started" in logger.logs[0][1]
    assert "scatter: finished" in logger.logs[-1][1]


def test_timer_logs_failure():
    logger = MockLogger()

    @Timer("timemap", logger)
    def broken():
        raise ValueError("boom")

    with pytest.raises(ValueError, match="boom"):
        broken()
    assert "failed" in logger.logs[-1][1]
    assert "ValueError" in logger.logs[-1][1]
