import json

import pytest

from ap_dynamics.exception.errors import ApDynamicsError, ConstraintViolation, DivergentIntegral, DomainError
from ap_dynamics.exception.exception_handler import exception_handler


# Mock logger for testing
class MockLogger:
    def __init__(self):
        self.logs = []

    def error(self, message):
        self.logs.append(message)


def test_exception_handler_file_not_found():
    logger = MockLogger()
    with pytest.raises(FileNotFoundError, match="preset: fig9.json"):
        with exception_handler(preset="fig9.json", logger=logger):
            raise FileNotFoundError(2, "No such file", "fig9.json")
    assert logger.logs


def test_exception_handler_json_decode_error():
    logger = MockLogger()
    with pytest.raises(json.JSONDecodeError):
        invalid = '{"k1": b}'
        with exception_handler(data=invalid, logger=logger):
            json.loads(invalid)


def test_exception_handler_keeps_library_errors():
    logger = MockLogger()
    with pytest.raises(ConstraintViolation) as info:
        with exception_handler(subcommand="horseshoe", logger=logger):
            raise ConstraintViolation("k1 < k2", "k1=2, k2=2")
    assert info.value.inequality == "k1 < k2"
    assert any("subcommand: horseshoe" in note for note in info.value.__notes__)
    assert "ConstraintViolation" in logger.logs[0]


def test_exception_handler_wraps_generic_exception():
    logger = MockLogger()
    with pytest.raises(ApDynamicsError, match="context: example"):
        with exception_handler(context="example", logger=logger):
            raise RuntimeError("Generic error")


def test_error_hierarchy():
    assert issubclass(ConstraintViolation, DomainError)
    assert issubclass(DomainError, ValueError)
    assert issubclass(DivergentIntegral, ArithmeticError)
