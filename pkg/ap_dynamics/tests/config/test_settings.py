import pytest

from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.exception.errors import ConfigError


def test_threads_from_env(monkeypatch):
    monkeypatch.setenv("HORSESHOE_THREADS", "3")
    monkeypatch.delenv("AP_DYNAMICS_CHUNK", raising=False)
    settings = RuntimeSettings.from_env()
    assert settings.threads == 3
    assert settings.chunk_size == 64


def test_explicit_threads_win(monkeypatch):
    monkeypatch.setenv("HORSESHOE_THREADS", "3")
    assert RuntimeSettings.from_env(threads=1).threads == 1


@pytest.mark.parametrize("name, value", [("HORSESHOE_THREADS", "0"), ("AP_DYNAMICS_CHUNK", "lots")])
def test_invalid_env_names_the_variable(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError) as info:
        RuntimeSettings.from_env()
    assert info.value.key == name
