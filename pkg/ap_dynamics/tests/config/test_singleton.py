import threading

import pytest

from ap_dynamics.config.singleton import Singleton
from ap_dynamics.model.catalog import NonlinearityCatalog
from ap_dynamics.model.nonlinearity import from_callable


class Counted(metaclass=Singleton):
    BUILT = 0

    def __init__(self):
        Counted.BUILT += 1


class Other(metaclass=Singleton):
    pass


def test_one_instance_per_class():
    first, second = Counted(), Counted()
    assert first is second
    assert Counted.BUILT == 1
    assert Other() is not first


def test_reset_builds_a_new_instance():
    before = Counted()
    Counted.reset()
    after = Counted()
    assert after is not before
    assert Counted() is after


def test_catalog_is_shared_across_threads():
    seen = []
    threads = [threading.Thread(target=lambda: seen.append(NonlinearityCatalog())) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(c is seen[0] for c in seen)
    assert {"abs", "sqrt1p"} <= set(seen[0].names())


def test_catalog_registrations_survive_until_reset():
    catalog = NonlinearityCatalog()
    square = from_callable("square", lambda s: s * s, lambda s: 2.0 * s)
    catalog.register(square)
    assert NonlinearityCatalog().get("square") is square
    with pytest.raises(ValueError):
        catalog.register(square)
    NonlinearityCatalog.reset()
    assert "square" not in NonlinearityCatalog().names()
