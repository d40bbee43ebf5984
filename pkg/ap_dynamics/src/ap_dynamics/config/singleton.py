import threading


class Singleton(type):
    """
    Metaclass for process-wide registries: each class gets one shared instance, built under a
    lock on first use so that worker threads never see two of them.

    Example:
        class WaveformRegistry(metaclass=Singleton):
            pass

        assert WaveformRegistry() is WaveformRegistry()
        WaveformRegistry.reset()
    """

    _lock = threading.RLock()

    def __init__(cls, name, bases, namespace):
        super().__init__(name, bases, namespace)
        cls._shared = None

    def __call__(cls, *args, **kwargs):
        shared = cls._shared
        if shared is None:
            with Singleton._lock:
                if cls._shared is None:
                    cls._shared = super().__call__(*args, **kwargs)
                shared = cls._shared
        return shared

    def reset(cls) -> None:
        """Forget the shared instance; the next call builds a fresh one."""
        with Singleton._lock:
            cls._shared = None
