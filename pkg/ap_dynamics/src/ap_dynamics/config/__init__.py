from ap_dynamics.config.partial import make_partial_model, merge_overrides
from ap_dynamics.config.settings import RuntimeSettings
from ap_dynamics.config.singleton import Singleton

__all__ = ["make_partial_model", "merge_overrides", "RuntimeSettings", "Singleton"]
