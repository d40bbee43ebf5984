import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from ap_dynamics.exception.errors import ConfigError


class RuntimeSettings(BaseModel):
    """Process settings read from the environment (and a `.env` file, if present)."""

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    chunk_size: int = Field(default=64, ge=1)

    @classmethod
    def from_env(cls, threads: Optional[int] = None) -> "RuntimeSettings":
        """
        Build settings from ``HORSESHOE_THREADS`` and ``AP_DYNAMICS_CHUNK``.

        Args:
            threads (int, optional): Explicit worker cap that wins over the environment.

        Raises:
            ConfigError: If a variable is not a positive integer.
        """
        load_dotenv()
        values = {}
        if threads is not None:
            values["threads"] = threads
        elif os.getenv("HORSESHOE_THREADS"):
            values["threads"] = os.getenv("HORSESHOE_THREADS")
        if os.getenv("AP_DYNAMICS_CHUNK"):
            values["chunk_size"] = os.getenv("AP_DYNAMICS_CHUNK")
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            error = e.errors()[0]
            key = {"threads": "HORSESHOE_THREADS", "chunk_size": "AP_DYNAMICS_CHUNK"}[error["loc"][0]]
            raise ConfigError(key, error["msg"]) from e
