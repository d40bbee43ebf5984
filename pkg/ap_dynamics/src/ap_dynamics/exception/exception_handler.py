import json
import logging
from contextlib import contextmanager
from typing import Optional

from ap_dynamics.exception.errors import ApDynamicsError


@contextmanager
def exception_handler(logger: Optional[logging.Logger] = None, **kwargs):
    """
    A context manager that attaches run context to errors raised inside it.

    Library errors keep their type and attributes and receive the context as a note.
    Missing files and malformed JSON are re-raised as their own types with the
    context in the message. Anything else is wrapped in ``ApDynamicsError``.
    The final error is logged with ``logger.error(repr(e))`` when a logger is given.

    Args:
        logger (logging.Logger, optional): Logger receiving the error. Defaults to None.
        **kwargs: Context pairs rendered as ``key: value; ...``.

    Raises:
        Exception: The (possibly wrapped) error raised in the block.

    Example:
        with exception_handler(logger=log, subcommand="timemap", rho=8.0):
            run_timemap(config)
    """
    try:
        details = "; ".join(f"{key}: {value}" for key, value in kwargs.items())
        try:
            yield
        except ApDynamicsError as e:
            e.add_note(f"Context: [{details}]")
            raise
        except FileNotFoundError as e:
            raise FileNotFoundError(f"Error: File not found: {e.filename or e}. Context: [{details}]") from e
        except json.JSONDecodeError as e:
            raise json.JSONDecodeError(f"Error: Failed to parse JSON. Context: [{details}]", e.doc, e.pos) from e
        except Exception as e:
            raise ApDynamicsError(f"Error: {type(e).__name__}: {e}. Context: [{details}]") from e
    except Exception as e:
        if logger is not None:
            logger.error(repr(e))
        raise e
