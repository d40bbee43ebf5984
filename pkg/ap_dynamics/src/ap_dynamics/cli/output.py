import csv
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from ap_dynamics import __version__


def format_float(value: float) -> str:
    """17 significant digits, which round-trips every double."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars and arrays become Python values, non-finite floats strings."""
    if isinstance(value, BaseModel):
        return _plain(value.model_dump(mode="json"))
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_float(value)
    if isinstance(value, Enum):
        return value.value
    return value


def metadata(subcommand: str, config: BaseModel) -> dict:
    return {
        "tool": "ap-dynamics",
        "version": __version__,
        "subcommand": subcommand,
        "config": _plain(config),
    }


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]], meta: dict) -> int:
    """
    Write rows under a ``#``-prefixed metadata block holding the resolved config as JSON.

    Returns:
        int: Number of data rows written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        f.write(f"# {json.dumps(meta, sort_keys=True)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    return count


def write_json(path: Path, result: Any, meta: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump({"metadata": meta, "result": _plain(result)}, f, indent=2, sort_keys=True)
        f.write("\n")


def read_csv(path: Path) -> tuple[dict, list[dict]]:
    """Inverse of `write_csv`: (metadata, rows as string dicts)."""
    with open(path, "r", newline="") as f:
        first = f.readline()
        meta = json.loads(first[2:]) if first.startswith("# ") else {}
        return meta, list(csv.DictReader(f))
