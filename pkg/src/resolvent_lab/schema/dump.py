from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path
from typing import Any

from ruamel.yaml import YAML

_yaml = YAML()
_yaml.default_flow_style = False
_yaml.indent(mapping=2, sequence=4, offset=2)


def dump_yaml(data: dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        _yaml.dump(data, f)


def to_plain(value: Any) -> Any:
    """
    Convert report data to JSON-native values: numpy scalars to Python
    numbers, complex to [re, im], enums to their values, tuples to lists and
    non-finite floats to the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, Enum):
        return to_plain(value.value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(value)
    if isinstance(value, complex):
        return [to_plain(value.real), to_plain(value.imag)]
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if hasattr(value, "tolist"):
        return to_plain(value.tolist())
    raise TypeError(f"cannot serialise {type(value).__name__}")


def to_json(data: Any) -> str:
    """
    Deterministic JSON text. Keys keep insertion order and floats use the
    shortest repr that round-trips, so identical inputs give identical bytes.
    """
    return json.dumps(to_plain(data), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def dump_json(data: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(data), encoding="utf-8")
