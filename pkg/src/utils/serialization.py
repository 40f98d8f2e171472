"""Report serialization for the Riccati inequality analyzer.

Reports are dataclasses holding numpy arrays, complex numbers and enums. This
module turns them into JSON with a fixed key order (dataclass field order),
complex numbers as ``[re, im]`` pairs, real-valued arrays as plain numbers and
infinities as the strings ``"inf"``/``"-inf"``. Floats keep Python's shortest
round-trip representation, so identical reports serialize byte-identically.
"""

import dataclasses
import json
import math
import os
import tempfile
from collections.abc import Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl
import structlog

# Initialize logger
logger = structlog.get_logger(__name__)


def _float(value: float) -> float | str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return float(value)


def _complex(value: complex) -> list[float | str]:
    return [_float(value.real), _float(value.imag)]


def _array(value: np.ndarray) -> Any:
    if np.iscomplexobj(value) and not np.any(value.imag):
        value = value.real
    return [to_jsonable(v) for v in value.tolist()]


def to_jsonable(obj: Any) -> Any:
    """Convert a report object into plain JSON-compatible values.

    Dataclasses may define ``to_dict()`` to control which fields are exported;
    otherwise all fields are exported in declaration order.
    """
    if obj is None or isinstance(obj, bool | str):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, int | np.integer):
        return int(obj)
    if isinstance(obj, float | np.floating):
        return _float(float(obj))
    if isinstance(obj, complex | np.complexfloating):
        return _complex(complex(obj))
    if isinstance(obj, np.ndarray):
        if obj.ndim == 0:
            return to_jsonable(obj.item())
        return _array(obj)
    if isinstance(obj, Path):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, Sequence):
        return [to_jsonable(v) for v in obj]

    error_msg = f"Cannot serialize object of type {type(obj).__name__}"
    raise TypeError(error_msg)


def dumps_report(obj: Any) -> str:
    """Serialize a report to a deterministic JSON string (trailing newline included)."""
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _write_text_safely(text: str, file_path: Path) -> None:
    """Write through a temporary file in the target directory, then replace."""
    file_path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=file_path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(temp_name, file_path)
    except OSError:
        Path(temp_name).unlink(missing_ok=True)
        raise


def write_report(obj: Any, file_path: Path | None = None) -> str:
    """Serialize a report and write it to ``file_path`` when given.

    Returns:
        The serialized JSON text
    """
    text = dumps_report(obj)
    if file_path is not None:
        _write_text_safely(text, file_path)
        logger.debug("Wrote report", path=str(file_path), size=len(text))
    return text


def frame_to_csv(df: pl.DataFrame, file_path: Path | None = None) -> str:
    """Render a polars frame as CSV, writing it to ``file_path`` when given."""
    text = df.write_csv()
    if file_path is not None:
        _write_text_safely(text, file_path)
        logger.debug("Wrote CSV", path=str(file_path), rows=df.height)
    return text
