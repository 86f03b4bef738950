"""
File input and output for the de Branges Spectral Laboratory.

CSV tables go through pandas; JSON documents are written with sorted keys
and a fixed float representation so identical inputs give identical bytes.
Every JSON document carries a "schema" field.
"""

import json
import math
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from debranges_lab.errors import ConfigError
from debranges_lab.logging_utils import get_logger
from debranges_lab.operator_core import PotentialFunction, tabulated_potential
from debranges_lab.spectral_measure import GridFunction, SpectralMeasure

logger = get_logger("io_utils")

SCHEMA_VERSION = "v1"
FLOAT_FORMAT = "%.17g"


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _read_csv(path: str, columns) -> pd.DataFrame:
    if not os.path.exists(path):
        raise ConfigError(f"File not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ConfigError(f"Could not parse {path}: {e}")
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ConfigError(f"{path} lacks required columns: {', '.join(missing)}")
    return frame


def read_potential_table(path: str) -> PotentialFunction:
    """Tabulated potential from a CSV with columns x, q."""
    frame = _read_csv(path, ("x", "q"))
    try:
        q = tabulated_potential(frame["x"].to_numpy(dtype=float), frame["q"].to_numpy(dtype=float))
    except ValueError as e:
        raise ConfigError(f"Invalid potential table {path}: {e}")
    logger.debug(f"Read potential table {path} with {len(frame)} rows")
    return q


def write_potential_table(path: str, x, q) -> str:
    _ensure_parent(path)
    pd.DataFrame({"x": np.asarray(x, dtype=float), "q": np.asarray(q, dtype=float)}).to_csv(
        path, index=False, float_format=FLOAT_FORMAT)
    return path


def write_measure_csv(path: str, measure: SpectralMeasure) -> str:
    _ensure_parent(path)
    pd.DataFrame({"lambda": measure.lambdas, "weight": measure.weights}).to_csv(
        path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_measure_csv(path: str, lambda_max: Optional[float] = None, gauge: str = "unspecified") -> SpectralMeasure:
    frame = _read_csv(path, ("lambda", "weight"))
    lams = frame["lambda"].to_numpy(dtype=float)
    top = float(lambda_max) if lambda_max is not None else (float(lams.max()) if lams.size else 0.0)
    try:
        return SpectralMeasure.from_arrays(lams, frame["weight"].to_numpy(dtype=float), top, gauge=gauge)
    except ValueError as e:
        raise ConfigError(f"Invalid measure table {path}: {e}")


def write_grid_function(path: str, f: GridFunction) -> str:
    """CSV with columns x, re, im."""
    _ensure_parent(path)
    values = np.asarray(f.values)
    pd.DataFrame({"x": f.grid, "re": np.real(values), "im": np.imag(values)}).to_csv(
        path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_grid_function(path: str, c: Optional[float] = None) -> GridFunction:
    frame = _read_csv(path, ("x", "re"))
    x = frame["x"].to_numpy(dtype=float)
    values = frame["re"].to_numpy(dtype=float)
    if "im" in frame.columns and np.any(frame["im"].to_numpy(dtype=float) != 0.0):
        values = values + 1j * frame["im"].to_numpy(dtype=float)
    try:
        return GridFunction(x, values, float(c) if c is not None else float(x[-1]))
    except ValueError as e:
        raise ConfigError(f"Invalid grid function {path}: {e}")


def write_frame(path: str, frame: pd.DataFrame) -> str:
    """Kernel tables, E samples and other plottable tables."""
    _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(float(np.real(value))), "im": _jsonable(float(np.imag(value)))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def dumps_json(document: Dict[str, Any]) -> str:
    """Deterministic JSON text with the schema tag added."""
    payload = dict(document)
    payload.setdefault("schema", SCHEMA_VERSION)
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: str, document: Dict[str, Any]) -> str:
    _ensure_parent(path)
    with open(path, "w") as f:
        f.write(dumps_json(document))
    logger.debug(f"Wrote {path}")
    return path


def read_json(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError(f"File not found: {path}")
    with open(path, "r") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in {path}: {e}")
    if not isinstance(document, dict):
        raise ConfigError(f"{path} must contain a JSON object")
    schema = document.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema {schema!r} in {path}; expected {SCHEMA_VERSION!r}")
    return document


def write_measure_json(path: str, measure: SpectralMeasure) -> str:
    return write_json(path, measure.to_dict())


def read_measure_json(path: str) -> SpectralMeasure:
    document = read_json(path)
    try:
        return SpectralMeasure.from_dict(document)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Invalid spectral measure in {path}: {e}")


def read_measure(path: str) -> SpectralMeasure:
    """Measure from a .json document or a lambda,weight CSV."""
    if path.lower().endswith(".csv"):
        return read_measure_csv(path)
    return read_measure_json(path)
