"""JSON input and output for the command line front end.

Models are objects with "mean" and "cov" fields; transforms and observed
values are bare nested arrays. Malformed content raises InvalidInput with
a message naming the offending field, so the CLI can map it to its parse
exit code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimError, InvalidInput, NotPositive
from .gaussian import Gaussian
from .spectral import SymOperator


def _load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def _as_array(obj, path, field: str, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{path}: {field} is not numeric") from exc
    if arr.ndim != ndim:
        raise InvalidInput(f"{path}: {field} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{path}: {field} contains non-finite entries")
    return arr


def load_model(path: str | Path) -> tuple[Gaussian, dict]:
    """Read a law from JSON; returns it with any extra fields (e.g. indices)."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InvalidInput(f"{path}: model must be a JSON object")
    for field in ("mean", "cov"):
        if field not in data:
            raise InvalidInput(f"{path}: model is missing {field!r}")
    mean = _as_array(data["mean"], path, "mean", 1)
    cov = _as_array(data["cov"], path, "cov", 2)
    try:
        g = Gaussian(mean, SymOperator(cov))
    except (DimError, NotPositive, InvalidInput) as exc:
        raise InvalidInput(f"{path}: {exc}") from exc
    extra = {k: v for k, v in data.items() if k not in ("mean", "cov")}
    if "rank_tol_scale" in extra:
        try:
            extra["rank_tol_scale"] = float(extra["rank_tol_scale"])
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"{path}: rank_tol_scale is not a number") from exc
        if extra["rank_tol_scale"] <= 0:
            raise InvalidInput(f"{path}: rank_tol_scale must be positive")
    for key in ("x_index", "y_index"):
        if key in extra:
            if not isinstance(extra[key], int) or isinstance(extra[key], bool):
                raise InvalidInput(f"{path}: {key} must be an integer")
            if not 0 <= extra[key] < g.dim:
                raise InvalidInput(f"{path}: {key} out of range for dimension {g.dim}")
    return g, extra


def load_matrix(path: str | Path) -> np.ndarray:
    data = _load_json(path)
    arr = _as_array(data, path, "transform", 2)
    return arr


def load_vector(path: str | Path) -> np.ndarray:
    data = _load_json(path)
    return _as_array(data, path, "vector", 1)


def vector_out(v: np.ndarray) -> list[float]:
    return [float(x) for x in np.asarray(v).reshape(-1)]


def matrix_out(a: np.ndarray) -> list[list[float]]:
    a = np.asarray(a)
    return [[float(x) for x in row] for row in a]


def dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
