"""Input validation helpers shared by the public modules."""

from __future__ import annotations

import re

import numpy as np

from .errors import DataValidationError

_ISO3_RE = re.compile(r"^[A-Z]{3}$")


def check_iso3(code: str, *, context: str = "") -> str:
    if not isinstance(code, str) or not _ISO3_RE.match(code):
        where = f" in {context}" if context else ""
        raise DataValidationError(f"invalid country code {code!r}{where}: expected three uppercase letters")
    return code


def check_probability(value: float, *, name: str = "alpha") -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise DataValidationError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value


def as_series(values, *, name: str = "losses") -> np.ndarray:
    """Coerce to a 1-D float array of finite values."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DataValidationError(f"{name} must not be empty")
    if not np.isfinite(arr).all():
        raise DataValidationError(f"{name} contains non-finite values")
    return arr


def as_loss_array(values, *, name: str = "losses") -> np.ndarray:
    """Coerce to a 2-D float array of finite, nonnegative values."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DataValidationError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise DataValidationError(f"{name} contains non-finite values")
    if arr.size and (arr < 0).any():
        raise DataValidationError(f"{name} contains negative values")
    return arr
