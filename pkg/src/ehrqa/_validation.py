"""Small input-validation helpers used by the estimators and operations."""

from __future__ import annotations

import numbers

import numpy as np

from .errors import ConfigurationError


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(value, name, low=None, high=None, low_inclusive=True):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigurationError(f"{name} must be finite, got {value}")
    if low is not None:
        if low_inclusive and value < low:
            raise ConfigurationError(f"{name} must be >= {low}, got {value}")
        if not low_inclusive and value <= low:
            raise ConfigurationError(f"{name} must be > {low}, got {value}")
    if high is not None and value > high:
        raise ConfigurationError(f"{name} must be <= {high}, got {value}")
    return value


def check_matrix(x, name, ndim=2, dim=None, allow_empty=False):
    """Coerce ``x`` to a float64 array and check its shape."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != ndim:
        raise ConfigurationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ConfigurationError(f"{name} is empty")
    if dim is not None and arr.shape[-1] != dim:
        raise ConfigurationError(f"{name} has dimension {arr.shape[-1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite values")
    return arr
