"""Input validation helpers used by the data classes and the estimator."""

import numpy as np

from .exceptions import ConfigurationError


def as_complex_vector(values, n=None, name="vector"):
    """Coerce to a finite 1-D complex array, optionally of fixed length."""
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ConfigurationError(f"{name} must have length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    return arr


def as_float_vector(values, n=None, name="vector", nonnegative=False):
    """Coerce to a finite 1-D float array, optionally nonnegative."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ConfigurationError(f"{name} must have length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    if nonnegative and np.any(arr < 0):
        raise ConfigurationError(f"{name} must be nonnegative")
    return arr


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_unit_modulus(values, tol=1e-12, name="phi"):
    dev = np.max(np.abs(np.abs(values) - 1.0)) if len(values) else 0.0
    if dev > tol:
        raise ConfigurationError(
            f"{name} must be unit modulus (max deviation {dev:.3e} > {tol:.1e})"
        )
