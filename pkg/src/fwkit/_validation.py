"""Small input-validation helpers shared across modules."""
import numbers

import numpy as np

from .exceptions import ContractViolation


def check_vector(x, dim=None, name="x"):
    """Return ``x`` as a finite, 1-D float64 array.

    Parameters
    ----------
    x : array-like
        Candidate vector.
    dim : int, optional
        Required length.
    name : str
        Used in error messages.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ContractViolation(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise ContractViolation(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains NaN or Inf")
    if dim is not None and arr.size != dim:
        raise ContractViolation(
            f"{name} has dimension {arr.size}, expected {dim}")
    return arr


def check_square_matrix(Q, name="Q"):
    arr = np.asarray(Q, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ContractViolation(f"{name} must be a non-empty square matrix")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains NaN or Inf")
    return arr


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ContractViolation(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_nonnegative(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ContractViolation(f"{name} must be a finite nonnegative number, got {value!r}")
    return value


def check_positive(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ContractViolation(f"{name} must be a finite positive number, got {value!r}")
    return value


def frozen(arr):
    """Read-only copy of ``arr``."""
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out
