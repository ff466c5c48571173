"""Input validation helpers shared by the estimator, I/O layer and CLI."""

import numpy as np

from .exceptions import EmptyDataError, InvalidEtaError, OutOfRangeError


def check_shots_array(X):
    """Coerce per-shot count data to an (n_shots, 2) int64 array.

    Accepts any array-like of nonnegative integer pairs. Raises
    EmptyDataError for zero rows and ValueError for bad shape, negative
    or non-integral entries.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError(f"shot data must have shape (n_shots, 2), got {X.shape}")
    if X.shape[0] == 0:
        raise EmptyDataError("no shots provided")
    if not np.issubdtype(X.dtype, np.integer):
        rounded = np.rint(X)
        if not np.all(np.isfinite(X)) or np.any(np.abs(X - rounded) > 1e-9):
            raise ValueError("shot counts must be integers")
        X = rounded
    X = X.astype(np.int64)
    if np.any(X < 0):
        raise ValueError("shot counts must be nonnegative")
    return X


def check_eta(eta):
    """Detection efficiency must lie in (0, 1]."""
    eta = float(eta)
    if not 0.0 < eta <= 1.0:
        raise InvalidEtaError(f"detection efficiency must be in (0, 1], got {eta}")
    return eta


def check_ordering(s):
    """Ordering parameter must lie in [-1, 1]."""
    s = float(s)
    if not -1.0 <= s <= 1.0:
        raise OutOfRangeError(f"ordering parameter must be in [-1, 1], got {s}")
    return s


def check_positive(name, value):
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_nonnegative(name, value):
    value = float(value)
    if not value >= 0.0:
        raise ValueError(f"{name} must be nonnegative, got {value}")
    return value
