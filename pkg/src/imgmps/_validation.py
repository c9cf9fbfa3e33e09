"""Input checks shared by the estimator wrappers.

``sklearn.utils.check_array`` rejects complex input, so state batches are
validated here instead.
"""

from __future__ import annotations

import numpy as np

from .encode import StateVector
from .imageio import ImageGrid


def check_images(X) -> list:
    """Return a list of :class:`ImageGrid` from grids or square arrays."""
    if isinstance(X, ImageGrid):
        return [X]
    arr = X if isinstance(X, (list, tuple)) else np.asarray(X, dtype=float)
    if isinstance(arr, np.ndarray):
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3:
            raise ValueError(f"expected a stack of square images, got shape {arr.shape}")
    out = [x if isinstance(x, ImageGrid) else ImageGrid.from_array(np.asarray(x, dtype=float)) for x in arr]
    if not out:
        raise ValueError("no images given")
    return out


def check_states(X) -> np.ndarray:
    """Stack states into a ``(n_samples, 2**m)`` complex array of unit rows."""
    if isinstance(X, StateVector):
        X = [X]
    rows = [x.amps if isinstance(x, StateVector) else np.asarray(x, dtype=complex).ravel() for x in X]
    if not rows:
        raise ValueError("no states given")
    arr = np.stack(rows)
    size = arr.shape[1]
    if size < 2 or size & (size - 1):
        raise ValueError(f"state length must be a power of two >= 2, got {size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("states contain non-finite amplitudes")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero state in input")
    return arr / norms[:, None]


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_is_fitted(est, attr: str):
    if not hasattr(est, attr):
        raise RuntimeError(f"{type(est).__name__} is not fitted yet; call fit first")
