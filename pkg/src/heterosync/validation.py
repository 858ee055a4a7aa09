"""Input validation helpers shared across the package.

Conventions: vectors are 1-D float arrays, matrices 2-D float arrays.
Everything is converted to float64 up front so downstream numerics never
see object or integer dtypes.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ArgumentError


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ArgumentError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ArgumentError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains non-finite entries")
    return arr


def as_square_matrix(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ArgumentError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} contains non-finite entries")
    return arr


def as_matrix_list(matrices, name: str = "matrix list") -> np.ndarray:
    """Convert a nonempty list of equally sized square matrices to an (N, p, p) array."""
    seq = list(matrices)
    if not seq:
        raise ArgumentError(f"{name} must be nonempty")
    mats = [as_square_matrix(m, f"{name}[{i}]") for i, m in enumerate(seq)]
    p = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != p:
            raise ArgumentError(
                f"{name}[{i}] has order {m.shape[0]}, expected {p} like {name}[0]"
            )
    return np.array(mats)


def check_symmetric(m: np.ndarray, name: str = "matrix", tol: float = 1e-10) -> np.ndarray:
    scale = max(float(np.abs(m).max()), 1.0)
    if np.abs(m - m.T).max() > tol * scale:
        raise ArgumentError(f"{name} must be symmetric")
    return 0.5 * (m + m.T)


def check_probability_range(x: float, name: str, low: float = 0.0, high: float = 1.0,
                            include_low: bool = True, include_high: bool = False) -> float:
    x = float(x)
    ok_low = x >= low if include_low else x > low
    ok_high = x <= high if include_high else x < high
    if not (ok_low and ok_high):
        lo_b = "[" if include_low else "("
        hi_b = "]" if include_high else ")"
        raise ArgumentError(f"{name} must be in {lo_b}{low}, {high}{hi_b}, got {x}")
    return x
