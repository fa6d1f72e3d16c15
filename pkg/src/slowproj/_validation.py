"""Input checks shared by the estimator and the command line."""

import numbers

import numpy as np

from .exceptions import ShapeMismatch
from .linalg import MAX_DIM, as_matrix
from .spectral import LinearSystem


def check_operator(operator):
    """Coerce ``operator`` (array or :class:`LinearSystem`) to a ``LinearSystem``."""
    if isinstance(operator, LinearSystem):
        return operator
    if operator is None:
        raise ValueError("an operator matrix is required")
    L = as_matrix(operator, square=True, name="operator")
    if L.shape[0] > MAX_DIM:
        raise ShapeMismatch(f"operator dimension {L.shape[0]} exceeds {MAX_DIM}")
    return LinearSystem(L)


def check_states(X, n_features, name="X"):
    """Return ``X`` as a finite complex array of shape ``(n_samples, n_features)``.

    A single 1-D state is promoted to one row.
    """
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ShapeMismatch(f"{name} must be 1-D or 2-D, got {X.ndim}-D")
    if X.shape[1] != n_features:
        raise ShapeMismatch(f"{name} has {X.shape[1]} features, expected {n_features}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    return X


def check_slow_count(n, dim):
    if not isinstance(n, numbers.Integral) or isinstance(n, bool):
        raise TypeError(f"n_slow must be an integer, got {type(n).__name__}")
    if not 1 <= n <= dim:
        raise ValueError(f"n_slow={n} outside [1, {dim}]")
    return int(n)


def split_complex(Z):
    """Stack real and imaginary parts column-wise."""
    return np.hstack([Z.real, Z.imag])


def merge_complex(Z, n):
    Z = np.asarray(Z)
    if np.iscomplexobj(Z):
        return Z.astype(np.complex128)
    if Z.shape[-1] != 2 * n:
        raise ShapeMismatch(f"expected {2 * n} real columns, got {Z.shape[-1]}")
    return Z[..., :n] + 1j * Z[..., n:]
