"""Dense complex linear algebra used throughout the package.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``. The
helpers here add the validation and ordering conventions the rest of the
package relies on: eigenvalues sorted slowest-first, unit eigenvectors,
pivot-checked solves.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import NonSquare, NumericalFailure, ShapeMismatch, Singular

__all__ = [
    "MAX_DIM",
    "EigenDecomposition",
    "LUSolver",
    "as_matrix",
    "as_vector",
    "eig",
    "solve",
    "adjoint",
    "commutator",
    "inner",
    "opnorm",
]

MAX_DIM = 64
EIG_RESIDUAL_TOL = 1e-10
PIVOT_TOL = 1e-12


def as_matrix(A, square=False, name="matrix"):
    """Return ``A`` as a finite 2-D complex array, copying only if needed."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
        raise ShapeMismatch(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def as_vector(v, dim=None, name="vector"):
    """Return ``v`` as a finite 1-D complex array of length ``dim``."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ShapeMismatch(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ShapeMismatch(f"{name} has length {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def opnorm(A):
    """Spectral norm of ``A``."""
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues and unit right eigenvectors, slowest mode first.

    Attributes
    ----------
    values : ndarray of shape (d,)
        Eigenvalues sorted by descending real part, ties by descending
        imaginary part, then by LAPACK output index.
    right_vectors : ndarray of shape (d, d)
        Column ``j`` is the unit-norm eigenvector belonging to ``values[j]``.
    vector_condition : float
        2-norm condition number of ``right_vectors``.
    """

    values: np.ndarray
    right_vectors: np.ndarray
    vector_condition: float

    @property
    def dim(self):
        return self.values.shape[0]

    def reconstruct(self):
        """Return ``V diag(values) V^{-1}``."""
        V = self.right_vectors
        return np.linalg.solve(V.T, (V * self.values).T).T


def _slow_order(values):
    """Permutation sorting ``values`` slowest-first with tolerant tie-breaking."""
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    tol = 1e-9 * scale
    order = sorted(range(values.size), key=lambda i: -values[i].real)
    # Group nearly equal real parts so conjugate pairs stay ordered by Im.
    out, group = [], []
    for i in order:
        if group and values[group[0]].real - values[i].real > tol:
            out.extend(sorted(group, key=lambda j: (-values[j].imag, j)))
            group = []
        group.append(i)
    out.extend(sorted(group, key=lambda j: (-values[j].imag, j)))
    return np.array(out, dtype=int)


def eig(A):
    """Eigendecomposition of a small dense matrix.

    Parameters
    ----------
    A : array_like of shape (d, d)
        Square matrix with ``d <= 64``.

    Returns
    -------
    EigenDecomposition

    Raises
    ------
    NonSquare
        If ``A`` is not square.
    NumericalFailure
        If LAPACK does not converge or the eigen-residual exceeds
        ``1e-10 * ||A||``.
    """
    A = as_matrix(A, square=True)
    if A.shape[0] > MAX_DIM:
        raise ShapeMismatch(f"dimension {A.shape[0]} exceeds supported maximum {MAX_DIM}")
    try:
        values, vectors = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration failed: {exc}") from exc
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise NumericalFailure("eigensolver returned non-finite output")

    order = _slow_order(values)
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)

    norm_a = opnorm(A)
    residual = np.linalg.norm(A @ vectors - vectors * values, axis=0)
    if np.any(residual > EIG_RESIDUAL_TOL * norm_a + 1e-300):
        raise NumericalFailure(
            f"eigen-residual {residual.max():.3e} exceeds {EIG_RESIDUAL_TOL:g}*||A||"
        )
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(vectors))
    if not np.isfinite(cond):
        cond = np.inf
    return EigenDecomposition(values, vectors, cond)


class LUSolver:
    """Pivoted LU factorization of a square matrix, reusable across solves.

    Raises :class:`Singular` at construction when a pivot falls below
    ``1e-12 * ||A||``.
    """

    def __init__(self, A):
        A = as_matrix(A, square=True)
        self.shape = A.shape
        self.norm = opnorm(A)
        # exact zero pivots are reported below as Singular
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
        pivots = np.abs(np.diag(lu))
        if self.norm == 0.0 or pivots.min() < PIVOT_TOL * self.norm:
            raise Singular(f"smallest pivot {pivots.min():.3e} below {PIVOT_TOL:g}*||A||")
        self._factor = (lu, piv)

    def solve(self, b, trans=0):
        """Solve ``A x = b`` (``trans=0``), ``A^T x = b`` (1) or ``A^H x = b`` (2)."""
        b = np.asarray(b, dtype=np.complex128)
        if b.shape[0] != self.shape[0]:
            raise ShapeMismatch(f"right-hand side has {b.shape[0]} rows, expected {self.shape[0]}")
        return scipy.linalg.lu_solve(self._factor, b, trans=trans, check_finite=False)


def solve(A, b):
    """Solve ``A x = b`` by pivoted LU.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    return LUSolver(A).solve(b)


def adjoint(A):
    """Conjugate transpose."""
    return np.conj(np.asarray(A)).T


def commutator(A, B):
    """Return ``AB - BA``."""
    A = as_matrix(A, square=True, name="A")
    B = as_matrix(B, square=True, name="B")
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes {A.shape} and {B.shape} differ")
    return A @ B - B @ A


def inner(u, v):
    """Inner product linear in the first slot: ``sum(u * conj(v))``."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.shape != v.shape:
        raise ShapeMismatch(f"shapes {u.shape} and {v.shape} differ")
    return complex(np.sum(u * np.conj(v)))
