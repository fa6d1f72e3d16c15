"""Spectral data and slow-mode bases for stable linear systems ``dx/dt = L x``."""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import (
    ConjugatePairSplit,
    NearDefective,
    NotInvariant,
    OutOfRange,
    RankDeficient,
    ShapeMismatch,
    Unstable,
)

__all__ = [
    "STABILITY_TOL",
    "DEFECT_COND",
    "LinearSystem",
    "SpectralData",
    "SlowBasis",
    "analyze",
    "assert_stable",
    "slow_basis",
    "non_normality",
]

STABILITY_TOL = 1e-10
DEFECT_COND = 1e8
INDEPENDENCE_TOL = 1e-10
CONJUGATE_TOL = 1e-8


@dataclass(frozen=True)
class LinearSystem:
    """A linear operator ``L`` together with descriptive metadata."""

    matrix: np.ndarray
    label: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        A = linalg.as_matrix(self.matrix, square=True, name="system matrix")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})

    @property
    def dim(self):
        return self.matrix.shape[0]

    def is_real(self):
        return bool(np.all(self.matrix.imag == 0))


@dataclass(frozen=True)
class SpectralData:
    system: LinearSystem
    decomposition: linalg.EigenDecomposition
    stable: bool
    spectral_abscissa: float

    @property
    def eigenvalues(self):
        return self.decomposition.values

    @property
    def eigenvectors(self):
        return self.decomposition.right_vectors


@dataclass(frozen=True)
class SlowBasis:
    """Slow eigenpairs spanning the slow subspace.

    Attributes
    ----------
    eigenvalues : ndarray of shape (n,)
    vectors : ndarray of shape (d, n)
        Column ``j`` is an eigenvector for ``eigenvalues[j]``. Columns are not
        required to be normalized.
    gap : float
        ``Re(lambda_n) - Re(lambda_{n+1})``; ``inf`` when the basis spans the
        whole space.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    gap: float = np.inf

    def __post_init__(self):
        lam = linalg.as_vector(self.eigenvalues, name="eigenvalues")
        X = linalg.as_matrix(self.vectors, name="basis vectors")
        if X.shape[1] != lam.shape[0]:
            raise ShapeMismatch(f"{X.shape[1]} vectors but {lam.shape[0]} eigenvalues")
        if X.shape[1] > X.shape[0]:
            raise OutOfRange(f"{X.shape[1]} vectors in dimension {X.shape[0]}")
        sv = np.linalg.svd(X / np.linalg.norm(X, axis=0), compute_uv=False)
        if sv.min() <= INDEPENDENCE_TOL:
            raise RankDeficient(f"basis vectors are dependent (smallest singular value {sv.min():.3e})")
        lam.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "vectors", X)
        object.__setattr__(self, "gap", float(self.gap))

    @property
    def count(self):
        return self.vectors.shape[1]

    @property
    def dim(self):
        return self.vectors.shape[0]

    def rescaled(self, factors):
        """Return the same basis with column ``j`` multiplied by ``factors[j]``."""
        factors = linalg.as_vector(factors, self.count, name="factors")
        if np.any(factors == 0):
            raise ValueError("rescaling factors must be nonzero")
        return SlowBasis(self.eigenvalues, self.vectors * factors, self.gap)

    def embed(self, xi):
        """Ambient point ``sum_j xi_j x_j`` for slow coordinates ``xi``."""
        return self.vectors @ linalg.as_vector(xi, self.count, name="xi")

    def eigen_residual(self, L):
        """Largest relative residual ``||L x_j - lambda_j x_j|| / ||x_j||``."""
        X = self.vectors
        res = np.linalg.norm(L @ X - X * self.eigenvalues, axis=0) / np.linalg.norm(X, axis=0)
        return float(res.max())

    @classmethod
    def from_vectors(cls, system, vectors, tol=1e-9):
        """Build an eigenvector basis from any basis of an invariant subspace.

        The columns of ``vectors`` may be arbitrary (invertible) combinations
        of eigenvectors. The restriction of ``L`` to their span is
        diagonalized to recover eigenpairs.

        Raises
        ------
        NotInvariant
            If the span is not invariant under ``L`` within ``tol``.
        """
        Y = linalg.as_matrix(vectors, name="vectors")
        L = system.matrix
        if Y.shape[0] != system.dim:
            raise ShapeMismatch(f"vectors have dimension {Y.shape[0]}, system has {system.dim}")
        restriction, *_ = np.linalg.lstsq(Y, L @ Y, rcond=None)
        residual = np.linalg.norm(L @ Y - Y @ restriction)
        if residual > tol * max(1.0, linalg.opnorm(L)) * np.linalg.norm(Y):
            raise NotInvariant(f"span is not invariant (residual {residual:.3e})")
        dec = linalg.eig(restriction)
        if dec.vector_condition > DEFECT_COND:
            raise NearDefective("restricted operator is not diagonalizable", dec.vector_condition)
        return cls(dec.values, Y @ dec.right_vectors)


def analyze(system):
    """Eigendecompose ``system`` and record its stability.

    Raises
    ------
    NearDefective
        If the eigenvector condition number exceeds ``1e8``.
    NumericalFailure
        If the eigensolver fails.
    """
    dec = linalg.eig(system.matrix)
    if dec.vector_condition > DEFECT_COND:
        raise NearDefective(
            f"eigenvector condition {dec.vector_condition:.3e} exceeds {DEFECT_COND:g}",
            dec.vector_condition,
        )
    abscissa = float(dec.values[0].real)
    return SpectralData(system, dec, abscissa < -STABILITY_TOL, abscissa)


def assert_stable(data):
    """Raise :class:`Unstable` unless every eigenvalue has real part below ``-1e-10``."""
    if not data.spectral_abscissa < -STABILITY_TOL:
        raise Unstable(data.eigenvalues[0])


def slow_basis(data, n):
    """Select the ``n`` slowest eigenpairs.

    Complex-conjugate pairs present in the spectrum are kept together: if a
    selected eigenvalue has a conjugate partner among the unselected ones,
    :class:`ConjugatePairSplit` is raised.
    """
    assert_stable(data)
    d = data.system.dim
    if not 1 <= n <= d:
        raise OutOfRange(f"slow count {n} outside [1, {d}]")
    lam = data.eigenvalues
    selected, rest = lam[:n], lam[n:]
    for mu in selected:
        if abs(mu.imag) <= CONJUGATE_TOL * max(1.0, abs(mu)):
            continue
        partner = np.conj(mu)
        tol = CONJUGATE_TOL * max(1.0, abs(mu))
        if np.any(np.abs(rest - partner) <= tol) and not np.any(np.abs(selected - partner) <= tol):
            raise ConjugatePairSplit(f"eigenvalue {mu} selected without its conjugate")
    gap = float(lam[n - 1].real - lam[n].real) if n < d else np.inf
    return SlowBasis(selected, data.eigenvectors[:, :n], gap)


def non_normality(system):
    """Frobenius norm of ``[L, L^H]``; zero exactly for normal operators."""
    L = system.matrix
    return float(np.linalg.norm(linalg.commutator(L, linalg.adjoint(L))))
