"""Projections onto a slow eigenspace: dynamically optimal, orthogonal, Riesz.

The dynamically optimal projection (DOP) sends an initial condition ``x`` to
the point on the slow subspace whose trajectory stays closest to the full
trajectory in the time-integrated mean-square sense. With slow eigenpairs
``(lambda_j, x_j)`` it reads::

    P x = sum_ij x_i [(G^T)^{-1}]_ij <(L + conj(lambda_j))^{-1} x, x_j>

where ``G_ij = <x_i, x_j> / (lambda_i + conj(lambda_j))`` is the spectrally
weighted Gramian.
"""

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import (
    GapTooSmall,
    IllConditionedWarning,
    NearDefective,
    NotInvariant,
    ShapeMismatch,
    Singular,
    Unstable,
)
from .spectral import DEFECT_COND, STABILITY_TOL, SlowBasis, slow_basis

__all__ = [
    "Method",
    "Gramian",
    "ProjectionOperator",
    "DualBasis",
    "gramian",
    "interaction_vector",
    "interaction_matrix",
    "minimizer",
    "dop_matrix",
    "orthogonal_projection",
    "riesz_projection",
    "dop_dual_set",
    "project",
]

GRAMIAN_COND_WARN = 1e10
EIGENBASIS_TOL = 1e-8
GAP_TOL = 1e-10


class Method(str, enum.Enum):
    DOP = "dop"
    ORTHOGONAL = "orth"
    RIESZ = "riesz"


@dataclass(frozen=True)
class Gramian:
    """Spectrally weighted Gramian of a slow basis.

    Hermitian and negative semi-definite for any stable basis.
    """

    entries: np.ndarray
    condition: float

    @property
    def n(self):
        return self.entries.shape[0]

    def hermitian_defect(self):
        G = self.entries
        return float(np.linalg.norm(G - G.conj().T))

    def eigenvalues(self):
        return np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2)


@dataclass(frozen=True)
class ProjectionOperator:
    """An explicit ``d x d`` projection onto the span of ``basis``.

    ``matrix == basis.vectors @ coefficients``; ``coefficients`` (shape
    ``(n, d)``) maps a state to its slow coordinates.
    """

    method: Method
    coefficients: np.ndarray
    basis: SlowBasis

    @property
    def matrix(self):
        return self.basis.vectors @ self.coefficients

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=np.complex128)

    def coordinates(self, x):
        """Slow coordinates ``xi`` with ``P x = sum_j xi_j x_j``."""
        return self.coefficients @ np.asarray(x, dtype=np.complex128)

    def idempotence_defect(self):
        P = self.matrix
        return float(np.linalg.norm(P @ P - P))

    def range_defect(self):
        """``||(I - Q) P||`` with ``Q`` the orthogonal projector onto the basis span."""
        Q, _ = np.linalg.qr(self.basis.vectors)
        P = self.matrix
        return linalg.opnorm(P - Q @ (Q.conj().T @ P))

    def fixed_point_defect(self):
        X = self.basis.vectors / np.linalg.norm(self.basis.vectors, axis=0)
        return float(np.abs(self.matrix @ X - X).max())

    def commutator_norm(self, L):
        return float(np.linalg.norm(linalg.commutator(self.matrix, L)))


@dataclass(frozen=True)
class DualBasis:
    """Vectors ``theta_i`` with ``P x = sum_i x_i <x, theta_i>``."""

    vectors: np.ndarray

    def biorthogonality(self, basis):
        """Matrix ``B[k, i] = <x_k, theta_i>``; the identity for a valid dual set."""
        return basis.vectors.T @ self.vectors.conj()

    def apply(self, basis, x):
        return basis.vectors @ (self.vectors.conj().T @ np.asarray(x, dtype=np.complex128))


def _check_stable(system):
    values = np.linalg.eigvals(system.matrix)
    worst = values[np.argmax(values.real)]
    if not worst.real < -STABILITY_TOL:
        raise Unstable(worst)
    return float(worst.real)


def _check_eigenbasis(system, basis):
    if basis.dim != system.dim:
        raise ShapeMismatch(f"basis dimension {basis.dim} differs from system dimension {system.dim}")
    res = basis.eigen_residual(system.matrix)
    if res > EIGENBASIS_TOL * max(1.0, linalg.opnorm(system.matrix)):
        raise NotInvariant(f"basis columns are not eigenvectors (residual {res:.3e})")


def gramian(basis):
    """Spectrally weighted Gramian ``G_ij = <x_i, x_j> / (lambda_i + conj(lambda_j))``.

    Emits :class:`IllConditionedWarning` when ``cond(G) > 1e10``.
    """
    X, lam = basis.vectors, basis.eigenvalues
    denom = lam[:, None] + np.conj(lam)[None, :]
    if np.any(np.abs(denom) == 0):
        raise Unstable(lam[np.argmax(lam.real)])
    G = (X.T @ X.conj()) / denom
    cond = float(np.linalg.cond(G))
    if not cond <= GRAMIAN_COND_WARN:
        warnings.warn(f"Gramian condition number {cond:.3e}", IllConditionedWarning, stacklevel=2)
    return Gramian(G, cond)


def interaction_matrix(system, basis, X0):
    """Interaction vectors for every column of ``X0``.

    Returns an ``(n, m)`` array whose column ``c`` is the interaction vector
    of ``X0[:, c]``; row ``j`` equals ``x_j^H (L + conj(lambda_j))^{-1} X0``.
    """
    L = system.matrix
    d = system.dim
    X0 = np.asarray(X0, dtype=np.complex128)
    if X0.shape[0] != d:
        raise ShapeMismatch(f"initial data has dimension {X0.shape[0]}, expected {d}")
    identity = np.eye(d)
    rows = []
    for lam_j, x_j in zip(basis.eigenvalues, basis.vectors.T):
        resolved = linalg.solve(L + np.conj(lam_j) * identity, X0)
        rows.append(x_j.conj() @ resolved)
    return np.array(rows)


def interaction_vector(system, basis, x0):
    """``I_j = <(L + conj(lambda_j))^{-1} x0, x_j>`` for each slow mode."""
    x0 = linalg.as_vector(x0, system.dim, name="x0")
    _check_eigenbasis(system, basis)
    return interaction_matrix(system, basis, x0[:, None])[:, 0]


def minimizer(G, I):
    """Slow coordinates minimizing the dynamical error: solve ``G^T xi = I``."""
    if not isinstance(G, Gramian):
        G = Gramian(linalg.as_matrix(G, square=True), float(np.linalg.cond(G)))
    I = np.asarray(I, dtype=np.complex128)
    if I.shape[0] != G.n:
        raise ShapeMismatch(f"interaction vector has length {I.shape[0]}, Gramian is {G.n}x{G.n}")
    xi = linalg.LUSolver(G.entries).solve(I, trans=1)
    residual = np.linalg.norm(G.entries.T @ xi - I)
    if residual > 1e-10 * max(np.linalg.norm(I), 1e-300) * max(1.0, G.condition):
        raise Singular(f"minimizer residual {residual:.3e} too large")
    return xi


def dop_matrix(system, basis):
    """Dynamically optimal projection as an explicit ``d x d`` matrix.

    Column ``c`` is the image of the ``c``-th standard basis vector.
    """
    _check_stable(system)
    _check_eigenbasis(system, basis)
    G = gramian(basis)
    coeffs = interaction_matrix(system, basis, np.eye(system.dim))
    xi = linalg.LUSolver(G.entries).solve(coeffs, trans=1)
    return ProjectionOperator(Method.DOP, xi, basis)


def orthogonal_projection(basis):
    """Orthogonal projector ``X (X^H X)^{-1} X^H`` onto the basis span."""
    X = basis.vectors
    gram = X.conj().T @ X
    return ProjectionOperator(Method.ORTHOGONAL, linalg.solve(gram, X.conj().T), basis)


def riesz_projection(data, n):
    """Spectral (Riesz) projection onto the ``n`` slowest modes.

    Built from eigenvectors ``theta_j`` of ``L^H`` with eigenvalues
    ``conj(lambda_j)``, normalized so that ``<x_i, theta_j> = delta_ij``.
    The result commutes with ``L``.
    """
    basis = slow_basis(data, n)
    if basis.gap <= GAP_TOL:
        raise GapTooSmall(f"spectral gap {basis.gap:.3e} at n={n}")
    L = data.system.matrix
    left = linalg.eig(linalg.adjoint(L))
    if left.vector_condition > DEFECT_COND:
        raise NearDefective("adjoint eigenvectors are ill-conditioned", left.vector_condition)
    # the spectrum of L^H is the conjugate spectrum; its n slowest modes pair with the slow set
    theta = left.right_vectors[:, :n]
    distance = np.abs(np.conj(left.values[:n])[:, None] - basis.eigenvalues[None, :])
    mismatch = max(distance.min(axis=0).max(), distance.min(axis=1).max())
    if mismatch > 1e-6 * max(1.0, np.abs(basis.eigenvalues).max()):
        raise GapTooSmall("adjoint spectrum does not separate at the same cut")
    X = basis.vectors
    B = X.T @ theta.conj()
    try:
        theta = theta @ np.conj(linalg.solve(B, np.eye(n)))
    except Singular as exc:
        raise NearDefective("left and right eigenvectors are not biorthogonalizable") from exc
    return ProjectionOperator(Method.RIESZ, theta.conj().T, basis)


def dop_dual_set(system, basis, G=None):
    """Dual vectors representing the DOP, ``P x = sum_i x_i <x, theta_i>``.

    ``theta_i = sum_j [G^{-1}]_ij (L^H + lambda_j)^{-1} x_j``; the coefficient
    is the complex conjugate of ``[(G^T)^{-1}]_ij`` because the inner product
    is antilinear in its second slot.
    """
    _check_stable(system)
    _check_eigenbasis(system, basis)
    if G is None:
        G = gramian(basis)
    LH = linalg.adjoint(system.matrix)
    identity = np.eye(system.dim)
    Y = np.column_stack(
        [linalg.solve(LH + lam_j * identity, x_j) for lam_j, x_j in zip(basis.eigenvalues, basis.vectors.T)]
    )
    theta = linalg.solve(G.entries, Y.T).T
    return DualBasis(theta)


def project(data, n, method="dop"):
    """Convenience wrapper returning the projection of the given kind."""
    method = Method(method)
    if method is Method.RIESZ:
        return riesz_projection(data, n)
    basis = slow_basis(data, n)
    if method is Method.ORTHOGONAL:
        return orthogonal_projection(basis)
    return dop_matrix(data.system, basis)
