"""Benchmark systems with closed-form reference data.

``shear2d``
    ``L = [[-1, gamma], [0, -alpha]]``; slow manifold is the first axis.
``grad3``
    Fourier-space linear three-moment (pressure, velocity, stress) system at
    wave number ``k`` with relaxation parameter ``epsilon``.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import BadParams, DegenerateSpectrum, Singular
from .spectral import LinearSystem

__all__ = [
    "ShearParams",
    "GradParams",
    "GradModeData",
    "GradReducedModel",
    "shear2d",
    "shear2d_dop_reference",
    "shear2d_riesz_reference",
    "grad3",
    "grad3_char_poly",
    "grad3_commutator_reference",
    "grad3_modes",
    "grad3_reduced",
    "grad3_slow_orthogonal_complement",
]


@dataclass(frozen=True)
class ShearParams:
    alpha: float = 5.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.alpha > 1:
            raise BadParams(f"alpha must exceed 1, got {self.alpha}")
        if not self.gamma >= 0:
            raise BadParams(f"gamma must be non-negative, got {self.gamma}")


@dataclass(frozen=True)
class GradParams:
    epsilon: float = 0.1
    k: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise BadParams(f"epsilon must be positive, got {self.epsilon}")
        if not self.k > 0:
            raise BadParams(f"k must be positive, got {self.k}")


def shear2d(p):
    a, g = p.alpha, p.gamma
    return LinearSystem(np.array([[-1.0, g], [0.0, -a]]), "shear2d", {"alpha": a, "gamma": g})


def shear2d_dop_reference(p):
    """Closed-form DOP of the shear system onto its slow axis."""
    return np.array([[1.0, p.gamma / (1.0 + p.alpha)], [0.0, 0.0]], dtype=np.complex128)


def shear2d_riesz_reference(p):
    """Closed-form spectral projection of the shear system onto its slow axis."""
    return np.array([[1.0, p.gamma / (p.alpha - 1.0)], [0.0, 0.0]], dtype=np.complex128)


def grad3(p):
    eps, k = p.epsilon, p.k
    L = np.array(
        [
            [0.0, -5j * k / 3, 0.0],
            [-1j * k, 0.0, -1j * k],
            [0.0, -4j * k / 3, -1.0 / eps],
        ]
    )
    return LinearSystem(L, "grad3", {"epsilon": eps, "k": k})


def grad3_char_poly(p):
    """Coefficients of ``det(L_k - lambda)``, highest power first."""
    eps, k = p.epsilon, p.k
    return np.array([-1.0, -1.0 / eps, -3.0 * k**2, -5.0 * k**2 / (3.0 * eps)])


def grad3_commutator_reference(p):
    """Analytic ``[L_k, L_k^H]``."""
    eps, k = p.epsilon, p.k
    return (1.0 / (9.0 * eps)) * np.array(
        [
            [16 * k**2 * eps, 0.0, 11 * k**2 * eps],
            [0.0, -23 * k**2 * eps, 21j * k],
            [11 * k**2 * eps, -21j * k, 7 * k**2 * eps],
        ]
    )


@dataclass(frozen=True)
class GradModeData:
    """Acoustic pair and diffusion mode of ``grad3``.

    Eigenvalues are indexed ``(lambda_ac, conj(lambda_ac), lambda_diff)``
    with ``Im(lambda_ac) > 0``; column ``j`` of ``Q`` is
    ``(-1 - a_j b_j, i b_j, 1)`` with ``a_j = lambda_j / k`` and
    ``b_j = 3 (1 + epsilon lambda_j) / (4 epsilon k)``.
    """

    lambda_ac: complex
    lambda_diff: float
    a: np.ndarray
    b: np.ndarray
    Q: np.ndarray

    @property
    def eigenvalues(self):
        return np.array([self.lambda_ac, np.conj(self.lambda_ac), self.lambda_diff])


def grad3_modes(p):
    """Roots of the characteristic cubic and the analytic eigenvectors.

    Roots come from the companion matrix of the monic cubic.

    Raises
    ------
    DegenerateSpectrum
        Unless the cubic has exactly one real root and one complex pair.
    """
    coeffs = grad3_char_poly(p)
    monic = coeffs[1:] / coeffs[0]
    companion = np.zeros((3, 3))
    companion[0, :] = -monic
    companion[1, 0] = companion[2, 1] = 1.0
    roots = linalg.eig(companion).values

    scale = max(1.0, float(np.abs(roots).max()))
    is_real = np.abs(roots.imag) <= 1e-9 * scale
    if is_real.sum() != 1:
        raise DegenerateSpectrum(f"expected one real root and a complex pair, got {roots}")
    pair = roots[~is_real]
    lam_ac = complex(pair[np.argmax(pair.imag)])
    if abs(pair[0] - np.conj(pair[1])) > 1e-9 * scale:
        raise DegenerateSpectrum(f"complex roots {pair} are not conjugate")
    lam_diff = float(roots[is_real][0].real)

    lam = np.array([lam_ac, np.conj(lam_ac), lam_diff])
    a = lam / p.k
    b = 3.0 * (1.0 + p.epsilon * lam) / (4.0 * p.epsilon * p.k)
    Q = np.vstack([-1.0 - a * b, 1j * b, np.ones(3)])
    return GradModeData(lam_ac, lam_diff, a, b, Q)


@dataclass(frozen=True)
class GradReducedModel:
    """Two-mode acoustic closure for ``(p, u)``.

    ``T = H diag(lambda_ac, conj(lambda_ac)) H^{-1}`` with ``H`` holding the
    pressure and velocity rows of the acoustic eigenvectors. Its diagonal is
    real and its off-diagonal is imaginary; ``T_real`` is the same operator in
    the variables ``(p, i u)`` and has real entries.
    """

    Hmat: np.ndarray
    Lambda: np.ndarray
    T: np.ndarray

    @property
    def T_real(self):
        S = np.diag([1.0, 1j])
        return S @ self.T @ np.diag([1.0, -1j])

    def propagate(self, pu0, times):
        """Reduced ``(p, u)`` trajectory, shape ``(len(times), 2)``."""
        lam = np.diag(self.Lambda)
        coeffs = linalg.solve(self.Hmat, pu0)
        return (np.exp(np.outer(times, lam)) * coeffs) @ self.Hmat.T


def grad3_reduced(p):
    modes = grad3_modes(p)
    H = modes.Q[:2, :2]
    Lambda = np.diag(modes.eigenvalues[:2])
    try:
        T = H @ Lambda @ linalg.solve(H, np.eye(2))
    except Singular as exc:
        raise Singular("acoustic coordinate change is degenerate") from exc
    return GradReducedModel(H, Lambda, T)


def grad3_slow_orthogonal_complement(p):
    """Unit vector orthogonal to both acoustic eigenvectors."""
    X = grad3_modes(p).Q[:, :2]
    _, _, vh = np.linalg.svd(X.conj().T)
    z = vh[-1].conj()
    return z / np.linalg.norm(z)
