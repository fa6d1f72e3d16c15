"""scikit-learn compatible front end for slow-manifold projections."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_operator, check_slow_count, check_states, merge_complex, split_complex
from .projection import Method, dop_dual_set, gramian, project
from .spectral import analyze, assert_stable, non_normality

__all__ = ["SlowManifoldProjector"]


class SlowManifoldProjector(TransformerMixin, BaseEstimator):
    """Project initial conditions onto the slow eigenspace of a stable operator.

    The operator is a hyper-parameter; ``fit`` performs the spectral analysis
    and builds the projection, ``transform`` maps states (rows of ``X``) to
    slow coordinates.

    Parameters
    ----------
    operator : array-like of shape (d, d) or LinearSystem
        Generator ``L`` of ``dx/dt = L x``. All eigenvalues must have
        negative real part.
    n_slow : int, default=1
        Number of slow modes kept.
    method : {"dop", "orth", "riesz"}, default="dop"
        Dynamically optimal, orthogonal or spectral (Riesz) projection.
    split_complex : bool, default=False
        If True, ``transform`` returns ``[Re xi, Im xi]`` as a real array of
        shape ``(n_samples, 2 * n_slow)`` so downstream real-valued
        estimators can consume it.

    Attributes
    ----------
    system_ : LinearSystem
    spectral_data_ : SpectralData
    basis_ : SlowBasis
    projection_ : ProjectionOperator
    gramian_ : Gramian
        Spectrally weighted Gramian of the slow basis (for every method).
    eigenvalues_ : ndarray of shape (n_slow,)
    components_ : ndarray of shape (n_slow, d)
        Slow eigenvectors as rows.
    n_features_in_ : int

    Examples
    --------
    >>> import numpy as np
    >>> proj = SlowManifoldProjector(np.array([[-1.0, 1.0], [0.0, -5.0]])).fit()
    >>> proj.project([[0.4, 1.2]]).real.round(12)
    array([[0.6, 0. ]])
    """

    def __init__(self, operator=None, n_slow=1, method="dop", split_complex=False):
        self.operator = operator
        self.n_slow = n_slow
        self.method = method
        self.split_complex = split_complex

    def fit(self, X=None, y=None):
        """Analyze the operator and build the projection.

        ``X``, if given, is only checked for a matching number of features.
        """
        system = check_operator(self.operator)
        n = check_slow_count(self.n_slow, system.dim)
        method = Method(self.method)
        if X is not None:
            check_states(X, system.dim)

        data = analyze(system)
        assert_stable(data)
        proj = project(data, n, method)

        self.system_ = system
        self.spectral_data_ = data
        self.projection_ = proj
        self.basis_ = proj.basis
        self.gramian_ = gramian(proj.basis)
        self.eigenvalues_ = proj.basis.eigenvalues
        self.components_ = proj.basis.vectors.T
        self.n_features_in_ = system.dim
        return self

    def transform(self, X):
        """Slow coordinates of each row of ``X``."""
        check_is_fitted(self, "projection_")
        X = check_states(X, self.n_features_in_)
        xi = X @ self.projection_.coefficients.T
        return split_complex(xi) if self.split_complex else xi

    def inverse_transform(self, Xi):
        """Ambient points ``sum_j xi_j x_j`` for rows of slow coordinates."""
        check_is_fitted(self, "projection_")
        xi = merge_complex(np.atleast_2d(Xi), self.basis_.count)
        return xi @ self.basis_.vectors.T

    def project(self, X):
        """Projected states ``P x`` for each row of ``X``."""
        check_is_fitted(self, "projection_")
        X = check_states(X, self.n_features_in_)
        return X @ self.projection_.matrix.T

    def predict(self, X, t=0.0):
        """Reduced-model states at time ``t`` started from the projection of ``X``."""
        check_is_fitted(self, "projection_")
        X = check_states(X, self.n_features_in_)
        xi = X @ self.projection_.coefficients.T
        return (xi * np.exp(self.eigenvalues_ * t)) @ self.basis_.vectors.T

    def dual_basis(self):
        """Dual vectors of the DOP (only for ``method="dop"``)."""
        check_is_fitted(self, "projection_")
        if Method(self.method) is not Method.DOP:
            raise ValueError("dual_basis is defined for method='dop'")
        return dop_dual_set(self.system_, self.basis_, self.gramian_)

    def non_normality(self):
        check_is_fitted(self, "system_")
        return non_normality(self.system_)
