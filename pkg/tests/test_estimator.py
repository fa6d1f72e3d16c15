import doctest

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from slowproj import estimator, models
from slowproj.exceptions import ShapeMismatch, Unstable
from slowproj.projection import dop_matrix
from slowproj.spectral import analyze, slow_basis

SHEAR = np.array([[-1.0, 1.0], [0.0, -5.0]])


def test_docstring_examples():
    result = doctest.testmod(estimator, raise_on_error=False)
    assert result.attempted > 0 and result.failed == 0


def test_params_round_trip():
    est = estimator.SlowManifoldProjector(SHEAR, n_slow=1, method="riesz")
    assert est.get_params() == {"operator": SHEAR, "n_slow": 1, "method": "riesz", "split_complex": False}
    est.set_params(method="orth")
    assert clone(est).method == "orth"


@pytest.mark.parametrize("method,expected", [("dop", 0.6), ("orth", 0.4), ("riesz", 0.7)])
def test_shear_coordinates(method, expected):
    est = estimator.SlowManifoldProjector(SHEAR, method=method).fit()
    xi = est.transform([[0.4, 1.2]])
    assert xi.shape == (1, 1)
    # coordinates refer to the unit eigenvector, which is (1, 0) up to sign
    assert xi[0, 0] * est.components_[0, 0] == pytest.approx(expected)
    np.testing.assert_allclose(est.project([[0.4, 1.2]]), [[expected, 0]], atol=1e-14)
    np.testing.assert_allclose(est.inverse_transform(xi), [[expected, 0]], atol=1e-14)


def test_attributes_match_functional_api(grad):
    p, system, data, basis = grad
    est = estimator.SlowManifoldProjector(system, n_slow=2).fit()
    np.testing.assert_allclose(est.projection_.matrix, dop_matrix(system, basis).matrix)
    assert est.n_features_in_ == 3
    assert est.components_.shape == (2, 3)
    np.testing.assert_allclose(est.eigenvalues_, basis.eigenvalues)
    B = est.dual_basis().biorthogonality(est.basis_)
    assert np.abs(B - np.eye(2)).max() <= 1e-10
    assert est.non_normality() > 0


def test_predict_follows_slow_dynamics():
    est = estimator.SlowManifoldProjector(SHEAR).fit()
    np.testing.assert_allclose(est.predict([[0.4, 1.2]], t=2.0), [[0.6 * np.exp(-2.0), 0]], atol=1e-14)


def test_split_complex_round_trip():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    est = estimator.SlowManifoldProjector(models.grad3(models.GradParams()).matrix, n_slow=2, split_complex=True)
    Z = est.fit(X).transform(X)
    assert Z.shape == (5, 4) and Z.dtype == np.float64
    np.testing.assert_allclose(est.inverse_transform(Z), est.project(X), atol=1e-12)


def test_real_pipeline():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((20, 2))
    pipe = make_pipeline(estimator.SlowManifoldProjector(SHEAR, split_complex=True), StandardScaler())
    assert pipe.fit_transform(X).shape == (20, 2)


def test_input_validation():
    with pytest.raises(NotFittedError):
        estimator.SlowManifoldProjector(SHEAR).transform([[1, 2]])
    with pytest.raises(ValueError):
        estimator.SlowManifoldProjector().fit()
    with pytest.raises(ValueError):
        estimator.SlowManifoldProjector(SHEAR, n_slow=3).fit()
    with pytest.raises(TypeError):
        estimator.SlowManifoldProjector(SHEAR, n_slow=1.5).fit()
    with pytest.raises(ValueError):
        estimator.SlowManifoldProjector(SHEAR, method="bogus").fit()
    with pytest.raises(Unstable):
        estimator.SlowManifoldProjector(np.diag([0.1, -1.0])).fit()
    est = estimator.SlowManifoldProjector(SHEAR).fit()
    with pytest.raises(ShapeMismatch):
        est.transform([[1, 2, 3]])
    with pytest.raises(ValueError):
        est.transform([[np.nan, 1]])
    with pytest.raises(ValueError):
        estimator.SlowManifoldProjector(SHEAR, method="orth").fit().dual_basis()
