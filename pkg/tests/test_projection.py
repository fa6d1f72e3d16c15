import warnings

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from slowproj import linalg, models
from slowproj.exceptions import IllConditionedWarning, NotInvariant, Unstable
from slowproj.projection import (
    Method,
    dop_dual_set,
    dop_matrix,
    gramian,
    interaction_vector,
    minimizer,
    orthogonal_projection,
    project,
    riesz_projection,
)
from slowproj.spectral import LinearSystem, SlowBasis, analyze, slow_basis
from slowproj.validation import random_case, random_normal_system

from conftest import complex_normal


def gramian_by_integration(basis):
    """Independent oracle: G_ij = -int_0^inf <x_i e^{lam_i t}, x_j e^{lam_j t}> dt."""
    X, lam = basis.vectors, basis.eigenvalues

    def integrand(t):
        modes = X * np.exp(lam * t)
        return -(modes.T @ modes.conj()).ravel()

    values, _ = scipy.integrate.quad_vec(integrand, 0, np.inf, epsabs=1e-13, epsrel=1e-12)
    return values.reshape(basis.count, basis.count)


def test_shear_gramian(shear):
    G = gramian(shear[2])
    assert abs(G.entries[0, 0] + 0.5) <= 1e-14


def test_orthonormal_eigenvector_gramian():
    basis = slow_basis(analyze(LinearSystem(np.diag([-2.0, -3.0]))), 1)
    assert gramian(basis).entries[0, 0] == pytest.approx(-0.25, abs=1e-15)


def test_grad_gramian_matches_integral(grad):
    basis = grad[3]
    G = gramian(basis)
    np.testing.assert_allclose(G.entries, gramian_by_integration(basis), atol=1e-10)
    assert G.hermitian_defect() <= 1e-14
    assert np.all(G.eigenvalues() <= 1e-14)


@given(st.integers(0, 2**32 - 1))
def test_gramian_hermitian_negative_semidefinite(seed):
    _, data, n = random_case(np.random.default_rng(seed))
    G = gramian(slow_basis(data, n))
    assert G.hermitian_defect() <= 1e-12 * np.abs(G.entries).max()
    assert G.eigenvalues().max() <= 1e-12 * np.abs(G.entries).max()


def test_gramian_warns_when_ill_conditioned():
    eps = 1e-7
    L = np.array([[-1.0, 1.0], [0.0, -1.0 - eps]])
    basis = slow_basis(analyze(LinearSystem(L)), 2)
    with pytest.warns(IllConditionedWarning):
        gramian(basis)


def test_interaction_vector_normal_example():
    system = LinearSystem(np.diag([-1.0, -2.0]))
    basis = SlowBasis(np.array([-1.0]), np.array([[1.0], [0.0]]))
    np.testing.assert_allclose(interaction_vector(system, basis, [2, 0]), [-1])
    np.testing.assert_array_equal(interaction_vector(system, basis, [0, 0]), [0])


def test_interaction_vector_of_basis_vector_is_gramian_row(grad):
    _, system, _, basis = grad
    G = gramian(basis).entries
    for k in range(2):
        I = interaction_vector(system, basis, basis.vectors[:, k])
        np.testing.assert_allclose(I, G[k, :], atol=1e-12)


def test_interaction_vector_requires_eigenbasis(shear):
    bad = SlowBasis(np.array([-1.0]), np.array([[1.0], [1.0]]))
    with pytest.raises(NotInvariant):
        interaction_vector(shear[0], bad, [1, 0])


def test_minimizer_examples(shear):
    assert minimizer(np.array([[-0.5]]), np.array([-1.0]))[0] == pytest.approx(2.0)
    system, _, basis = shear
    xi = minimizer(gramian(basis), interaction_vector(system, basis, [0.4, 1.2]))
    assert xi[0] == pytest.approx(0.6, abs=1e-14)


@given(st.integers(0, 2**32 - 1))
def test_minimizer_recovers_on_manifold_coordinates(seed):
    rng = np.random.default_rng(seed)
    system, data, n = random_case(rng)
    basis = slow_basis(data, n)
    xi0 = complex_normal(rng, n)
    xi = minimizer(gramian(basis), interaction_vector(system, basis, basis.embed(xi0)))
    np.testing.assert_allclose(xi, xi0, atol=1e-9 * max(1.0, np.abs(xi0).max()))


def test_shear_dop_closed_form():
    for alpha, gamma in [(5, 1), (3, 2), (2, 0), (7.5, 0.3)]:
        p = models.ShearParams(alpha, gamma)
        system = models.shear2d(p)
        P = dop_matrix(system, slow_basis(analyze(system), 1)).matrix
        np.testing.assert_allclose(P, models.shear2d_dop_reference(p), atol=1e-12)


def test_shear_normal_case_is_orthogonal():
    system = models.shear2d(models.ShearParams(2, 0))
    np.testing.assert_allclose(dop_matrix(system, slow_basis(analyze(system), 1)).matrix, np.diag([1, 0]), atol=1e-15)


def test_normal_three_dimensional():
    rng = np.random.default_rng(11)
    U, _ = np.linalg.qr(complex_normal(rng, (3, 3)))
    system = LinearSystem(U @ np.diag([-1.0, -2.0, -3.0]) @ U.conj().T)
    basis = slow_basis(analyze(system), 2)
    diff = dop_matrix(system, basis).matrix - orthogonal_projection(basis).matrix
    assert np.linalg.norm(diff) <= 1e-10


def test_orthogonal_examples(shear):
    e = np.eye(3)
    P = orthogonal_projection(SlowBasis(np.array([-1.0, -2.0]), e[:, :2])).matrix
    np.testing.assert_allclose(P, np.diag([1, 1, 0]))
    P = orthogonal_projection(shear[2])
    np.testing.assert_allclose(P.matrix, np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(P([0.4, 1.2]), [0.4, 0], atol=1e-15)


def test_shear_riesz_and_distances(shear):
    system, data, basis = shear
    p = models.ShearParams(5, 1)
    R = riesz_projection(data, 1).matrix
    np.testing.assert_allclose(R, models.shear2d_riesz_reference(p), atol=1e-12)
    D = dop_matrix(system, basis)
    O = orthogonal_projection(basis).matrix
    entries = {D.matrix[0, 1].real, R[0, 1].real, O[0, 1].real}
    assert len(entries) == 3
    assert abs(np.linalg.norm(D.matrix - R, 2) - 1 / 12) <= 1e-12
    assert D.commutator_norm(system.matrix) > 1e-2


def test_riesz_rejects_unstable():
    with pytest.raises(Unstable):
        riesz_projection(analyze(LinearSystem(np.diag([0.5, -1.0]))), 1)


def test_dual_set_shear(shear):
    system, _, basis = shear
    dual = dop_dual_set(system, basis)
    theta = dual.vectors[:, 0]
    assert abs(dual.biorthogonality(basis)[0, 0] - 1) <= 1e-14
    # theta is proportional to (1, 1/6), the row functional of the closed form
    assert abs(theta[1] / theta[0] - 1 / 6) <= 1e-14


def test_dual_set_grad(grad):
    _, system, _, basis = grad
    B = dop_dual_set(system, basis).biorthogonality(basis)
    assert np.abs(B - np.eye(2)).max() <= 1e-10


def test_dual_set_normal_is_basis():
    rng = np.random.default_rng(2)
    system = random_normal_system(rng, 4)
    basis = slow_basis(analyze(system), 2)
    dual = dop_dual_set(system, basis)
    np.testing.assert_allclose(dual.vectors, basis.vectors, atol=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_projection_laws(seed):
    rng = np.random.default_rng(seed)
    system, data, n = random_case(rng)
    basis = slow_basis(data, n)
    X = basis.vectors
    for method in Method:
        P = project(data, n, method)
        assert P.idempotence_defect() <= 1e-9
        assert P.fixed_point_defect() <= 1e-10
        assert P.range_defect() <= 1e-9
    D = dop_matrix(system, basis)
    x = complex_normal(rng, system.dim)
    # kernel: resolvent-weighted overlaps with every slow mode vanish
    k = x - D(x)
    for lam_j, x_j in zip(basis.eigenvalues, X.T):
        r = linalg.solve(system.matrix + np.conj(lam_j) * np.eye(system.dim), k)
        assert abs(linalg.inner(r, x_j)) <= 1e-9 * max(1.0, np.linalg.norm(x))
    dual = dop_dual_set(system, basis)
    np.testing.assert_allclose(dual.apply(basis, x), D(x), atol=1e-10 * max(1.0, np.linalg.norm(x)))


@given(st.integers(0, 2**32 - 1))
def test_riesz_commutes(seed):
    system, data, n = random_case(np.random.default_rng(seed))
    P = riesz_projection(data, n)
    assert P.commutator_norm(system.matrix) <= 1e-9 * linalg.opnorm(system.matrix)


@given(st.integers(0, 2**32 - 1))
def test_normal_collapse(seed):
    system, data, n = random_case(np.random.default_rng(seed), kind="normal")
    basis = slow_basis(data, n)
    D = dop_matrix(system, basis).matrix
    assert np.linalg.norm(D - orthogonal_projection(basis).matrix) <= 1e-9
    assert np.linalg.norm(D - riesz_projection(data, n).matrix) <= 1e-9


@given(st.integers(0, 2**32 - 1))
def test_basis_invariance(seed):
    rng = np.random.default_rng(seed)
    system, data, n = random_case(rng)
    basis = slow_basis(data, n)
    P = dop_matrix(system, basis).matrix
    scaled = basis.rescaled(complex_normal(rng, n))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        assert np.linalg.norm(dop_matrix(system, scaled).matrix - P) <= 1e-9
        mixed = SlowBasis.from_vectors(system, basis.vectors @ complex_normal(rng, (n, n)))
        assert np.linalg.norm(dop_matrix(system, mixed).matrix - P) <= 1e-9
