"""Cumulative dynamical error between a full and a reduced trajectory.

For an initial condition ``x0`` and slow coordinates ``xi`` the error is::

    E(x0, xi) = 1/2 int_0^inf || exp(tL) x0 - exp(tL) sum_j xi_j x_j ||^2 dt

It splits into a slow self-interaction ``-1/2 Re(xi . G conj(xi))``, a cross
term ``Re(I(x0) . conj(xi))`` and the xi-independent energy of the full
trajectory. Two numerical oracles live here as well: direct quadrature of
the integral along an RK4 trajectory, and a derivative-free minimizer built
on that quadrature. Neither oracle uses the Gramian or the resolvent.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import NoConvergence, OutOfRange, ShapeMismatch
from .projection import Gramian, _check_eigenbasis, _check_stable, interaction_vector
from .spectral import analyze, assert_stable
from .trajectory import rk4_states

__all__ = [
    "ErrorBreakdown",
    "QuadratureConfig",
    "error_closed_form",
    "error_gradient",
    "quadrature_error",
    "brute_force_minimizer",
]


@dataclass(frozen=True)
class ErrorBreakdown:
    e_inter: float
    e_trans: float
    e_const: float

    @property
    def total(self):
        return self.e_inter + self.e_trans + self.e_const


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for :func:`quadrature_error`.

    The integral is truncated at
    ``T = horizon_factor * ln(rel_tol) / (2 * spectral_abscissa)`` and the
    composite Simpson rule is refined by doubling until two successive
    estimates agree to ``rel_tol``.
    """

    rel_tol: float = 1e-8
    horizon_factor: float = 1.5
    max_refinements: int = 20

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if not self.horizon_factor >= 1:
            raise ValueError("horizon_factor must be >= 1")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")


def _weighted_gram(lam, X):
    return (X.T @ X.conj()) / (lam[:, None] + np.conj(lam)[None, :])


def _quadratic(xi, G):
    return float(np.real(xi @ G @ np.conj(xi)))


def error_closed_form(system, basis, x0, xi, data=None):
    """Evaluate the dynamical error and its three parts without integration.

    ``e_const`` expands ``x0`` in the full eigenbasis and applies the same
    Gramian identity to all ``d`` modes.
    """
    if data is None:
        data = analyze(system)
    assert_stable(data)
    _check_eigenbasis(system, basis)
    x0 = linalg.as_vector(x0, system.dim, name="x0")
    xi = linalg.as_vector(xi, basis.count, name="xi")

    G = _weighted_gram(basis.eigenvalues, basis.vectors)
    I = interaction_vector(system, basis, x0)
    e_inter = -0.5 * _quadratic(xi, G)
    e_trans = float(np.real(I @ np.conj(xi)))

    V = data.eigenvectors
    coeffs = linalg.solve(V, x0)
    e_const = -0.5 * _quadratic(coeffs, _weighted_gram(data.eigenvalues, V))
    return ErrorBreakdown(e_inter, e_trans, e_const)


def error_gradient(G, I, xi):
    """Complex gradient ``dE/dRe(xi) + i dE/dIm(xi) = I - G^T xi``."""
    entries = G.entries if isinstance(G, Gramian) else np.asarray(G, dtype=np.complex128)
    I = np.asarray(I, dtype=np.complex128)
    xi = np.asarray(xi, dtype=np.complex128)
    n = entries.shape[0]
    if entries.shape != (n, n) or I.shape != (n,) or xi.shape != (n,):
        raise ShapeMismatch(f"shapes G{entries.shape}, I{I.shape}, xi{xi.shape} disagree")
    return I - entries.T @ xi


class _QuadratureGrid:
    """Full RK4 trajectory on ``intervals + 1`` uniform nodes over ``[0, T]``."""

    def __init__(self, L, x0, horizon, intervals):
        self.times = np.linspace(0.0, horizon, intervals + 1)
        self.h = horizon / intervals
        self.full = rk4_states(L, x0, self.h, intervals + 1)
        weights = np.full(intervals + 1, 2.0)
        weights[1::2] = 4.0
        weights[0] = weights[-1] = 1.0
        self.weights = weights * (self.h / 3.0)

    def reduced(self, basis, xi):
        return (np.exp(np.outer(self.times, basis.eigenvalues)) * xi) @ basis.vectors.T

    def value(self, basis, xi):
        diff = self.full - self.reduced(basis, xi)
        return 0.5 * float(self.weights @ np.sum(np.abs(diff) ** 2, axis=1))

    def scale(self, basis, xi):
        """Magnitude reference ``1/2 int (|x_full|^2 + |x_red|^2)``."""
        sq = np.sum(np.abs(self.full) ** 2, axis=1) + np.sum(np.abs(self.reduced(basis, xi)) ** 2, axis=1)
        return 0.5 * float(self.weights @ sq)


def _horizon(system, cfg):
    abscissa = _check_stable(system)
    return cfg.horizon_factor * math.log(cfg.rel_tol) / (2.0 * abscissa)


def _refine(system, basis, x0, xi, cfg, horizon):
    L = system.matrix
    intervals = 2 * max(32, math.ceil(horizon * linalg.opnorm(L) / 2))
    grid = _QuadratureGrid(L, x0, horizon, intervals)
    previous = grid.value(basis, xi)
    for _ in range(cfg.max_refinements):
        intervals *= 2
        grid = _QuadratureGrid(L, x0, horizon, intervals)
        current = grid.value(basis, xi)
        change = abs(current - previous)
        if change <= cfg.rel_tol * abs(current) or change <= 1e-14 * grid.scale(basis, xi):
            return current, grid
        previous = current
    raise NoConvergence(f"quadrature not converged after {cfg.max_refinements} refinements")


def quadrature_error(system, basis, x0, xi, cfg=None):
    """Dynamical error by direct numerical integration.

    The full trajectory comes from the fixed-step RK4 integrator and the
    reduced one from the slow modes; their squared distance is integrated
    with the composite Simpson rule.

    Raises
    ------
    NoConvergence
        If ``cfg.max_refinements`` doublings do not reach ``cfg.rel_tol``.
    """
    cfg = cfg or QuadratureConfig()
    x0 = linalg.as_vector(x0, system.dim, name="x0")
    xi = linalg.as_vector(xi, basis.count, name="xi")
    value, _ = _refine(system, basis, x0, xi, cfg, _horizon(system, cfg))
    return value


def brute_force_minimizer(system, basis, x0, cfg=None, grad_tol=1e-7, max_iter=10_000):
    """Minimize :func:`quadrature_error` over ``xi`` by gradient descent.

    Works on the ``2n`` real coordinates ``(Re xi, Im xi)`` with central
    finite-difference gradients, Barzilai-Borwein trial steps and Armijo
    backtracking. The quadrature grid is frozen after refinement so the
    objective is a fixed smooth function during the descent.
    """
    cfg = cfg or QuadratureConfig()
    n = basis.count
    if n > 3:
        raise OutOfRange(f"brute-force oracle supports n <= 3, got {n}")
    x0 = linalg.as_vector(x0, system.dim, name="x0")
    horizon = _horizon(system, cfg)
    zero = np.zeros(n, dtype=np.complex128)
    _, grid = _refine(system, basis, x0, zero, cfg, horizon)
    # One extra doubling as margin for xi far from the starting point.
    grid = _QuadratureGrid(system.matrix, x0, horizon, 2 * (len(grid.times) - 1))

    def objective(z):
        return grid.value(basis, z[:n] + 1j * z[n:])

    def gradient(z):
        h = 1e-6 * max(1.0, float(np.linalg.norm(z)))
        g = np.empty_like(z)
        for k in range(z.size):
            e = np.zeros_like(z)
            e[k] = h
            g[k] = (objective(z + e) - objective(z - e)) / (2 * h)
        return g

    z = np.zeros(2 * n)
    f, g = objective(z), gradient(z)
    step = 1.0 / max(1.0, float(np.linalg.norm(g)))
    for _ in range(max_iter):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            return z[:n] + 1j * z[n:]
        t = step
        while True:
            trial = z - t * g
            f_trial = objective(trial)
            if f_trial <= f - 1e-4 * t * gnorm**2:
                break
            t *= 0.5
            if t < 1e-20:
                raise NoConvergence(f"line search stalled at gradient norm {gnorm:.3e}")
        g_new = gradient(trial)
        s, y = trial - z, g_new - g
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else 2 * t
        z, f, g = trial, f_trial, g_new
    raise NoConvergence(f"no convergence in {max_iter} iterations (gradient norm {np.linalg.norm(g):.3e})")
