"""Dynamically optimal projections onto slow eigenspaces of stable linear systems."""

from .error_functional import (
    ErrorBreakdown,
    QuadratureConfig,
    brute_force_minimizer,
    error_closed_form,
    error_gradient,
    quadrature_error,
)
from .estimator import SlowManifoldProjector
from .exceptions import IllConditionedWarning, SlowProjError
from .models import GradParams, ShearParams, grad3, grad3_modes, grad3_reduced, shear2d
from .projection import (
    DualBasis,
    Gramian,
    Method,
    ProjectionOperator,
    dop_dual_set,
    dop_matrix,
    gramian,
    interaction_vector,
    minimizer,
    orthogonal_projection,
    project,
    riesz_projection,
)
from .spectral import LinearSystem, SlowBasis, SpectralData, analyze, assert_stable, slow_basis
from .trajectory import TimeGrid, Trajectory, deviation, propagate_full, propagate_full_rk, propagate_reduced

__version__ = "0.1.0"

__all__ = [
    "DualBasis",
    "ErrorBreakdown",
    "GradParams",
    "Gramian",
    "IllConditionedWarning",
    "LinearSystem",
    "Method",
    "ProjectionOperator",
    "QuadratureConfig",
    "ShearParams",
    "SlowBasis",
    "SlowManifoldProjector",
    "SlowProjError",
    "SpectralData",
    "TimeGrid",
    "Trajectory",
    "analyze",
    "assert_stable",
    "brute_force_minimizer",
    "deviation",
    "dop_dual_set",
    "dop_matrix",
    "error_closed_form",
    "error_gradient",
    "grad3",
    "grad3_modes",
    "grad3_reduced",
    "gramian",
    "interaction_vector",
    "minimizer",
    "orthogonal_projection",
    "project",
    "propagate_full",
    "propagate_full_rk",
    "propagate_reduced",
    "quadrature_error",
    "riesz_projection",
    "shear2d",
    "slow_basis",
]
