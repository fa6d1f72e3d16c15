"""Full and reduced solution trajectories on uniform time grids."""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .exceptions import GridMismatch, NearDefective, ShapeMismatch, StepUnderflow
from .spectral import DEFECT_COND

__all__ = [
    "Source",
    "TimeGrid",
    "Trajectory",
    "Deviation",
    "default_horizon",
    "rk4_step_matrix",
    "rk4_states",
    "propagate_full",
    "propagate_full_rk",
    "propagate_reduced",
    "deviation",
]

# Largest h * ||L|| used by the RK4 integrator.
RK4_STEP_SCALE = 0.01
MAX_SUBSTEPS = 2**40


class Source(str, enum.Enum):
    FULL_SPECTRAL = "full_spectral"
    FULL_RK = "full_rk"
    REDUCED = "reduced"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``0 = t_0 < ... < t_{samples-1} = t_end``."""

    t_end: float
    samples: int

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be positive and finite, got {self.t_end}")
        if int(self.samples) != self.samples or self.samples < 2:
            raise ValueError(f"samples must be an integer >= 2, got {self.samples}")
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "samples", int(self.samples))

    @property
    def t0(self):
        return 0.0

    @property
    def spacing(self):
        return self.t_end / (self.samples - 1)

    @property
    def times(self):
        return np.linspace(0.0, self.t_end, self.samples)


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray  # (samples, d)
    source: Source

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.shape[0] != self.grid.samples:
            raise ShapeMismatch(f"states shape {self.states.shape} does not match {self.grid.samples} samples")

    @property
    def dim(self):
        return self.states.shape[1]

    def component(self, i):
        """Trajectory of the single state component ``i``."""
        return Trajectory(self.grid, self.states[:, [i]], self.source)


class Deviation(NamedTuple):
    l2_time: float
    sup: float


def default_horizon(abscissa, tol=1e-8):
    """Time after which ``exp(2 * abscissa * t)`` drops below ``tol``."""
    if not abscissa < 0:
        raise ValueError("default horizon requires a negative spectral abscissa")
    return math.log(tol) / (2.0 * abscissa)


def propagate_full(data, x0, grid):
    """Exact solution ``V diag(exp(lambda t)) V^{-1} x0`` sampled on ``grid``."""
    dec = data.decomposition
    if dec.vector_condition > DEFECT_COND:
        raise NearDefective("eigenvector matrix too ill-conditioned", dec.vector_condition)
    x0 = linalg.as_vector(x0, dec.dim, name="x0")
    coeffs = linalg.solve(dec.right_vectors, x0)
    t = grid.times
    states = (np.exp(np.outer(t, dec.values)) * coeffs) @ dec.right_vectors.T
    states[0] = x0
    return Trajectory(grid, states, Source.FULL_SPECTRAL)


def rk4_step_matrix(L, h):
    """One classical RK4 step for ``dx/dt = L x`` applied to every basis vector."""
    identity = np.eye(L.shape[0], dtype=np.complex128)
    k1 = L @ identity
    k2 = L @ (identity + 0.5 * h * k1)
    k3 = L @ (identity + 0.5 * h * k2)
    k4 = L @ (identity + h * k3)
    return identity + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_states(L, x0, dt, count):
    """RK4 solution at ``count`` nodes spaced ``dt`` apart, starting at ``x0``.

    Each node interval is split into substeps with ``h * ||L|| <= 0.01``. The
    node-to-node map is formed once and applied by repeated doubling.
    """
    L = np.asarray(L, dtype=np.complex128)
    norm = linalg.opnorm(L)
    substeps = max(1, math.ceil(dt * norm / RK4_STEP_SCALE))
    if substeps > MAX_SUBSTEPS:
        raise StepUnderflow(f"{substeps} substeps per interval required")
    step = np.linalg.matrix_power(rk4_step_matrix(L, dt / substeps), substeps)
    states = np.empty((count, L.shape[0]), dtype=np.complex128)
    states[0] = x0
    filled, power = 1, step
    while filled < count:
        take = min(filled, count - filled)
        states[filled:filled + take] = states[:take] @ power.T
        filled += take
        if filled < count:
            power = power @ power
    return states


def propagate_full_rk(system, x0, grid):
    """Fixed-step RK4 solution; independent of the eigendecomposition."""
    x0 = linalg.as_vector(x0, system.dim, name="x0")
    states = rk4_states(system.matrix, x0, grid.spacing, grid.samples)
    return Trajectory(grid, states, Source.FULL_RK)


def propagate_reduced(basis, xi0, grid):
    """Slow-manifold solution ``sum_j xi0_j exp(lambda_j t) x_j``."""
    xi0 = np.asarray(xi0, dtype=np.complex128)
    if xi0.shape != (basis.count,):
        raise ShapeMismatch(f"xi0 has shape {xi0.shape}, expected ({basis.count},)")
    modes = np.exp(np.outer(grid.times, basis.eigenvalues)) * xi0
    return Trajectory(grid, modes @ basis.vectors.T, Source.REDUCED)


def deviation(a, b):
    """Discrete L2-in-time and sup distance between two trajectories."""
    if a.grid != b.grid or a.states.shape != b.states.shape:
        raise GridMismatch("trajectories are sampled on different grids")
    sq = np.sum(np.abs(a.states - b.states) ** 2, axis=1)
    l2 = math.sqrt(float(np.trapezoid(sq, a.grid.times)))
    return Deviation(l2, float(np.sqrt(sq.max())))
