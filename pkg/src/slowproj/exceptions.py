"""Exception and warning classes raised by :mod:`slowproj`."""

__all__ = [
    "SlowProjError",
    "NonSquare",
    "ShapeMismatch",
    "NumericalFailure",
    "Singular",
    "NearDefective",
    "Unstable",
    "ConjugatePairSplit",
    "OutOfRange",
    "NotInvariant",
    "RankDeficient",
    "GapTooSmall",
    "NoConvergence",
    "BadParams",
    "DegenerateSpectrum",
    "StepUnderflow",
    "GridMismatch",
    "UnsupportedDimension",
    "BadModel",
    "BadRange",
    "ValidationFailed",
    "IllConditionedWarning",
]


class SlowProjError(Exception):
    """Base class for every error raised by this package."""


class NonSquare(SlowProjError, ValueError):
    """A square matrix was required."""


class ShapeMismatch(SlowProjError, ValueError):
    """Operands have incompatible shapes."""


class NumericalFailure(SlowProjError, ArithmeticError):
    """An iterative kernel failed to converge or produced non-finite output."""


class Singular(SlowProjError, ArithmeticError):
    """A linear system is singular within tolerance."""


class NearDefective(SlowProjError, ArithmeticError):
    """The eigenvector matrix is too ill-conditioned to be trusted.

    Attributes
    ----------
    condition : float
        Condition number of the eigenvector matrix.
    """

    def __init__(self, msg, condition=float("nan")):
        super().__init__(msg)
        self.condition = condition


class Unstable(SlowProjError, ArithmeticError):
    """The operator has an eigenvalue with non-negative real part."""

    def __init__(self, eigenvalue):
        super().__init__(f"unstable eigenvalue {complex(eigenvalue)!r}")
        self.eigenvalue = complex(eigenvalue)


class ConjugatePairSplit(SlowProjError, ValueError):
    """The slow selection contains a complex eigenvalue but not its conjugate."""


class OutOfRange(SlowProjError, ValueError):
    """A requested count or index lies outside the admissible range."""


class NotInvariant(SlowProjError, ValueError):
    """Basis vectors do not span an invariant subspace of the operator."""


class RankDeficient(SlowProjError, ValueError):
    """Basis vectors are linearly dependent."""


class GapTooSmall(SlowProjError, ValueError):
    """Slow eigenvalues are not separated from the remaining spectrum."""


class NoConvergence(SlowProjError, ArithmeticError):
    """An adaptive or iterative procedure hit its iteration budget."""


class BadParams(SlowProjError, ValueError):
    """Model parameters violate their stated constraints."""


class DegenerateSpectrum(SlowProjError, ValueError):
    """The spectrum does not have the expected structure."""


class StepUnderflow(SlowProjError, ArithmeticError):
    """An integrator step size became too small to make progress."""


class GridMismatch(SlowProjError, ValueError):
    """Two trajectories were sampled on different time grids."""


class UnsupportedDimension(SlowProjError, ValueError):
    """The requested operation is not available for this dimension."""


class BadModel(SlowProjError, ValueError):
    """A model specification could not be resolved."""


class BadRange(SlowProjError, ValueError):
    """A range specification is malformed."""


class ValidationFailed(SlowProjError):
    """An invariant check failed; ``counterexample`` holds the offending case."""

    def __init__(self, msg, counterexample=None):
        super().__init__(msg)
        self.counterexample = counterexample


class IllConditionedWarning(UserWarning):
    """A matrix is numerically close to singular; results may lose accuracy."""
