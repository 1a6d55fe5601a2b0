"""Exception types shared across the package.

Each failure mode the pipeline distinguishes gets its own class so callers
(and the service layer) can map them to stable responses without string
matching.
"""

from __future__ import annotations


class PinchError(Exception):
    """Base class for all package-specific failures."""


class InvalidSpec(PinchError, ValueError):
    """Construction parameters outside their documented domain."""


class NonMonicPolynomial(PinchError, ValueError):
    """An operation that requires a monic polynomial got a non-monic one."""


class DimensionMismatch(PinchError, ValueError):
    """Operands whose dimensions do not line up."""


class UnrepresentableGenerator(PinchError):
    """The requested spectrum contains a root no real one-parameter group
    of matrices can produce (an unpaired negative real eigenvalue)."""


class SolverFailure(PinchError):
    """Iterative root finding did not reach its residual target."""

    def __init__(self, message: str, worst_residual: float) -> None:
        super().__init__(message)
        self.worst_residual = worst_residual


class CrossCheckFailure(PinchError):
    """Two independent computation routes disagree beyond tolerance."""

    def __init__(self, message: str, mismatch: float) -> None:
        super().__init__(message)
        self.mismatch = mismatch


class MatrixExpOverflow(PinchError, OverflowError):
    """Matrix exponential input norm large enough to overflow float64."""


class NonOrthonormalPlane(PinchError, ValueError):
    """A tangent 2-plane whose spanning pair is not orthonormal."""


class BudgetTooSmall(PinchError, ValueError):
    """A sampling budget below the mandatory deterministic seed count."""


class ConjugationFailure(PinchError):
    """Conjugating the integer matrix into block form did not meet the
    residual contract."""

    def __init__(self, message: str, residual: float, cond: float) -> None:
        super().__init__(message)
        self.residual = residual
        self.cond = cond


class DegenerateBasis(PinchError):
    """A lattice basis too close to singular for a covering bound."""


class PipelineError(PinchError):
    """A certification stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
