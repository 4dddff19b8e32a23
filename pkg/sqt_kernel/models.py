"""Shared types of the kernel: the exception hierarchy, representation modes and solver reports."""

from __future__ import annotations

from enum import Enum
from typing import TypeAlias

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

DenseBlock: TypeAlias = npt.NDArray[np.float64]
"""Leading N×N principal truncation of a semi-infinite matrix."""


class SqtError(Exception):
    """Base exception for quasi-Toeplitz kernel errors"""

    pass


class SqtConfigError(SqtError, ValueError):
    """Raised when an environment or configuration value is malformed"""

    pass


class SymbolError(SqtError):
    """Base class for failures of the Laurent symbol layer"""

    pass


class BadGridSize(SymbolError, ValueError):
    """Raised when a root-of-unity grid is too small or not a power of two"""

    def __init__(self, n: int, degree: int) -> None:
        super().__init__(f"grid size {n} must be a power of two larger than the degree {degree}")
        self.n = n
        self.degree = degree


class AsymmetryDetected(SymbolError, ValueError):
    """Raised when grid values do not come from a symmetric symbol"""

    def __init__(self, residual: float) -> None:
        super().__init__(f"interpolant is not symmetric (residual {residual:.3e})")
        self.residual = residual


class DomainFault(SymbolError, ValueError):
    """Raised when a mapped function produces non-finite values on the unit circle"""

    pass


class IllConditioned(SqtError, ArithmeticError):
    """Raised when an inversion is ill conditioned to working precision"""

    def __init__(self, message: str, cond: float = float("inf")) -> None:
        super().__init__(message)
        self.cond = cond


class ZeroOnCircle(IllConditioned):
    """Raised when a symbol vanishes exactly at a grid point of the unit circle"""

    pass


class SingularSmallBlock(IllConditioned):
    """Raised when the small capacitance system of a low-rank inverse update is singular"""

    pass


class NoConvergence(SqtError, RuntimeError):
    """Raised when an iteration or an adaptive grid loop exhausts its budget"""

    def __init__(self, message: str, iterations: int) -> None:
        super().__init__(message)
        self.iterations = iterations


class BadAlpha(SqtError, ValueError):
    """Raised when an operation is not defined for the given α"""

    pass


class BasisOrderError(SqtError, ValueError):
    """Raised when a change of basis is requested beyond the exact binomial range"""

    pass


class IndexOutOfRange(SqtError, IndexError):
    """Raised when a finite basis index does not fit the matrix dimension"""

    pass


class ModeMismatch(SqtError, ValueError):
    """Raised when a binary operation mixes representation modes"""

    pass


class AlphaMismatch(SqtError, ValueError):
    """Raised when a binary ALGEBRA-mode operation mixes different α values"""

    pass


class SqtFormatError(SqtError, ValueError):
    """Raised when a symbol line or an SQT1 record cannot be parsed"""

    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnsupportedTransform(SqtError, NotImplementedError):
    """Raised when no diagonalization check exists for a (α, β) pair"""

    def __init__(self, alpha: float, beta: float, family: str) -> None:
        super().__init__(
            f"diagonalization for (alpha={alpha}, beta={beta}) is not implemented; expected {family}"
        )
        self.alpha = alpha
        self.beta = beta
        self.family = family


class ReprMode(str, Enum):
    """Representation of the compact-free part of a quasi-Toeplitz matrix"""

    ALGEBRA = "ALG"  # P_α(a) + UVᵀ
    TOEPLITZ = "TOE"  # T(a) + UVᵀ


class SolveReport(BaseModel):
    """Outcome of a solver run, one row of an experiment table"""

    model_config = ConfigDict(frozen=True)

    iterations: int = Field(description="Number of completed iterations")
    residual: float = Field(description="Infinity norm of the defining residual of the computed solution")
    symbol_size: int = Field(description="Number of stored symbol coefficients (d + 1)")
    correction_support: tuple[int, int] = Field(
        default=(0, 0), description="Row and column support (m, n) of the low-rank correction"
    )
    correction_rank: int = Field(default=0, description="Width k of the correction factors")
    elapsed: float = Field(description="Wall time in seconds, monotonic clock")
    mode: str = Field(description="Representation used: ALG, TOE or symbol")
    trace: list[float] = Field(
        default_factory=list, description="Stop-test quantity recorded at every iteration"
    )

    @property
    def correction_size(self) -> int:
        """Larger side of the correction support, as tabulated"""
        return max(self.correction_support)
