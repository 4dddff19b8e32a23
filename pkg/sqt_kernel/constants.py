from __future__ import annotations

import os

# Relative threshold below which trailing symbol coefficients are dropped.
# Matches the scale of the solvers' default stop threshold.
DEFAULT_TRIM_TOL: float = 1e-15

# Singular values below this fraction of the largest are discarded on compression
DEFAULT_COMPRESS_TOL: float = 1e-15

# Trailing rows of a structured-times-dense product below this fraction of the
# largest row norm are cut off
DEFAULT_ROW_TOL: float = 1e-15

# Residual target of the Laurent polynomial inversion
DEFAULT_INV_EPS: float = 1e-14

# Inversion target inside the solvers, below the rounding floor so that every
# inverse takes the refined grid
DEFAULT_SOLVER_INV_EPS: float = 1e-15

# Stop thresholds of the fixed-point and square-root iterations
DEFAULT_QME_TOL: float = 5e-15
DEFAULT_SQRT_TOL: float = 1e-15

# Iteration cap shared by all solvers
DEFAULT_MAX_ITER: int = 100_000

# Largest FFT grid the adaptive loops may reach (overridable through SQT_MAX_GRID)
DEFAULT_MAX_GRID: int = 2**22
MAX_GRID_ENV: str = "SQT_MAX_GRID"

# Relative size of the imaginary/antisymmetric residue tolerated on a grid of a
# symmetric symbol
SYMMETRY_TOL: float = 1e-13

# Change-of-basis binomials stay exact in int64 up to this order
MAX_BINOMIAL_ORDER: int = 60


def max_grid_size() -> int:
    """Return the FFT grid cap, honouring the ``SQT_MAX_GRID`` environment variable.

    Raises:
        SqtConfigError: If the variable is set but is not a positive power of two
    """
    raw = os.getenv(MAX_GRID_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_MAX_GRID

    from sqt_kernel.models import SqtConfigError

    try:
        value = int(raw)
    except ValueError as exc:
        raise SqtConfigError(f"{MAX_GRID_ENV} must be an integer, got {raw!r}") from exc
    if value < 1 or value & (value - 1):
        raise SqtConfigError(f"{MAX_GRID_ENV} must be a positive power of two, got {value}")
    return value
