"""
Iterative solvers on quasi-Toeplitz matrices.

- ``qme_solve``: fixed-point iterations for A X² + B X + C = X started at X = 0
- ``qme_symbol_solve``: the same recurrences run pointwise on the unit circle, valid
  when A, B and C lie in one algebra P_α
- ``sqrt_solve``: incremental Newton iteration for the principal square root
- ``sqrt_symbol_solve``: square root of the symbol alone
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, TypedDict

import numpy as np
import scipy.fft

from sqt_kernel.constants import (
    DEFAULT_COMPRESS_TOL,
    DEFAULT_MAX_ITER,
    DEFAULT_QME_TOL,
    DEFAULT_SOLVER_INV_EPS,
    DEFAULT_SQRT_TOL,
    DEFAULT_TRIM_TOL,
    max_grid_size,
)
from sqt_kernel.models import AlphaMismatch, DomainFault, ModeMismatch, NoConvergence, ReprMode, SolveReport
from sqt_kernel.sqt import (
    LowRankCorrection,
    SqtMatrix,
    row_sums,
    sqt_add,
    sqt_convert,
    sqt_from_symbol,
    sqt_identity,
    sqt_inv,
    sqt_mul,
    sqt_norm_inf,
    sqt_scale,
    sqt_sub,
    sqt_toeplitz,
    sqt_truncate,
)
from sqt_kernel.symbol import (
    GridValues,
    SymbolLike,
    SymmetricSymbol,
    as_symbol,
    sym_eval_grid,
    sym_interp_grid,
    sym_map_grid,
    sym_mul,
    sym_sub,
)

logger = logging.getLogger("sqt.solvers")

STOCHASTIC_TOL = 1e-12


class QmeVariant(str, Enum):
    """Fixed-point iteration for A X² + B X + C = X"""

    NATURAL = "natural"  # X ← A X² + B X + C
    TRADITIONAL = "traditional"  # X ← (I - B)⁻¹ (A X² + C)
    UBASED = "ubased"  # X ← (I - A X - B)⁻¹ C


class SolverConfig(TypedDict, total=False):
    """Tuning knobs shared by the solvers; per-call values override ``_SOLVER_DEFAULT``."""

    max_iter: int
    """Iteration cap."""
    trim_tol: float
    """Relative threshold for dropping trailing symbol coefficients after each step."""
    compress_tol: float
    """Relative singular value threshold for recompressing corrections."""
    inv_eps: float
    """Residual target of symbol inversions."""
    max_grid: int
    """Largest FFT grid of the symbol-level solvers."""


_SOLVER_DEFAULT: SolverConfig = {
    "max_iter": DEFAULT_MAX_ITER,
    "trim_tol": DEFAULT_TRIM_TOL,
    "compress_tol": DEFAULT_COMPRESS_TOL,
    "inv_eps": DEFAULT_SOLVER_INV_EPS,
}


def _resolve(config: SolverConfig | None) -> SolverConfig:
    merged: SolverConfig = {**_SOLVER_DEFAULT, "max_grid": max_grid_size()}
    if config:
        merged.update(config)
    return merged


class SolveResult(NamedTuple):
    """Matrix solution and its report"""

    solution: SqtMatrix
    report: SolveReport


class SymbolSolveResult(NamedTuple):
    """Symbol solution and its report"""

    symbol: SymmetricSymbol
    report: SolveReport


@dataclass(frozen=True)
class QmeProblem:
    """A X² + B X + C = X with A + B + C stochastic"""

    a: SqtMatrix
    b: SqtMatrix
    c: SqtMatrix
    variant: QmeVariant = QmeVariant.NATURAL
    tol: float = DEFAULT_QME_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", QmeVariant(self.variant))
        modes = {m.mode for m in (self.a, self.b, self.c)}
        if len(modes) != 1:
            raise ModeMismatch("A, B and C must share one representation")
        if self.a.mode is ReprMode.ALGEBRA and len({m.alpha for m in (self.a, self.b, self.c)}) != 1:
            raise AlphaMismatch("A, B and C must share one alpha")

    @property
    def mode(self) -> ReprMode:
        return self.a.mode

    def check_stochastic(self, tol: float = STOCHASTIC_TOL) -> bool:
        """True when a(1) + b(1) + c(1) = 1 and the leading rows of A + B + C sum to one"""
        total = sum(m.symbol.value_at_one() for m in (self.a, self.b, self.c))
        if abs(total - 1.0) > tol:
            return False
        s = sqt_add(sqt_add(self.a, self.b), self.c)
        rows = max(s.degree, s.correction.support[0]) + s.degree + 1
        return bool(np.all(np.abs(row_sums(s, rows) - 1.0) <= tol))

    def validate(self) -> list[str]:
        """Log and return warnings; an invalid problem is still solvable"""
        warnings: list[str] = []
        if not self.check_stochastic():
            warnings.append("A + B + C is not stochastic")
        for msg in warnings:
            logger.warning(msg)
        return warnings


def _zero_like(m: SqtMatrix) -> SqtMatrix:
    return sqt_scale(sqt_identity(m.mode, m.alpha), 0.0)


def _step_size(d: SqtMatrix) -> float:
    """max(max_i |coefficients of the symbol|, ‖correction‖_∞)"""
    return max(float(np.abs(d.symbol.coeffs).max()), d.correction.norm_inf())


def _report(
    solution: SqtMatrix, iterations: int, residual: float, started: float, trace: list[float]
) -> SolveReport:
    return SolveReport(
        iterations=iterations,
        residual=residual,
        symbol_size=solution.symbol.size,
        correction_support=solution.correction.support,
        correction_rank=solution.correction.rank,
        elapsed=time.perf_counter() - started,
        mode=solution.mode.value,
        trace=trace,
    )


def qme_residual(p: QmeProblem, g: SqtMatrix, config: SolverConfig | None = None) -> float:
    """‖A G² + B G + C - G‖_∞"""
    cfg = _resolve(config)
    tol = cfg["compress_tol"]
    ag = sqt_mul(p.a, g, tol)
    r = sqt_add(sqt_mul(sqt_add(ag, p.b, tol), g, tol), sqt_sub(p.c, g, tol), tol)
    return sqt_norm_inf(r)


def qme_solve(p: QmeProblem, config: SolverConfig | None = None) -> SolveResult:
    """Run the fixed-point iteration of ``p.variant`` from X_0 = 0.

    Every step is trimmed and recompressed; the iteration stops once
    max(ε_k, ‖K(X_{k+1} - X_k)‖_∞) < p.tol, ε_k being the largest coefficient of the
    difference symbol.

    Raises:
        NoConvergence: If ``max_iter`` steps do not meet the stop test
        IllConditioned: If a required inverse does not exist numerically
    """
    cfg = _resolve(config)
    tol, eps, trim = cfg["compress_tol"], cfg["inv_eps"], cfg["trim_tol"]
    p.validate()
    started = time.perf_counter()
    identity = sqt_identity(p.mode, p.a.alpha)
    logger.info("qme %s (%s): start", p.variant.value, p.mode.value)

    step: Callable[[SqtMatrix], SqtMatrix]
    if p.variant is QmeVariant.NATURAL:

        def step(x: SqtMatrix) -> SqtMatrix:
            return sqt_add(sqt_mul(sqt_add(sqt_mul(p.a, x, tol), p.b, tol), x, tol), p.c, tol)

    elif p.variant is QmeVariant.TRADITIONAL:
        resolvent = sqt_inv(sqt_sub(identity, p.b, tol), eps, tol)

        def step(x: SqtMatrix) -> SqtMatrix:
            ax2 = sqt_mul(sqt_mul(p.a, x, tol), x, tol)
            return sqt_mul(resolvent, sqt_add(ax2, p.c, tol), tol)

    else:

        def step(x: SqtMatrix) -> SqtMatrix:
            u = sqt_sub(sqt_sub(identity, sqt_mul(p.a, x, tol), tol), p.b, tol)
            return sqt_mul(sqt_inv(u, eps, tol), p.c, tol)

    x = _zero_like(p.a)
    trace: list[float] = []
    for it in range(1, cfg["max_iter"] + 1):
        xn = sqt_truncate(step(x), trim, tol)
        delta = _step_size(sqt_sub(xn, x, tol))
        trace.append(delta)
        x = xn
        if delta < p.tol:
            residual = qme_residual(p, x, cfg)
            logger.info("qme %s: %d iterations, residual %.3e", p.variant.value, it, residual)
            return SolveResult(x, _report(x, it, residual, started, trace))
    raise NoConvergence(
        f"qme {p.variant.value} did not converge in {cfg['max_iter']} iterations", cfg["max_iter"]
    )


def _grid_step(
    variant: QmeVariant, va: np.ndarray, vb: np.ndarray, vc: np.ndarray
) -> Callable[[np.ndarray], np.ndarray]:
    if variant is QmeVariant.NATURAL:
        return lambda x: (va * x + vb) * x + vc
    if variant is QmeVariant.TRADITIONAL:
        resolvent = 1.0 / (1.0 - vb)
        return lambda x: resolvent * (va * x * x + vc)
    return lambda x: vc / (1.0 - va * x - vb)


def qme_symbol_solve(
    a: SymbolLike,
    b: SymbolLike,
    c: SymbolLike,
    variant: QmeVariant | str = QmeVariant.NATURAL,
    tol: float = DEFAULT_QME_TOL,
    alpha: float = 1.0,
    config: SolverConfig | None = None,
) -> SymbolSolveResult:
    """Scalar recurrence x ← f(x) run pointwise on a root-of-unity grid, then interpolated.

    For A = P_α(a), B = P_α(b), C = P_α(c) the solution is G = P_α(g). The grid doubles
    until the interpolated g has a decayed top quarter; the reported iteration count is
    that of the final grid.

    Raises:
        DomainFault: On non-finite intermediate values
        NoConvergence: On the iteration or grid cap
    """
    cfg = _resolve(config)
    variant = QmeVariant(variant)
    a, b, c = as_symbol(a), as_symbol(b), as_symbol(c)
    started = time.perf_counter()
    degree = max(a.degree, b.degree, c.degree)
    n = 8
    while n <= 2 * degree:
        n *= 2
    while n <= cfg["max_grid"]:
        va, vb, vc = (sym_eval_grid(s, n).values for s in (a, b, c))
        step = _grid_step(variant, va, vb, vc)
        x = np.zeros(n)
        trace: list[float] = []
        for it in range(1, cfg["max_iter"] + 1):
            with np.errstate(all="ignore"):
                xn = step(x)
            if not np.all(np.isfinite(xn)):
                raise DomainFault(f"qme {variant.value} iteration left the finite range on grid {n}")
            delta = float(np.abs(scipy.fft.fft(xn - x)).max()) / n
            trace.append(delta)
            x = xn
            if delta < tol:
                break
        else:
            raise NoConvergence(f"pointwise qme {variant.value} did not converge", cfg["max_iter"])
        half = n // 2 + 1
        coeffs = sym_interp_grid(GridValues(n, x), tol=0.0).padded(half)
        tail = float(np.abs(coeffs[-max(1, half // 4) :]).max())
        if tail <= cfg["trim_tol"] * float(np.abs(coeffs).max()) or tail <= tol:
            g = sym_interp_grid(GridValues(n, x), tol=cfg["trim_tol"])
            r = sym_sub(sym_mul(sym_mul(a, g) + b, g) + c, g)
            residual = sqt_norm_inf(sqt_from_symbol(alpha, r))
            report = SolveReport(
                iterations=it,
                residual=residual,
                symbol_size=g.size,
                elapsed=time.perf_counter() - started,
                mode="symbol",
                trace=trace,
            )
            logger.info("pointwise qme %s: grid %d, %d iterations", variant.value, n, it)
            return SymbolSolveResult(g, report)
        logger.debug("pointwise qme grid %d: tail %.3e, doubling", n, tail)
        n *= 2
    raise NoConvergence(f"pointwise qme did not resolve the symbol on grids up to {cfg['max_grid']}", 0)


def sqrt_solve(
    A: SqtMatrix, tol: float = DEFAULT_SQRT_TOL, config: SolverConfig | None = None
) -> SolveResult:
    """Principal square root through the incremental Newton iteration.

    X_0 = A, E_0 = (I - A)/2; X_{k+1} = X_k + E_k, E_{k+1} = -E_k X_{k+1}⁻¹ E_k / 2.
    Stops after applying an increment E_k with
    max(max|coefficients of E_k|, ‖K(E_k)‖_∞) ≤ tol·‖X_{k+1}‖_∞.

    Raises:
        NoConvergence: If ``max_iter`` steps do not meet the stop test
        IllConditioned: If some X_k is numerically singular
    """
    cfg = _resolve(config)
    ctol, eps, trim = cfg["compress_tol"], cfg["inv_eps"], cfg["trim_tol"]
    started = time.perf_counter()
    identity = sqt_identity(A.mode, A.alpha)
    x = A
    e = sqt_scale(sqt_sub(identity, A, ctol), 0.5)
    trace: list[float] = []
    logger.info("sqrt (%s): start", A.mode.value)
    for it in range(1, cfg["max_iter"] + 1):
        x = sqt_truncate(sqt_add(x, e, ctol), trim, ctol)
        size = _step_size(e)
        trace.append(size)
        if size <= tol * sqt_norm_inf(x):
            residual = sqt_norm_inf(sqt_sub(sqt_mul(x, x, ctol), A, ctol))
            logger.info("sqrt: %d iterations, residual %.3e", it, residual)
            return SolveResult(x, _report(x, it, residual, started, trace))
        xinv = sqt_inv(x, eps, ctol)
        e = sqt_truncate(sqt_scale(sqt_mul(sqt_mul(e, xinv, ctol), e, ctol), -0.5), trim, ctol)
    raise NoConvergence(f"square root did not converge in {cfg['max_iter']} iterations", cfg["max_iter"])


def sqrt_symbol_solve(
    a: SymbolLike, tol: float = DEFAULT_TRIM_TOL, alpha: float = 1.0, config: SolverConfig | None = None
) -> SymbolSolveResult:
    """g = √a by adaptive grid evaluation; P_α(g)² = P_α(a)"""
    cfg = _resolve(config)
    a = as_symbol(a)
    started = time.perf_counter()
    g = sym_map_grid(a, np.sqrt, tol, cfg["max_grid"])
    r = sym_sub(sym_mul(g, g), a)
    report = SolveReport(
        iterations=0,
        residual=sqt_norm_inf(sqt_from_symbol(alpha, r)),
        symbol_size=g.size,
        elapsed=time.perf_counter() - started,
        mode="symbol",
    )
    return SymbolSolveResult(g, report)


# Data of the QBD experiment: A = T(a) + E_A, B = T(b) + E_B, C = T(c) + E_C
QBD_SYMBOLS: dict[str, tuple[float, float]] = {
    "a": (0.10, 0.10),
    "b": (0.23, 0.08),
    "c": (0.11, 0.10),
}
QBD_CORNERS: dict[str, float] = {"a": 0.10, "b": 0.08, "c": 0.10}

# a(z) = 5 + δ + 4(z + 1/z) + 3(z² + 1/z²) + 2(z³ + 1/z³) + (z⁴ + 1/z⁴)
BANDED_SQRT_TAIL: tuple[float, ...] = (4.0, 3.0, 2.0, 1.0)


def _in_mode(m: SqtMatrix, mode: ReprMode, alpha: float) -> SqtMatrix:
    return m if mode is ReprMode.TOEPLITZ else sqt_convert(m, ReprMode.ALGEBRA, alpha)


def qbd_problem(
    mode: ReprMode = ReprMode.ALGEBRA,
    alpha: float = 0.0,
    variant: QmeVariant | str = QmeVariant.NATURAL,
    tol: float = DEFAULT_QME_TOL,
) -> QmeProblem:
    """The QBD instance T(·) + corner·e_1e_1ᵀ expressed in the requested representation"""
    mats = {}
    for name, coeffs in QBD_SYMBOLS.items():
        corner = LowRankCorrection(np.array([[QBD_CORNERS[name]]]), np.array([[1.0]]))
        base = sqt_toeplitz(coeffs)
        mats[name] = _in_mode(SqtMatrix(base.mode, base.element, corner), mode, alpha)
    return QmeProblem(mats["a"], mats["b"], mats["c"], QmeVariant(variant), tol)


def banded_sqrt_symbol(delta: float) -> SymmetricSymbol:
    return SymmetricSymbol((5.0 + delta, *BANDED_SQRT_TAIL))


def banded_sqrt_matrix(delta: float, mode: ReprMode = ReprMode.ALGEBRA, alpha: float = 1.0) -> SqtMatrix:
    """A = T(a) for the square-root experiment; in ALGEBRA mode the correction is -H_α(a)"""
    return _in_mode(sqt_toeplitz(banded_sqrt_symbol(delta)), mode, alpha)
