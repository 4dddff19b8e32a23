"""
Arithmetic on symmetric Laurent polynomials a(z) = a_0 + sum_i a_i (z^i + z^-i).

Only a_0..a_d are stored. Products, inverses and function evaluations go
through values on a root-of-unity grid: coefficients are spread onto the
grid with one inverse FFT and recovered with one forward FFT.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.fft
import scipy.signal

from sqt_kernel.constants import DEFAULT_INV_EPS, DEFAULT_TRIM_TOL, SYMMETRY_TOL, max_grid_size
from sqt_kernel.models import (
    AsymmetryDetected,
    BadGridSize,
    DomainFault,
    IllConditioned,
    NoConvergence,
    ZeroOnCircle,
)

logger = logging.getLogger("sqt.symbol")

_MACHINE_EPS = float(np.finfo(np.float64).eps)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class SymmetricSymbol:
    """Symmetric Laurent polynomial stored by its non-negative half a_0..a_d"""

    coeffs: FloatArray

    def __init__(self, coeffs: Sequence[float] | npt.ArrayLike) -> None:
        arr = np.array(coeffs, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValueError("a symbol needs at least the constant coefficient")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def size(self) -> int:
        """Number of stored coefficients, d + 1"""
        return self.coeffs.size

    def wiener_norm(self) -> float:
        """‖a‖_W = |a_0| + 2 Σ_{i≥1} |a_i|"""
        return float(abs(self.coeffs[0]) + 2.0 * np.abs(self.coeffs[1:]).sum())

    def value_at_one(self) -> float:
        """a(1), the row sum of the Toeplitz part"""
        return float(self.coeffs[0] + 2.0 * self.coeffs[1:].sum())

    def laurent(self) -> FloatArray:
        """Full coefficient vector a_{-d}..a_d"""
        return np.concatenate([self.coeffs[:0:-1], self.coeffs])

    def plus_part(self) -> FloatArray:
        """Coefficients a_1..a_d of a_+(z) = a_-(z^-1)"""
        return np.array(self.coeffs[1:])

    def padded(self, length: int) -> FloatArray:
        """Coefficients a_0..a_{length-1}, zero filled or cut"""
        out = np.zeros(length)
        k = min(length, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return out

    def __len__(self) -> int:
        return self.coeffs.size

    def __add__(self, other: SymmetricSymbol | float) -> SymmetricSymbol:
        if isinstance(other, SymmetricSymbol):
            return sym_add(self, other)
        return sym_add(self, SymmetricSymbol([float(other)]))

    __radd__ = __add__

    def __sub__(self, other: SymmetricSymbol | float) -> SymmetricSymbol:
        if isinstance(other, SymmetricSymbol):
            return sym_sub(self, other)
        return sym_add(self, SymmetricSymbol([-float(other)]))

    def __rsub__(self, other: float) -> SymmetricSymbol:
        return sym_add(-self, SymmetricSymbol([float(other)]))

    def __neg__(self) -> SymmetricSymbol:
        return SymmetricSymbol(-self.coeffs)

    def __mul__(self, other: SymmetricSymbol | float) -> SymmetricSymbol:
        if isinstance(other, SymmetricSymbol):
            return sym_mul(self, other)
        return sym_scale(self, float(other))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"SymmetricSymbol(degree={self.degree}, coeffs={np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True, eq=False)
class GridValues:
    """Values a(ω^i), i = 1..n, of a symbol on the n-th roots of unity, ω = exp(2πi/n)"""

    n: int
    values: npt.NDArray[np.float64] | npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        if not _is_power_of_two(self.n) or len(self.values) != self.n:
            raise BadGridSize(self.n, len(self.values) - 1)


class InverseResult(NamedTuple):
    """Result of a Laurent polynomial inversion"""

    symbol: SymmetricSymbol
    cond: float  # max|a| / min|a| over the final grid


SymbolLike = SymmetricSymbol | Sequence[float] | npt.ArrayLike


def as_symbol(a: SymbolLike) -> SymmetricSymbol:
    """Coerce coefficient sequences to SymmetricSymbol"""
    return a if isinstance(a, SymmetricSymbol) else SymmetricSymbol(a)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


def _next_power_of_two_above(x: int) -> int:
    """Smallest power of two strictly greater than x"""
    n = 1
    while n <= x:
        n *= 2
    return n


def _circle_values(coeffs: FloatArray, n: int) -> FloatArray:
    """a(ω^k) for k = 0..n-1; coefficients beyond n alias onto the grid"""
    d = coeffs.size - 1
    buf = np.zeros(n, dtype=np.complex128)
    full = np.concatenate([coeffs[:0:-1], coeffs])
    np.add.at(buf, np.arange(-d, d + 1) % n, full)
    return np.real(n * scipy.fft.ifft(buf))


def _fold(t: npt.NDArray[np.complex128]) -> FloatArray:
    """Fold interpolation coefficients t_0..t_{n-1} onto a symmetric half c_0..c_{n/2}"""
    n = t.size
    if n == 1:
        return np.real(t).astype(np.float64)
    half = n // 2
    c = np.empty(half + 1, dtype=np.complex128)
    c[0] = t[0]
    c[1:half] = 0.5 * (t[1:half] + t[n - 1 : half : -1])
    # z^{n/2} and z^{-n/2} coincide on the grid
    c[half] = 0.5 * t[half]
    return np.real(c)


def _asymmetry(t: npt.NDArray[np.complex128]) -> float:
    n = t.size
    if n < 3:
        return float(np.abs(np.imag(t)).max(initial=0.0))
    return float(max(np.abs(t[1:] - t[:0:-1]).max(), np.abs(np.imag(t)).max()))


def _interpolate(vals: npt.ArrayLike, check: bool = True) -> FloatArray:
    """Symmetric half of the interpolant of values given in FFT order (k = 0..n-1)"""
    vals = np.asarray(vals)
    t = scipy.fft.fft(vals) / vals.size
    if check:
        residual = _asymmetry(t)
        scale = float(np.abs(vals).max(initial=0.0))
        if residual > SYMMETRY_TOL * scale:
            raise AsymmetryDetected(residual)
    return _fold(t)


def sym_trim(a: SymbolLike, tol: float = DEFAULT_TRIM_TOL) -> SymmetricSymbol:
    """Drop trailing coefficients with |a_i| ≤ tol · max_j |a_j|; a_0 is always kept."""
    a = as_symbol(a)
    c = a.coeffs
    scale = float(np.abs(c).max())
    keep = np.flatnonzero(np.abs(c[1:]) > tol * scale)
    last = int(keep[-1]) + 2 if keep.size else 1
    if last == c.size:
        return a
    return SymmetricSymbol(c[:last])


def sym_add(a: SymbolLike, b: SymbolLike, tol: float = 0.0) -> SymmetricSymbol:
    """Coefficientwise sum; exact zeros at the top are trimmed."""
    a, b = as_symbol(a), as_symbol(b)
    n = max(a.size, b.size)
    return sym_trim(SymmetricSymbol(a.padded(n) + b.padded(n)), tol)


def sym_sub(a: SymbolLike, b: SymbolLike, tol: float = 0.0) -> SymmetricSymbol:
    a, b = as_symbol(a), as_symbol(b)
    n = max(a.size, b.size)
    return sym_trim(SymmetricSymbol(a.padded(n) - b.padded(n)), tol)


def sym_scale(a: SymbolLike, s: float) -> SymmetricSymbol:
    return sym_trim(SymmetricSymbol(float(s) * as_symbol(a).coeffs), 0.0)


def sym_mul(a: SymbolLike, b: SymbolLike, tol: float = DEFAULT_TRIM_TOL) -> SymmetricSymbol:
    """Product a(z)·b(z) through pointwise multiplication on a grid of size n > 2(d_a + d_b)."""
    a, b = as_symbol(a), as_symbol(b)
    d = a.degree + b.degree
    n = _next_power_of_two_above(2 * d)
    vals = _circle_values(a.coeffs, n) * _circle_values(b.coeffs, n)
    c = _interpolate(vals, check=False)[: d + 1]
    return sym_trim(SymmetricSymbol(c), tol)


def sym_eval_grid(a: SymbolLike, n: int) -> GridValues:
    """Values a(ω^i) for i = 1..n.

    Raises:
        BadGridSize: If n is not a power of two larger than the degree
    """
    a = as_symbol(a)
    if not _is_power_of_two(n) or n <= a.degree:
        raise BadGridSize(n, a.degree)
    d = a.degree
    buf = np.zeros(n, dtype=np.complex128)
    np.add.at(buf, np.arange(-d, d + 1) % n, a.laurent())
    vals = n * scipy.fft.ifft(buf)
    imag = float(np.abs(np.imag(vals)).max())
    if imag > SYMMETRY_TOL * max(a.wiener_norm(), np.finfo(np.float64).tiny):
        raise AsymmetryDetected(imag)
    return GridValues(n, np.roll(np.real(vals), -1))


def sym_interp_grid(values: GridValues, tol: float = DEFAULT_TRIM_TOL) -> SymmetricSymbol:
    """Symmetric interpolant of degree n/2 through the grid values, trimmed with ``tol``.

    Raises:
        AsymmetryDetected: If the values do not come from a function with g(z) = g(1/z)
    """
    c = _interpolate(np.roll(np.asarray(values.values), 1))
    return sym_trim(SymmetricSymbol(c), tol)


def _initial_grid(d: int) -> int:
    n = 1 if d == 0 else 2 ** int(np.ceil(np.log2(d)))
    while n <= d:
        n *= 2
    return n


def _reciprocal_on(a: SymmetricSymbol, n: int, eps: float) -> tuple[FloatArray, float]:
    y = _circle_values(a.coeffs, n)
    mags = np.abs(y)
    if np.any(mags == 0.0):
        raise ZeroOnCircle("symbol vanishes on the unit circle")
    cond = float(mags.max() / mags.min())
    if cond > 1.0 / eps:
        raise IllConditioned(f"ill conditioned problem: cond = {cond:.3e}", cond=cond)
    return _interpolate(1.0 / y, check=False), cond


def sym_inv(a: SymbolLike, eps: float = DEFAULT_INV_EPS, max_grid: int | None = None) -> InverseResult:
    """Invert a Laurent polynomial by interpolating reciprocal values on growing grids.

    The grid is doubled until every coefficient of the residual a(z)c(z) - 1 is below
    ``eps``. The residual cannot go below the rounding floor 8·u·‖a‖_W·‖c‖_W, so an
    ``eps`` under that floor is met as follows: once the residual reaches the floor,
    the interpolant is recomputed one grid further out (cap permitting) to clear the
    aliasing that is still hidden under the floor, and that refined inverse is
    returned. The residual of the result is then at rounding level, not ``eps``.

    Args:
        a: Symbol to invert
        eps: Residual target
        max_grid: Grid cap, defaults to ``max_grid_size()``

    Returns:
        InverseResult with the trimmed inverse and cond = max|a| / min|a| on the grid

    Raises:
        ZeroOnCircle: If a vanishes at a grid point
        IllConditioned: If cond exceeds 1/eps
        NoConvergence: If the grid cap is reached first
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = as_symbol(a)
    cap = max_grid if max_grid is not None else max_grid_size()
    full_a = a.laurent()
    n = _initial_grid(a.degree)
    rounds = 0
    while True:
        n *= 2
        rounds += 1
        if n > cap:
            raise NoConvergence(f"inversion did not converge on grids up to {cap}", rounds)
        c, cond = _reciprocal_on(a, n, eps)
        r = scipy.signal.convolve(full_a, np.concatenate([c[:0:-1], c]))
        r[r.size // 2] -= 1.0
        delta = float(np.abs(r).max())
        floor = 8.0 * _MACHINE_EPS * a.wiener_norm() * (abs(c[0]) + 2.0 * np.abs(c[1:]).sum())
        logger.debug("inversion grid %d: residual %.3e cond %.3e", n, delta, cond)
        if delta <= eps:
            return InverseResult(sym_trim(SymmetricSymbol(c)), cond)
        if delta <= floor:
            if 2 * n <= cap:
                c, cond = _reciprocal_on(a, 2 * n, eps)
                logger.debug("inversion at rounding floor %.3e, refined on grid %d", floor, 2 * n)
            return InverseResult(sym_trim(SymmetricSymbol(c)), cond)


def sym_map_grid(
    a: SymbolLike,
    f: Callable[[FloatArray], npt.ArrayLike],
    tol: float = DEFAULT_TRIM_TOL,
    max_grid: int | None = None,
) -> SymmetricSymbol:
    """Approximate f(a(z)) by a symmetric Laurent polynomial.

    The grid doubles until the top quarter of the interpolated coefficients is below
    ``tol`` relative to the largest coefficient (or at the FFT rounding floor).

    Raises:
        DomainFault: If f is not finite on the range of a
        NoConvergence: If the grid cap is reached
    """
    a = as_symbol(a)
    cap = max_grid if max_grid is not None else max_grid_size()
    n = max(8, _next_power_of_two_above(2 * a.degree))
    rounds = 0
    while n <= cap:
        rounds += 1
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            fx = np.asarray(f(_circle_values(a.coeffs, n)), dtype=np.float64)
        if not np.all(np.isfinite(fx)):
            raise DomainFault("mapped function is not finite on the range of the symbol")
        c = _interpolate(fx)
        tail = float(np.abs(c[-max(1, c.size // 4) :]).max())
        cmax = float(np.abs(c).max())
        logger.debug("map grid %d: tail %.3e", n, tail)
        if tail <= max(tol * cmax, 8.0 * _MACHINE_EPS * float(np.abs(fx).max())):
            return sym_trim(SymmetricSymbol(c), tol)
        n *= 2
    raise NoConvergence(f"function approximation did not converge on grids up to {cap}", rounds)


def convolve_symbols(a: SymbolLike, b: SymbolLike) -> SymmetricSymbol:
    """Product by direct convolution of the full coefficient vectors"""
    a, b = as_symbol(a), as_symbol(b)
    full = np.convolve(a.laurent(), b.laurent())
    return SymmetricSymbol(full[full.size // 2 :])
