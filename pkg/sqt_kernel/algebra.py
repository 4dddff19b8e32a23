"""
Basis machinery of the algebra P_α generated by A_α = T(z + 1/z) + α e_1 e_1ᵀ.

Every element is P_α(a) = T(a) + H_α(a) where the Hankel part H_α(a) = Σ a_n H(h_n)
is fixed by the symbol a and by α. This module builds the vectors h_n, the first
column η of H_α(a) and the integer change of basis between powers of A_α and
the basis P_{n,α}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.signal

from sqt_kernel.constants import MAX_BINOMIAL_ORDER
from sqt_kernel.models import BadAlpha, BasisOrderError, DenseBlock
from sqt_kernel.symbol import SymbolLike, SymmetricSymbol, as_symbol
from sqt_kernel.utils.dense import hankel_block, toeplitz_block

logger = logging.getLogger("sqt.algebra")


@dataclass(frozen=True, eq=False)
class BasisVector:
    """Coefficients of z^1..z^n in h_n(z)"""

    n: int
    alpha: float
    entries: npt.NDArray[np.float64]

    def norm1(self) -> float:
        return float(np.abs(self.entries).sum())

    def __str__(self) -> str:
        return " ".join(f"{x:.17g}" for x in self.entries)


@dataclass(frozen=True, eq=False)
class HankelBlock:
    """Semi-infinite Hankel matrix with (i, j) entry η_{i+j-1}, zero once i + j - 1 > d"""

    first_column: npt.NDArray[np.float64]

    @property
    def size(self) -> int:
        return self.first_column.size

    def to_dense(self, rows: int, cols: int | None = None) -> DenseBlock:
        return hankel_block(self.first_column, rows, cols)

    def __str__(self) -> str:
        return " ".join(f"{x:.17g}" for x in self.first_column)


class BasisExpansion(NamedTuple):
    """A_α^n = Σ_i coeffs[i] P_{n-2i,α} + phi I"""

    coeffs: tuple[int, ...]
    phi: int


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """P_α(a) = T(a) + H_α(a)"""

    alpha: float
    symbol: SymmetricSymbol

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "symbol", as_symbol(self.symbol))
        if self.unbounded:
            logger.warning("alpha=%g: boundedness of P_alpha is not certified for |alpha| > 1", self.alpha)

    @property
    def unbounded(self) -> bool:
        """Set when |α| > 1, where ‖H_{n,α}‖_∞ grows like |α|^n"""
        return abs(self.alpha) > 1.0

    def hankel(self) -> HankelBlock:
        return eta_vector(self.symbol, self.alpha)

    def to_dense(self, rows: int, cols: int | None = None) -> DenseBlock:
        cols = rows if cols is None else cols
        return toeplitz_block(self.symbol.coeffs, rows, cols) + self.hankel().to_dense(rows, cols)


def theta(alpha: float) -> float:
    return alpha * alpha - 1.0


def h_vector(n: int, alpha: float) -> BasisVector:
    """h_n(z) = θ Σ_{i=1}^{n-1} α^{n-i-1} z^i + α z^n, θ = α² - 1.

    Args:
        n: Order, n ≥ 1
        alpha: Corner entry of A_α

    Returns:
        BasisVector with the n coefficients of z^1..z^n
    """
    if n < 1:
        raise ValueError(f"h_n is defined for n >= 1, got {n}")
    alpha = float(alpha)
    entries = np.empty(n)
    entries[: n - 1] = theta(alpha) * alpha ** np.arange(n - 2, -1, -1, dtype=np.float64)
    entries[n - 1] = alpha
    return BasisVector(n, alpha, entries)


def eta_vector(a: SymbolLike, alpha: float) -> HankelBlock:
    """First column η of H_α(a) = Σ_{n≥1} a_n H(h_n).

    η_i = α a_i + θ t_i with t_d = 0 and t_i = a_{i+1} + α t_{i+1}; the backward
    recurrence is run as a first-order IIR filter over a_d, a_{d-1}, .., a_2.
    """
    a = as_symbol(a)
    alpha = float(alpha)
    d = a.degree
    if d == 0:
        return HankelBlock(np.zeros(0))
    c = a.coeffs
    t = np.zeros(d)
    if d > 1:
        t[: d - 1] = scipy.signal.lfilter([1.0], [1.0, -alpha], c[d:1:-1])[::-1]
    return HankelBlock(alpha * c[1:] + theta(alpha) * t)


def hankel_norm_bound(n: int, alpha: float) -> float:
    """‖H_{n,α}‖_∞ = ‖h_n‖_1 = |α| + (1 + |α|)·|1 - |α|^{n-1}|"""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    r = abs(float(alpha))
    return r + (1.0 + r) * abs(1.0 - r ** (n - 1))


def p_alpha_norm_bound(a: SymbolLike, alpha: float) -> float:
    """Upper bound (3/2 + |α|)·‖T(a)‖_∞ on ‖P_α(a)‖_∞, valid for |α| ≤ 1.

    Raises:
        BadAlpha: If |α| > 1, where no uniform bound exists
    """
    if abs(alpha) > 1.0:
        raise BadAlpha(f"the infinity-norm bound needs |alpha| <= 1, got {alpha}")
    return (1.5 + abs(alpha)) * as_symbol(a).wiener_norm()


def _check_order(n: int) -> None:
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    if n > MAX_BINOMIAL_ORDER:
        raise BasisOrderError(f"change of basis is exact only up to order {MAX_BINOMIAL_ORDER}, got {n}")


def power_to_basis(n: int) -> BasisExpansion:
    """Coefficients of A_α^n in the basis: binom(n, i) on P_{n-2i,α} for i ≤ (n-1)/2, plus φ_n I."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    _check_order(n)
    coeffs = tuple(math.comb(n, i) for i in range((n - 1) // 2 + 1))
    phi = math.comb(n, n // 2) if n % 2 == 0 else 0
    return BasisExpansion(coeffs, phi)


@lru_cache(maxsize=None)
def _basis_to_power(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    out = [0] * (n + 1)
    out[n] = 1
    expansion = power_to_basis(n)
    for i, binom in enumerate(expansion.coeffs[1:], start=1):
        for j, c in enumerate(_basis_to_power(n - 2 * i)):
            out[j] -= binom * c
    out[0] -= expansion.phi
    return tuple(out)


def basis_to_power(n: int) -> tuple[int, ...]:
    """Integer coefficients c_0..c_n with P_{n,α} = Σ_j c_j A_α^j (independent of α)."""
    _check_order(n)
    return _basis_to_power(n)


def basis_to_powers_combination(coeffs: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Map Σ b_k P_{k,α} (P_0 = I) to the coefficients of Σ c_j A_α^j"""
    b = np.asarray(coeffs, dtype=np.int64)
    _check_order(b.size - 1)
    out = np.zeros(b.size, dtype=np.int64)
    for k, bk in enumerate(b):
        if bk:
            out[: k + 1] += bk * np.asarray(basis_to_power(k), dtype=np.int64)
    return out


def powers_to_basis_combination(coeffs: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Map Σ c_j A_α^j to basis coefficients b_k of Σ b_k P_{k,α}"""
    c = np.asarray(coeffs, dtype=np.int64)
    _check_order(c.size - 1)
    out = np.zeros(c.size, dtype=np.int64)
    out[0] += c[0]
    for j in range(1, c.size):
        if not c[j]:
            continue
        expansion = power_to_basis(j)
        for i, binom in enumerate(expansion.coeffs):
            out[j - 2 * i] += c[j] * binom
        out[0] += c[j] * expansion.phi
    return out


def _sigma(m: int, alpha: float) -> float:
    if m % 2 == 0:
        return alpha * math.comb(m, m // 2)
    return -float(math.comb(m, m // 2))


def generator_apply(v: npt.ArrayLike, alpha: float) -> npt.NDArray[np.float64]:
    """A_α v for a finite vector v; the result is one entry longer"""
    padded = np.append(np.asarray(v, dtype=np.float64), 0.0)
    out = np.zeros(padded.size)
    out[0] = alpha * padded[0] + (padded[1] if padded.size > 1 else 0.0)
    out[1:] = padded[:-1]
    out[1:-1] += padded[2:]
    return out


def k_vector(n: int, alpha: float) -> npt.NDArray[np.float64]:
    """First column k_n of the compact part of A_α^n.

    k_1 = α e_1 and k_{m+1} = A_α k_m + σ_m e_1, with σ_m = α binom(m, m/2) for even m
    and -binom(m, ⌊m/2⌋) for odd m.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    alpha = float(alpha)
    k = np.array([alpha])
    for m in range(1, n):
        k = generator_apply(k, alpha)
        k[0] += _sigma(m, alpha)
    return k


def special_case_form(alpha: float, a: SymbolLike) -> HankelBlock:
    """Closed form of H_α(a) for α ∈ {-1, 0, 1}.

    α = 0 gives -H((a(z)/z)_+), α = ±1 gives ±H(a_+).

    Raises:
        BadAlpha: For any other α
    """
    a = as_symbol(a)
    tail = a.plus_part()
    if alpha == 0:
        col = np.zeros(tail.size)
        col[: max(tail.size - 1, 0)] = -tail[1:]
        return HankelBlock(col)
    if alpha == 1:
        return HankelBlock(tail)
    if alpha == -1:
        return HankelBlock(-tail)
    raise BadAlpha(f"closed forms exist only for alpha in (-1, 0, 1), got {alpha}")


def generator_dense(alpha: float, size: int) -> DenseBlock:
    """Leading size×size block of A_α"""
    out = toeplitz_block([0.0, 1.0], size)
    out[0, 0] = alpha
    return out


def basis_dense(n: int, alpha: float, size: int) -> DenseBlock:
    """Leading size×size block of P_{n,α} = T(z^n + z^-n) + H(h_n); P_0 = I"""
    if n == 0:
        return np.eye(size)
    stencil = np.zeros(n + 1)
    stencil[n] = 1.0
    return toeplitz_block(stencil, size) + hankel_block(h_vector(n, alpha).entries, size)


def display_eta(a: SymbolLike, alpha: float) -> npt.NDArray[np.float64]:
    """First column produced by the Hessenberg-matrix display of H_α(a).

    The display multiplies (a_1, a_2, ..) by the Hessenberg Toeplitz matrix built on
    v = (1, α, θ, θα, θα², ..) with v_1 on the subdiagonal, so η_i = Σ_{j≥i-1} a_j v_{j-i+2}
    has d + 1 entries. It differs from ``eta_vector`` by the subdiagonal terms a_{i-1}·v_1
    and does not reproduce H_α(a); kept as a diagnostic.
    """
    a = as_symbol(a)
    alpha = float(alpha)
    d = a.degree
    if d == 0:
        return np.zeros(0)
    # v_1 = 1, v_2 = α, v_{3+i} = θ α^i
    v = np.empty(d + 1)
    v[0] = 1.0
    v[1] = alpha
    v[2:] = theta(alpha) * alpha ** np.arange(d - 1, dtype=np.float64)
    col = np.zeros(d + 1)
    col[:2] = (v[1], v[0])
    hessenberg = scipy.linalg.toeplitz(col, v[1:])
    return hessenberg @ a.coeffs[1:]
