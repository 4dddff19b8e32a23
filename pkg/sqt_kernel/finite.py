"""
Finite m×m algebras generated by A_{α,β}: tridiagonal with unit off-diagonals and
corner entries α (top left) and β (bottom right).

The basis is P_0 = I and P_i = T_m(z^i + z^-i) + H_i^(α) + J H_i^(β) J for 1 ≤ i ≤ m-1,
with J the flip matrix. For α = β = 0 the algebra is diagonalized by the DST-I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.fft

from sqt_kernel.algebra import h_vector, power_to_basis
from sqt_kernel.models import DenseBlock, IndexOutOfRange, UnsupportedTransform
from sqt_kernel.utils.dense import hankel_block

# sign pairs (α, β) of the classical trigonometric algebras and their transforms
_TRANSFORM_FAMILIES: dict[tuple[int, int], str] = {
    (1, 1): "DCT-II",
    (-1, -1): "DST-II",
    (1, -1): "DCT-IV",
    (-1, 1): "DST-IV",
}


@dataclass(frozen=True, eq=False)
class FiniteAlgebraElement:
    """Σ_i a_i P_i^(α,β) of dimension m"""

    m: int
    alpha: float
    beta: float
    coeffs: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.float64).reshape(-1)
        if coeffs.size > self.m:
            raise IndexOutOfRange(f"{coeffs.size} coefficients do not fit dimension {self.m}")
        object.__setattr__(self, "coeffs", coeffs)

    def to_dense(self) -> DenseBlock:
        return finite_element(self.coeffs, self.m, self.alpha, self.beta)


def _check_index(i: int, m: int) -> None:
    if m < 1:
        raise IndexOutOfRange(f"dimension must be positive, got {m}")
    if i < 0 or i > m - 1:
        raise IndexOutOfRange(f"basis index {i} outside 0..{m - 1}")


def finite_basis(i: int, m: int, alpha: float, beta: float) -> DenseBlock:
    """Dense P_i^(α,β) of size m×m.

    Raises:
        IndexOutOfRange: Unless 0 ≤ i ≤ m - 1
    """
    _check_index(i, m)
    if i == 0:
        return np.eye(m)
    out = np.eye(m, k=i) + np.eye(m, k=-i)
    out += hankel_block(h_vector(i, alpha).entries, m)
    out += np.flip(hankel_block(h_vector(i, beta).entries, m))
    return out


def finite_generator(m: int, alpha: float, beta: float) -> DenseBlock:
    """A_{α,β} = P_1^(α,β)"""
    if m == 1:
        return np.array([[alpha + beta]])
    return finite_basis(1, m, alpha, beta)


def finite_element(coeffs: npt.ArrayLike, m: int, alpha: float, beta: float) -> DenseBlock:
    """Σ_i a_i P_i^(α,β)"""
    c = np.asarray(coeffs, dtype=np.float64).reshape(-1)
    out = np.zeros((m, m))
    for i, ci in enumerate(c):
        if ci:
            out += ci * finite_basis(i, m, alpha, beta)
    return out


def finite_power_expand(n: int, m: int, alpha: float, beta: float) -> DenseBlock:
    """A_{α,β}^n assembled as Σ_i binom(n, i) P_{n-2i}^(α,β) + φ_n I.

    Raises:
        IndexOutOfRange: Unless 1 ≤ n ≤ m - 1
    """
    if n < 1 or n > m - 1:
        raise IndexOutOfRange(f"power {n} outside 1..{m - 1}")
    expansion = power_to_basis(n)
    out = expansion.phi * np.eye(m)
    for i, binom in enumerate(expansion.coeffs):
        out += binom * finite_basis(n - 2 * i, m, alpha, beta)
    return out


def dst1_matrix(m: int) -> DenseBlock:
    """Orthogonal DST-I, S_jk = √(2/(m+1)) sin(jkπ/(m+1))"""
    return scipy.fft.dst(np.eye(m), type=1, norm="ortho", axis=0)


def tau_eigenvalues(i: int, m: int) -> npt.NDArray[np.float64]:
    """Eigenvalues 2cos(ikπ/(m+1)), k = 1..m, of P_i^(0,0) in DST-I order; ones for i = 0"""
    _check_index(i, m)
    if i == 0:
        return np.ones(m)
    k = np.arange(1, m + 1)
    return 2.0 * np.cos(i * k * np.pi / (m + 1))


def _family(alpha: float, beta: float) -> str:
    key = (int(np.sign(alpha)), int(np.sign(beta)))
    if abs(alpha) in (0.0, 1.0) and abs(beta) in (0.0, 1.0):
        return _TRANSFORM_FAMILIES.get(key, "a DCT/DST variant")
    return "a transform not known for general alpha and beta"


def finite_diag_check(i: int, m: int, alpha: float = 0.0, beta: float = 0.0) -> float:
    """Largest off-diagonal modulus of S P_i S for the DST-I matrix S.

    Raises:
        UnsupportedTransform: Unless α = β = 0
        ValueError: If the diagonal does not match 2cos(ikπ/(m+1)) to 1e-10
    """
    if alpha != 0 or beta != 0:
        raise UnsupportedTransform(alpha, beta, _family(alpha, beta))
    s = dst1_matrix(m)
    d = s.T @ finite_basis(i, m, alpha, beta) @ s
    diag = np.diag(d)
    expected = tau_eigenvalues(i, m)
    if not np.allclose(diag, expected, rtol=0.0, atol=1e-10):
        raise ValueError(f"DST-I diagonal of P_{i} deviates by {np.abs(diag - expected).max():.3e}")
    return float(np.abs(d - np.diag(diag)).max(initial=0.0))
