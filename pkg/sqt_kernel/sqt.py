"""
Semi-infinite symmetric quasi-Toeplitz matrices A = P_α(a) + UVᵀ.

In ALGEBRA mode the structured part is P_α(a) = T(a) + H_α(a) and products of two
structured parts stay structured, so only the finite-support corrections need
low-rank arithmetic. TOEPLITZ mode stores A = T(a) + UVᵀ and pays for the Hankel
product H(a_-)H(b_+) in every multiplication.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.signal

from sqt_kernel.algebra import AlgebraElement, eta_vector
from sqt_kernel.constants import DEFAULT_COMPRESS_TOL, DEFAULT_INV_EPS, DEFAULT_ROW_TOL, DEFAULT_TRIM_TOL
from sqt_kernel.models import AlphaMismatch, DenseBlock, ModeMismatch, ReprMode, SingularSmallBlock
from sqt_kernel.symbol import (
    SymbolLike,
    SymmetricSymbol,
    as_symbol,
    sym_add,
    sym_inv,
    sym_mul,
    sym_scale,
    sym_trim,
)
from sqt_kernel.utils.dense import hankel_block

logger = logging.getLogger("sqt.matrix")

_MACHINE_EPS = float(np.finfo(np.float64).eps)
_ROW_BLOCK = 256
_HANKEL_SKETCH_MIN = 64
_SKETCH_START = 32
_SKETCH_SEED = 0

FloatArray = npt.NDArray[np.float64]


def _as_factor(x: npt.ArrayLike) -> FloatArray:
    arr = np.array(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"correction factors must be 2-D, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LowRankCorrection:
    """K = U Vᵀ with U of shape m×k and V of shape n×k; k = 0 is the zero correction"""

    u: FloatArray = field(default_factory=lambda: np.zeros((0, 0)))
    v: FloatArray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self) -> None:
        u, v = _as_factor(self.u), _as_factor(self.v)
        if u.shape[1] != v.shape[1]:
            raise ValueError(f"factor widths differ: {u.shape[1]} and {v.shape[1]}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def zero(cls) -> LowRankCorrection:
        return cls()

    @property
    def rank(self) -> int:
        return self.u.shape[1]

    @property
    def support(self) -> tuple[int, int]:
        """(m, n); (0, 0) for the zero correction"""
        if self.rank == 0:
            return (0, 0)
        return (self.u.shape[0], self.v.shape[0])

    def is_zero(self) -> bool:
        return self.rank == 0

    def to_dense(self, rows: int, cols: int | None = None) -> DenseBlock:
        cols = rows if cols is None else cols
        out = np.zeros((rows, cols))
        if self.rank:
            m, n = min(rows, self.u.shape[0]), min(cols, self.v.shape[0])
            out[:m, :n] = self.u[:m] @ self.v[:n].T
        return out

    def norm_inf(self) -> float:
        """Exact ∞-norm of U Vᵀ"""
        if self.rank == 0:
            return 0.0
        return float(np.abs(self.u @ self.v.T).sum(axis=1).max(initial=0.0))

    def scaled(self, s: float) -> LowRankCorrection:
        if s == 0 or self.rank == 0:
            return LowRankCorrection.zero()
        return LowRankCorrection(s * self.u, self.v)


@dataclass(frozen=True, eq=False)
class SqtMatrix:
    """A = P_α(a) + UVᵀ (ALGEBRA) or A = T(a) + UVᵀ (TOEPLITZ)"""

    mode: ReprMode
    element: AlgebraElement
    correction: LowRankCorrection = field(default_factory=LowRankCorrection.zero)

    @property
    def symbol(self) -> SymmetricSymbol:
        return self.element.symbol

    @property
    def alpha(self) -> float:
        return self.element.alpha

    @property
    def degree(self) -> int:
        return self.element.symbol.degree

    def hankel_column(self) -> FloatArray:
        """First column of the Hankel part implied by the symbol; empty in TOEPLITZ mode"""
        if self.mode is ReprMode.TOEPLITZ:
            return np.zeros(0)
        return self.element.hankel().first_column

    def __add__(self, other: SqtMatrix) -> SqtMatrix:
        return sqt_add(self, other)

    def __sub__(self, other: SqtMatrix) -> SqtMatrix:
        return sqt_sub(self, other)

    def __neg__(self) -> SqtMatrix:
        return sqt_scale(self, -1.0)

    def __mul__(self, s: float) -> SqtMatrix:
        return sqt_scale(self, float(s))

    __rmul__ = __mul__

    def __matmul__(self, other: SqtMatrix) -> SqtMatrix:
        return sqt_mul(self, other)

    def __repr__(self) -> str:
        m, n = self.correction.support
        return (
            f"SqtMatrix(mode={self.mode.value}, alpha={self.alpha:g}, degree={self.degree}, "
            f"correction={m}x{n} rank {self.correction.rank})"
        )


def _with_symbol(mode: ReprMode, alpha: float, a: SymbolLike, correction: LowRankCorrection) -> SqtMatrix:
    alpha = 0.0 if mode is ReprMode.TOEPLITZ else alpha
    return SqtMatrix(mode, AlgebraElement(alpha, as_symbol(a)), correction)


def sqt_from_symbol(alpha: float, a: SymbolLike) -> SqtMatrix:
    """P_α(a) with zero correction"""
    return _with_symbol(ReprMode.ALGEBRA, alpha, a, LowRankCorrection.zero())


def sqt_toeplitz(a: SymbolLike) -> SqtMatrix:
    """T(a) in TOEPLITZ mode with zero correction"""
    return _with_symbol(ReprMode.TOEPLITZ, 0.0, a, LowRankCorrection.zero())


def sqt_identity(mode: ReprMode = ReprMode.ALGEBRA, alpha: float = 0.0) -> SqtMatrix:
    return _with_symbol(mode, alpha, [1.0], LowRankCorrection.zero())


def sqt_with_correction(A: SqtMatrix, u: npt.ArrayLike, v: npt.ArrayLike) -> SqtMatrix:
    """A + u vᵀ, uncompressed"""
    extra = LowRankCorrection(u, v)
    return SqtMatrix(A.mode, A.element, _concat(A.correction, extra))


def _pad_rows(x: FloatArray, rows: int) -> FloatArray:
    if x.shape[0] >= rows:
        return x
    return np.vstack([x, np.zeros((rows - x.shape[0], x.shape[1]))])


def _hstack(blocks: list[FloatArray]) -> FloatArray:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return np.zeros((0, 0))
    rows = max(b.shape[0] for b in blocks)
    return np.hstack([_pad_rows(b, rows) for b in blocks])


def _concat(*parts: LowRankCorrection) -> LowRankCorrection:
    return LowRankCorrection(_hstack([p.u for p in parts]), _hstack([p.v for p in parts]))


def _trim_rows(x: FloatArray, tol: float) -> FloatArray:
    """Drop trailing rows whose ∞-norm is at most tol times the largest row norm"""
    if x.size == 0:
        return x[:0]
    norms = np.abs(x).max(axis=1)
    keep = np.flatnonzero(norms > tol * norms.max())
    return x[: int(keep[-1]) + 1] if keep.size else x[:0]


def _check_pair(A: SqtMatrix, B: SqtMatrix) -> None:
    if A.mode is not B.mode:
        raise ModeMismatch(f"cannot combine {A.mode.value} and {B.mode.value} matrices")
    if A.mode is ReprMode.ALGEBRA and A.alpha != B.alpha:
        raise AlphaMismatch(f"cannot combine alpha={A.alpha} and alpha={B.alpha}; convert explicitly")


def structured_apply(
    coeffs: npt.ArrayLike,
    eta: npt.ArrayLike,
    x: npt.ArrayLike,
    row_tol: float | None = DEFAULT_ROW_TOL,
) -> FloatArray:
    """(T(a) + H(η)) X for a tall factor X with finite support.

    The result has r + d rows before trailing rows below ``row_tol`` (relative) are
    cut; pass ``row_tol=None`` to keep the full support.
    """
    c = np.asarray(coeffs, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    r, k = x.shape
    d = c.size - 1
    if r == 0 or k == 0:
        return np.zeros((0, k))
    stencil = np.concatenate([c[:0:-1], c])
    y = scipy.signal.convolve(stencil[:, None], x)[d:]
    if eta.size:
        h = scipy.signal.convolve(eta[:, None], x[::-1])
        y[: eta.size] += h[r - 1 : r - 1 + eta.size]
    if row_tol is None:
        return y
    return _trim_rows(y, row_tol)


def _apply(A: SqtMatrix, x: FloatArray, row_tol: float | None = DEFAULT_ROW_TOL) -> FloatArray:
    """Structured part of A times a tall factor"""
    return structured_apply(A.symbol.coeffs, A.hankel_column(), x, row_tol)


def sqt_compress(k: LowRankCorrection, tol: float = DEFAULT_COMPRESS_TOL) -> LowRankCorrection:
    """Recompress U Vᵀ through thin QR factors and an SVD of the small core.

    Singular values σ_i ≤ tol·σ_1 are dropped, together with values at the rounding
    level of the inputs; √σ is put on both factors so U keeps orthogonal columns.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if k.rank == 0:
        return k
    if k.u.shape[0] == 0 or k.v.shape[0] == 0:
        return LowRankCorrection.zero()
    qu, ru = scipy.linalg.qr(k.u, mode="economic")
    qv, rv = scipy.linalg.qr(k.v, mode="economic")
    w, s, zt = scipy.linalg.svd(ru @ rv.T, full_matrices=False)
    floor = 4.0 * _MACHINE_EPS * np.linalg.norm(ru) * np.linalg.norm(rv)
    if s.size == 0 or s[0] <= floor:
        return LowRankCorrection.zero()
    keep = s > max(tol * s[0], floor)
    root = np.sqrt(s[keep])
    u = _trim_rows(qu @ (w[:, keep] * root), DEFAULT_ROW_TOL)
    v = _trim_rows(qv @ (zt[keep].T * root), DEFAULT_ROW_TOL)
    if u.shape[0] == 0 or v.shape[0] == 0:
        return LowRankCorrection.zero()
    logger.debug("compressed rank %d -> %d", k.rank, int(keep.sum()))
    return LowRankCorrection(u, v)


def sqt_add(A: SqtMatrix, B: SqtMatrix, tol: float = DEFAULT_COMPRESS_TOL) -> SqtMatrix:
    """A + B: symbols add, corrections are concatenated and recompressed.

    Raises:
        ModeMismatch: If A and B use different representations
        AlphaMismatch: If ALGEBRA-mode operands have different α
    """
    _check_pair(A, B)
    correction = sqt_compress(_concat(A.correction, B.correction), tol)
    return _with_symbol(A.mode, A.alpha, sym_add(A.symbol, B.symbol), correction)


def sqt_scale(A: SqtMatrix, s: float) -> SqtMatrix:
    return _with_symbol(A.mode, A.alpha, sym_scale(A.symbol, s), A.correction.scaled(s))


def sqt_sub(A: SqtMatrix, B: SqtMatrix, tol: float = DEFAULT_COMPRESS_TOL) -> SqtMatrix:
    return sqt_add(A, sqt_scale(B, -1.0), tol)


def _hankel_product_factors(
    a: SymmetricSymbol, b: SymmetricSymbol, sketch_tol: float | None = None
) -> LowRankCorrection:
    """-H(a_-)H(b_+) as a factor pair.

    Without ``sketch_tol``, or up to ``_HANKEL_SKETCH_MIN`` columns, the exact Hankel
    blocks are returned, width min(d_a, d_b). Otherwise a seeded randomized range sketch
    is used whose width doubles until its trailing singular value drops below sketch_tol.
    """
    kmin = min(a.degree, b.degree)
    if kmin == 0:
        return LowRankCorrection.zero()
    ha = hankel_block(a.plus_part(), a.degree, kmin)
    hb = hankel_block(b.plus_part(), b.degree, kmin)
    if sketch_tol is None or kmin <= _HANKEL_SKETCH_MIN:
        return LowRankCorrection(-ha, hb)
    rng = np.random.default_rng(_SKETCH_SEED)
    floor = max(sketch_tol, 16.0 * _MACHINE_EPS)
    p = _SKETCH_START
    while p < kmin:
        omega = rng.standard_normal((hb.shape[0], p))
        q, _ = scipy.linalg.qr(ha @ (hb.T @ omega), mode="economic")
        sketch = hb @ (ha.T @ q)
        s = scipy.linalg.svd(sketch, compute_uv=False)
        if s[0] == 0.0 or s[-1] <= floor * s[0]:
            logger.debug("hankel product of width %d sketched to %d columns", kmin, p)
            return LowRankCorrection(-q, sketch)
        p *= 2
    return LowRankCorrection(-ha, hb)


def product_correction(A: SqtMatrix, B: SqtMatrix) -> LowRankCorrection:
    """Uncompressed correction of A·B.

    ALGEBRA mode: [P(a)U_B | U_A] [V_B | P(b)V_A + V_B(U_BᵀV_A)]ᵀ, width k_A + k_B.
    TOEPLITZ mode appends the factored -H(a_-)H(b_+), width k_A + k_B + min(d_a, d_b).
    """
    return _product_factors(A, B, None)


def _product_factors(A: SqtMatrix, B: SqtMatrix, sketch_tol: float | None) -> LowRankCorrection:
    _check_pair(A, B)
    ka, kb = A.correction, B.correction
    parts: list[LowRankCorrection] = []
    if kb.rank:
        parts.append(LowRankCorrection(_apply(A, kb.u), kb.v))
    if ka.rank:
        right = _apply(B, ka.v)
        if kb.rank:
            inner_len = max(ka.v.shape[0], kb.u.shape[0])
            cross = _pad_rows(kb.u, inner_len).T @ _pad_rows(ka.v, inner_len)
            extra = kb.v @ cross
            rows = max(right.shape[0], extra.shape[0])
            right = _pad_rows(right, rows) + _pad_rows(extra, rows)
        parts.append(LowRankCorrection(ka.u, right))
    if A.mode is ReprMode.TOEPLITZ:
        parts.append(_hankel_product_factors(A.symbol, B.symbol, sketch_tol))
    if not parts:
        return LowRankCorrection.zero()
    return _concat(*parts)


def sqt_mul(A: SqtMatrix, B: SqtMatrix, tol: float = DEFAULT_COMPRESS_TOL) -> SqtMatrix:
    """A·B with symbol a·b and the recompressed ``product_correction``.

    Wide TOEPLITZ-mode Hankel products are sketched to tol before the recompression.

    Raises:
        ModeMismatch: If A and B use different representations
        AlphaMismatch: If ALGEBRA-mode operands have different α
    """
    correction = sqt_compress(_product_factors(A, B, tol), tol)
    return _with_symbol(A.mode, A.alpha, sym_mul(A.symbol, B.symbol), correction)


def sqt_inv(A: SqtMatrix, eps: float = DEFAULT_INV_EPS, tol: float = DEFAULT_COMPRESS_TOL) -> SqtMatrix:
    """Inverse through the symbol inverse c = 1/a and a Sherman-Woodbury-Morrison update.

    With S = P_α(c) (or T(c)) the product A·S equals I + XYᵀ for finite factors X, Y;
    then A⁻¹ = S - (S X)(I + YᵀX)⁻¹ Yᵀ. In TOEPLITZ mode X and Y also carry the Hankel
    factors of T(a)T(c) = I - H(a_-)H(c_+), sketched to tol when wide.

    Raises:
        IllConditioned: If the symbol is numerically singular on the unit circle
        ZeroOnCircle: If the symbol vanishes at a grid point
        SingularSmallBlock: If the capacitance matrix I + YᵀX is singular
    """
    c, cond = sym_inv(A.symbol, eps)
    s = _with_symbol(A.mode, A.alpha, c, LowRankCorrection.zero())
    x_parts: list[FloatArray] = []
    y_parts: list[FloatArray] = []
    if A.mode is ReprMode.TOEPLITZ:
        hank = _hankel_product_factors(A.symbol, c, tol)
        if hank.rank:
            x_parts.append(hank.u)
            y_parts.append(hank.v)
    if A.correction.rank:
        x_parts.append(A.correction.u)
        y_parts.append(_apply(s, A.correction.v))
    if not x_parts:
        return s
    x, y = _hstack(x_parts), _hstack(y_parts)
    inner = max(x.shape[0], y.shape[0])
    cap = np.eye(x.shape[1]) + _pad_rows(y, inner).T @ _pad_rows(x, inner)
    cap_cond = np.linalg.cond(cap)
    if not np.isfinite(cap_cond) or cap_cond > 1.0 / _MACHINE_EPS:
        raise SingularSmallBlock(
            "capacitance matrix of the low-rank update is singular", cond=float(cap_cond)
        )
    sx = _apply(s, x)
    w = -scipy.linalg.solve(cap.T, sx.T).T
    logger.debug("inverse: symbol cond %.3e, capacitance cond %.3e", cond, cap_cond)
    return SqtMatrix(s.mode, s.element, sqt_compress(LowRankCorrection(w, y), tol))


def sqt_convert(
    A: SqtMatrix, target: ReprMode, alpha: float = 0.0, tol: float = DEFAULT_COMPRESS_TOL
) -> SqtMatrix:
    """Re-express the same matrix in ``target`` mode (with ``alpha`` for ALGEBRA).

    The correction absorbs H(η_old) - H(η_new), where η is empty in TOEPLITZ mode.
    """
    new_alpha = 0.0 if target is ReprMode.TOEPLITZ else float(alpha)
    if target is A.mode and new_alpha == A.alpha:
        return A
    old_eta = A.hankel_column()
    new_eta = np.zeros(0) if target is ReprMode.TOEPLITZ else eta_vector(A.symbol, new_alpha).first_column
    d = max(old_eta.size, new_eta.size)
    delta = np.zeros(d)
    delta[: old_eta.size] += old_eta
    delta[: new_eta.size] -= new_eta
    correction = A.correction
    if d and np.any(delta):
        jump = LowRankCorrection(hankel_block(delta, d), np.eye(d))
        correction = sqt_compress(_concat(correction, jump), tol)
    return _with_symbol(target, new_alpha, A.symbol, correction)


def sqt_truncate(
    A: SqtMatrix, trim_tol: float = DEFAULT_TRIM_TOL, tol: float = DEFAULT_COMPRESS_TOL
) -> SqtMatrix:
    """Trim the symbol and recompress the correction"""
    return SqtMatrix(
        A.mode,
        AlgebraElement(A.alpha, sym_trim(A.symbol, trim_tol)),
        sqt_compress(A.correction, tol),
    )


def _dense_rows(A: SqtMatrix, start: int, stop: int, cols: int) -> DenseBlock:
    """Rows start..stop-1 and columns 0..cols-1 of A"""
    rows = np.arange(start, stop)
    cidx = np.arange(cols)
    c = A.symbol.coeffs
    d = c.size - 1
    lag = np.abs(np.subtract.outer(rows, cidx))
    out = np.where(lag <= d, c[np.minimum(lag, d)], 0.0)
    eta = A.hankel_column()
    if eta.size and start < eta.size:
        anti = np.add.outer(rows, cidx)
        out += np.where(anti < eta.size, eta[np.minimum(anti, eta.size - 1)], 0.0)
    k = A.correction
    if k.rank and start < k.u.shape[0]:
        m = min(stop, k.u.shape[0])
        n = min(cols, k.v.shape[0])
        out[: m - start, :n] += k.u[start:m] @ k.v[:n].T
    return out


def sqt_to_dense(A: SqtMatrix, size: int) -> DenseBlock:
    """Leading size×size block of A"""
    if size < 1:
        raise ValueError(f"size must be positive, got {size}")
    return _dense_rows(A, 0, size, size)


def row_sums(A: SqtMatrix, rows: int) -> FloatArray:
    """Σ_j A[i, j] for the first ``rows`` rows"""
    cols = rows + A.degree + A.correction.support[1]
    return np.concatenate(
        [_dense_rows(A, s, min(s + _ROW_BLOCK, rows), cols).sum(axis=1) for s in range(0, rows, _ROW_BLOCK)]
    )


def sqt_norm_inf(A: SqtMatrix) -> float:
    """Exact ∞-norm.

    Rows past N_0 = max(d, m) are pure Toeplitz with the full stencil and all sum to
    ‖a‖_W; the leading N_0 rows are summed explicitly.
    """
    d = A.degree
    m, n = A.correction.support
    n0 = max(d, m)
    best = A.symbol.wiener_norm()
    cols = max(n0 + d, n)
    for s in range(0, n0, _ROW_BLOCK):
        block = _dense_rows(A, s, min(s + _ROW_BLOCK, n0), cols)
        best = max(best, float(np.abs(block).sum(axis=1).max()))
    return best


def sqt_matvec(A: SqtMatrix, x: npt.ArrayLike) -> FloatArray:
    """y = A x for a finite vector x; y has |x| + d entries (longer if the correction reaches further)"""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = _apply(A, x[:, None], row_tol=None)[:, 0]
    k = A.correction
    if k.rank and x.size:
        n = min(x.size, k.v.shape[0])
        ky = k.u @ (k.v[:n].T @ x[:n])
        if ky.size > y.size:
            y = np.concatenate([y, np.zeros(ky.size - y.size)])
        y[: ky.size] += ky
    return y
