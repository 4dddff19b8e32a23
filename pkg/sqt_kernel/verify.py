"""Self-check suites run by ``sqt verify``.

Each property returns the observed error and its tolerance; suites are deterministic
for a given seed.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import NamedTuple

import numpy as np

from sqt_kernel.algebra import (
    basis_dense,
    basis_to_power,
    basis_to_powers_combination,
    eta_vector,
    generator_apply,
    generator_dense,
    h_vector,
    hankel_norm_bound,
    k_vector,
    power_to_basis,
    powers_to_basis_combination,
    special_case_form,
)
from sqt_kernel.finite import (
    dst1_matrix,
    finite_basis,
    finite_diag_check,
    finite_generator,
    finite_power_expand,
)
from sqt_kernel.models import ReprMode
from sqt_kernel.serialization import read_sqt, write_sqt
from sqt_kernel.sqt import (
    SqtMatrix,
    product_correction,
    sqt_add,
    sqt_convert,
    sqt_from_symbol,
    sqt_inv,
    sqt_mul,
    sqt_norm_inf,
    sqt_sub,
    sqt_to_dense,
    sqt_toeplitz,
    sqt_with_correction,
)
from sqt_kernel.symbol import SymmetricSymbol, convolve_symbols, sym_inv, sym_mul
from sqt_kernel.utils.dense import relative_inf_error

logger = logging.getLogger("sqt.verify")

ALPHA_GRID: tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0, 1.3)
FINITE_GRID: tuple[float, ...] = (-1.0, 0.0, 0.5, 1.0)


class PropertyResult(NamedTuple):
    """Outcome of one property check"""

    suite: str
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error)) and self.error <= self.tolerance


Check = Callable[[np.random.Generator], tuple[float, float]]


def random_symbol(rng: np.random.Generator, degree: int, dominant: bool = False) -> SymmetricSymbol:
    """Coefficients uniform in [-1, 1]; ``dominant`` makes a(z) ≥ 1 on the unit circle"""
    c = rng.uniform(-1.0, 1.0, degree + 1)
    if dominant:
        c[0] = 1.0 + 2.0 * np.abs(c[1:]).sum()
    return SymmetricSymbol(c)


def random_sqt(
    rng: np.random.Generator,
    mode: ReprMode,
    alpha: float,
    degree: int = 6,
    rank: int = 2,
    support: int = 8,
    dominant: bool = False,
    scale: float = 1.0,
) -> SqtMatrix:
    a = random_symbol(rng, degree, dominant)
    base = sqt_from_symbol(alpha, a) if mode is ReprMode.ALGEBRA else sqt_toeplitz(a)
    if rank == 0:
        return base
    u = scale * rng.uniform(-1.0, 1.0, (support, rank))
    v = rng.uniform(-1.0, 1.0, (support, rank))
    return sqt_with_correction(base, u, v)


# basis suite


def _generator_recurrence(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for alpha in (0.0, 0.5, -0.5, 1.0, -1.0, 2.0):
        prev = np.array([1.0])
        for n in range(1, 31):
            h = h_vector(n, alpha).entries
            lhs = generator_apply(h, alpha)
            rhs = np.zeros(n + 2)
            rhs[: prev.size] += prev
            rhs[: n + 1] += h_vector(n + 1, alpha).entries
            err = max(err, float(np.abs(np.append(lhs, 0.0) - rhs).max()))
            prev = h
    return err, 1e-13 * 2.0**31


def _compact_part(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for alpha in ALPHA_GRID:
        for n in range(1, 31):
            k = k_vector(n, alpha)
            expected = np.zeros(n)
            for i, binom in enumerate(power_to_basis(n).coeffs):
                h = h_vector(n - 2 * i, alpha).entries
                expected[: h.size] += binom * h
            err = max(err, float(np.abs(k - expected).max() / max(np.abs(expected).max(), 1.0)))
    return err, 1e-10


def _power_identity(rng: np.random.Generator) -> tuple[float, float]:
    size, window = 96, 64
    err = 0.0
    for alpha in ALPHA_GRID:
        gen = generator_dense(alpha, size)
        power = np.eye(size)
        for n in range(1, 13):
            power = power @ gen
            expansion = power_to_basis(n)
            assembled = expansion.phi * np.eye(size)
            for i, binom in enumerate(expansion.coeffs):
                assembled += binom * basis_dense(n - 2 * i, alpha, size)
            err = max(err, relative_inf_error(assembled[:window, :window], power[:window, :window]))
    return err, 1e-9


def _norm_formula(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for alpha in np.linspace(-1.5, 1.5, 13):
        for n in range(1, 41):
            exact = h_vector(n, alpha).norm1()
            err = max(err, abs(exact - hankel_norm_bound(n, alpha)) / max(exact, 1e-300))
    return err, 1e-13


def _change_of_basis(rng: np.random.Generator) -> tuple[float, float]:
    bad = 0
    for n in range(21):
        b = np.zeros(n + 1, dtype=np.int64)
        b[n] = 1
        bad += int(np.any(powers_to_basis_combination(basis_to_powers_combination(b)) != b))
        bad += int(np.any(basis_to_powers_combination(b) != np.asarray(basis_to_power(n))))
    coeffs = rng.integers(-5, 6, 21)
    bad += int(np.any(basis_to_powers_combination(powers_to_basis_combination(coeffs)) != coeffs))
    return float(bad), 0.0


def _eta_sum(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for alpha in ALPHA_GRID:
        for _ in range(5):
            a = random_symbol(rng, int(rng.integers(1, 21)))
            explicit = np.zeros(a.degree)
            for n in range(1, a.degree + 1):
                explicit[:n] += a.coeffs[n] * h_vector(n, alpha).entries
            eta = eta_vector(a, alpha).first_column
            err = max(err, float(np.abs(eta - explicit).max() / max(np.abs(explicit).max(), 1.0)))
    for alpha in (-1.0, 0.0, 1.0):
        a = random_symbol(rng, 12)
        closed = special_case_form(alpha, a).first_column
        err = max(err, float(np.abs(closed - eta_vector(a, alpha).first_column).max()))
    return err, 1e-13


# algebra suite


def _closure(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for _ in range(100):
        alpha = float(rng.choice(ALPHA_GRID[:5]))
        a = random_symbol(rng, int(rng.integers(0, 17)))
        b = random_symbol(rng, int(rng.integers(0, 17)))
        product = sqt_mul(sqt_from_symbol(alpha, a), sqt_from_symbol(alpha, b), tol=1e-13)
        if product.correction.rank:
            return float("inf"), 1e-12
        oracle = convolve_symbols(a, b)
        n = max(oracle.size, product.symbol.size)
        scale = max(np.abs(oracle.coeffs).max(), 1.0)
        err = max(err, float(np.abs(product.symbol.padded(n) - oracle.padded(n)).max() / scale))
    return err, 1e-12


def _dense_closure(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for alpha in ALPHA_GRID[:5]:
        a = random_symbol(rng, 8)
        b = random_symbol(rng, 8)
        big = sqt_to_dense(sqt_from_symbol(alpha, a), 96) @ sqt_to_dense(sqt_from_symbol(alpha, b), 96)
        structured = sqt_to_dense(sqt_from_symbol(alpha, sym_mul(a, b)), 64)
        err = max(err, relative_inf_error(structured, big[:64, :64]))
    return err, 1e-12


def _inversion(rng: np.random.Generator) -> tuple[float, float]:
    c, cond = sym_inv([3.0, 1.0], 1e-14)
    r = convolve_symbols([3.0, 1.0], c)
    residual = float(np.abs(r.padded(r.size) - np.eye(1, r.size)[0]).max())
    return max(abs(cond - 5.0) / 5.0, residual, abs(c.coeffs[0] - 5**-0.5)), 1e-14


# sqt suite


def _random_pair(rng: np.random.Generator, mode: ReprMode) -> tuple[SqtMatrix, SqtMatrix]:
    alpha = float(rng.choice((-1.0, -0.5, 0.0, 0.5, 1.0))) if mode is ReprMode.ALGEBRA else 0.0
    return random_sqt(rng, mode, alpha), random_sqt(rng, mode, alpha)


def _oracle(rng: np.random.Generator) -> tuple[float, float]:
    size, window = 96, 64
    err = 0.0
    for mode in ReprMode:
        for _ in range(5):
            a, b = _random_pair(rng, mode)
            da, db = sqt_to_dense(a, size), sqt_to_dense(b, size)
            total = sqt_to_dense(sqt_add(a, b), window)
            err = max(err, relative_inf_error(total, (da + db)[:window, :window]))
            product = sqt_to_dense(sqt_mul(a, b), window)
            err = max(err, relative_inf_error(product, (da @ db)[:window, :window]))
    return err, 1e-10


def _rank_bounds(rng: np.random.Generator) -> tuple[float, float]:
    bad = 0
    for mode in ReprMode:
        for _ in range(5):
            a, b = _random_pair(rng, mode)
            width = product_correction(a, b).rank
            expected = a.correction.rank + b.correction.rank
            if mode is ReprMode.TOEPLITZ:
                expected += min(a.degree, b.degree)
            bad += int(width != expected)
    return float(bad), 0.0


def _inverse(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for mode in ReprMode:
        for _ in range(3):
            alpha = float(rng.choice((-0.5, 0.0, 0.5, 1.0))) if mode is ReprMode.ALGEBRA else 0.0
            a = random_sqt(rng, mode, alpha, dominant=True, scale=0.01)
            prod = sqt_mul(a, sqt_inv(a))
            err = max(err, float(np.abs(sqt_to_dense(prod, 48) - np.eye(48)).sum(axis=1).max()))
    return err, 1e-10


def _mode_equivalence(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for _ in range(5):
        alpha = float(rng.choice((-1.0, 0.0, 0.5, 1.0)))
        a, b = random_sqt(rng, ReprMode.ALGEBRA, alpha), random_sqt(rng, ReprMode.ALGEBRA, alpha)
        direct = sqt_mul(a, b)
        via = sqt_mul(sqt_convert(a, ReprMode.TOEPLITZ), sqt_convert(b, ReprMode.TOEPLITZ))
        back = sqt_convert(via, ReprMode.ALGEBRA, alpha)
        diff = sqt_sub(direct, back)
        err = max(err, sqt_norm_inf(diff) / max(sqt_norm_inf(direct), 1.0))
    return err, 1e-10


def _format_round_trip(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for mode in ReprMode:
        a = random_sqt(rng, mode, 0.5 if mode is ReprMode.ALGEBRA else 0.0, rank=3)
        b = read_sqt(write_sqt(a))
        err = max(err, float(np.abs(sqt_to_dense(a, 24) - sqt_to_dense(b, 24)).max()))
    return err, 0.0


# finite suite


def _finite_powers(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for m in (12, 32):
        for alpha in FINITE_GRID:
            for beta in FINITE_GRID:
                gen = finite_generator(m, alpha, beta)
                power = np.eye(m)
                for n in range(1, 9):
                    power = power @ gen
                    err = max(err, relative_inf_error(finite_power_expand(n, m, alpha, beta), power))
    return err, 1e-11


def _dst(rng: np.random.Generator) -> tuple[float, float]:
    err = max(finite_diag_check(i, 64) for i in range(6))
    s = dst1_matrix(64)
    err = max(err, float(np.abs(s @ s - np.eye(64)).max()))
    return err, 1e-10


def _finite_closure(rng: np.random.Generator) -> tuple[float, float]:
    """P_i P_j is a least-squares combination of the basis with zero residual"""
    m = 8
    err = 0.0
    for _ in range(4):
        alpha, beta = rng.uniform(-1.0, 1.0, 2)
        basis = np.stack([finite_basis(k, m, alpha, beta).ravel() for k in range(m)], axis=1)
        for i in range(1, m):
            for j in range(i, m):
                prod = (finite_basis(i, m, alpha, beta) @ finite_basis(j, m, alpha, beta)).ravel()
                coeffs = np.linalg.lstsq(basis, prod, rcond=None)[0]
                err = max(err, float(np.abs(basis @ coeffs - prod).max()))
    return err, 1e-10


def _persymmetry(rng: np.random.Generator) -> tuple[float, float]:
    err = 0.0
    for i in range(1, 8):
        alpha, beta = rng.uniform(-1.0, 1.0, 2)
        left = np.flip(finite_basis(i, 8, alpha, beta))
        err = max(err, float(np.abs(left - finite_basis(i, 8, beta, alpha)).max()))
    return err, 1e-14


SUITES: dict[str, dict[str, Check]] = {
    "basis": {
        "generator recurrence of h_n": _generator_recurrence,
        "compact part of A^n in the h basis": _compact_part,
        "powers of A in the P basis (dense)": _power_identity,
        "norm of H_n": _norm_formula,
        "integer change of basis round trip": _change_of_basis,
        "eta equals sum of h_n": _eta_sum,
    },
    "algebra": {
        "closure of zero-correction products": _closure,
        "dense closure": _dense_closure,
        "laurent inversion": _inversion,
    },
    "sqt": {
        "dense oracle coherence": _oracle,
        "pre-compression rank bounds": _rank_bounds,
        "inverse residual": _inverse,
        "mode equivalence": _mode_equivalence,
        "SQT1 round trip": _format_round_trip,
    },
    "finite": {
        "power expansion": _finite_powers,
        "DST-I diagonalization": _dst,
        "closure of basis products": _finite_closure,
        "persymmetry": _persymmetry,
    },
}


def run_suite(suite: str, seed: int = 0) -> list[PropertyResult]:
    """Run one suite (or ``all``) with a fixed seed

    Raises:
        KeyError: For an unknown suite name
    """
    names = list(SUITES) if suite == "all" else [suite]
    results: list[PropertyResult] = []
    for name in names:
        rng = np.random.default_rng(seed)
        for prop, check in SUITES[name].items():
            error, tol = check(rng)
            result = PropertyResult(name, prop, error, tol)
            logger.debug("%s / %s: error %.3e (tol %.1e)", name, prop, error, tol)
            results.append(result)
    return results
