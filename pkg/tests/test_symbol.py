"""Tests for symmetric Laurent polynomial arithmetic"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqt_kernel.constants import DEFAULT_INV_EPS
from sqt_kernel.models import AsymmetryDetected, BadGridSize, DomainFault, IllConditioned, NoConvergence
from sqt_kernel.symbol import (
    GridValues,
    SymmetricSymbol,
    convolve_symbols,
    sym_add,
    sym_eval_grid,
    sym_interp_grid,
    sym_inv,
    sym_map_grid,
    sym_mul,
    sym_scale,
    sym_sub,
    sym_trim,
)

# Hypothesis strategies for PBT
coefficient_strategy = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)

symbol_strategy = st.lists(coefficient_strategy, min_size=1, max_size=12).map(SymmetricSymbol)

# Diagonally dominant symbols: a(z) ≥ 1 everywhere on the unit circle
dominant_strategy = st.lists(coefficient_strategy, min_size=1, max_size=10).map(
    lambda c: SymmetricSymbol([1.0 + 2.0 * sum(abs(x) for x in c), *c])
)


def _same(a: SymmetricSymbol, b: SymmetricSymbol, atol: float) -> bool:
    n = max(a.size, b.size)
    return bool(np.allclose(a.padded(n), b.padded(n), rtol=0.0, atol=atol))


class TestSymmetricSymbol:
    """Test the coefficient container"""

    def test_degree_and_size(self):
        a = SymmetricSymbol([1.0, 2.0, 3.0])
        assert a.degree == 2
        assert a.size == 3
        assert len(a) == 3

    def test_wiener_norm_and_value_at_one(self):
        a = SymmetricSymbol([1.0, -2.0, 3.0])
        assert a.wiener_norm() == pytest.approx(11.0)
        assert a.value_at_one() == pytest.approx(3.0)

    def test_laurent_vector(self):
        a = SymmetricSymbol([3.0, 2.0, 1.0])
        np.testing.assert_array_equal(a.laurent(), [1.0, 2.0, 3.0, 2.0, 1.0])

    def test_coefficients_are_read_only(self):
        a = SymmetricSymbol([1.0, 2.0])
        with pytest.raises(ValueError):
            a.coeffs[0] = 5.0

    def test_empty_symbol_rejected(self):
        with pytest.raises(ValueError):
            SymmetricSymbol([])

    def test_operators(self):
        a = SymmetricSymbol([1.0, 2.0])
        b = SymmetricSymbol([3.0])
        np.testing.assert_allclose((a + b).coeffs, [4.0, 2.0])
        np.testing.assert_allclose((a - 1.0).coeffs, [0.0, 2.0])
        np.testing.assert_allclose((1.0 - a).coeffs, [0.0, -2.0])
        np.testing.assert_allclose((2.0 * a).coeffs, [2.0, 4.0])
        np.testing.assert_allclose((-a).coeffs, [-1.0, -2.0])


class TestTrimAndLinear:
    """Test trimming, addition and scaling"""

    def test_trim_drops_small_tail(self):
        assert sym_trim([1.0, 0.5, 1e-20]).size == 2

    def test_trim_keeps_constant(self):
        np.testing.assert_array_equal(sym_trim([0.0, 0.0, 0.0]).coeffs, [0.0])

    def test_add_pads_shorter_operand(self):
        np.testing.assert_array_equal(sym_add([1.0, 2.0], [3.0]).coeffs, [4.0, 2.0])

    def test_exact_cancellation_is_trimmed(self):
        np.testing.assert_array_equal(sym_add([1.0, 2.0], [0.0, -2.0]).coeffs, [1.0])

    def test_sub_and_scale(self):
        np.testing.assert_array_equal(sym_sub([1.0, 2.0], [1.0, 1.0]).coeffs, [0.0, 1.0])
        np.testing.assert_array_equal(sym_scale([1.0, 2.0], 0.0).coeffs, [0.0])


class TestMultiplication:
    """Test FFT products against direct convolution"""

    def test_square_of_generator(self):
        # (z + 1/z)^2 = z^2 + 2 + z^-2
        np.testing.assert_allclose(sym_mul([0.0, 1.0], [0.0, 1.0]).coeffs, [2.0, 0.0, 1.0], atol=1e-14)

    def test_constant_product(self):
        np.testing.assert_allclose(sym_mul([2.0], [3.0]).coeffs, [6.0])

    @given(a=symbol_strategy, b=symbol_strategy)
    @settings(max_examples=100)
    def test_matches_convolution(self, a: SymmetricSymbol, b: SymmetricSymbol):
        """FFT product equals the convolution of the coefficient vectors"""
        scale = max(a.wiener_norm() * b.wiener_norm(), 1.0)
        assert _same(sym_mul(a, b, tol=0.0), convolve_symbols(a, b), 1e-13 * scale)

    @given(a=symbol_strategy, b=symbol_strategy)
    @settings(max_examples=50)
    def test_commutative(self, a: SymmetricSymbol, b: SymmetricSymbol):
        scale = max(a.wiener_norm() * b.wiener_norm(), 1.0)
        assert _same(sym_mul(a, b, tol=0.0), sym_mul(b, a, tol=0.0), 1e-13 * scale)


class TestGrid:
    """Test evaluation on and interpolation from root-of-unity grids"""

    def test_values_in_grid_order(self):
        # ω = i: a(i) = 3, a(-1) = 1, a(-i) = 3, a(1) = 5
        values = sym_eval_grid([3.0, 1.0], 4).values
        np.testing.assert_allclose(values, [3.0, 1.0, 3.0, 5.0], atol=1e-14)

    def test_grid_must_be_power_of_two(self):
        with pytest.raises(BadGridSize):
            sym_eval_grid([1.0, 2.0, 3.0], 6)

    def test_grid_must_exceed_degree(self):
        with pytest.raises(BadGridSize):
            sym_eval_grid([1.0, 2.0, 3.0], 2)

    def test_grid_values_length_checked(self):
        with pytest.raises(BadGridSize):
            GridValues(4, np.ones(3))

    def test_nyquist_coefficient_is_halved(self):
        # z^2 + z^-2 takes the values 2(-1)^k on the 4-point grid
        a = sym_interp_grid(sym_eval_grid([0.0, 0.0, 1.0], 4))
        np.testing.assert_allclose(a.coeffs, [0.0, 0.0, 1.0], atol=1e-15)

    def test_asymmetric_values_rejected(self):
        with pytest.raises(AsymmetryDetected):
            sym_interp_grid(GridValues(4, np.array([1.0, 2.0, 3.0, 4.0])))

    @given(a=st.lists(coefficient_strategy, min_size=1, max_size=8).map(SymmetricSymbol))
    @settings(max_examples=50)
    def test_interpolation_recovers_symbol(self, a: SymmetricSymbol):
        back = sym_interp_grid(sym_eval_grid(a, 16), tol=0.0)
        assert _same(back, a, 1e-14 * max(a.wiener_norm(), 1.0))


class TestInverse:
    """Test Laurent polynomial inversion"""

    def test_three_plus_generator(self):
        # 1/(3 + z + 1/z) has coefficients r^|k|/√5 with r = (√5 - 3)/2
        c, cond = sym_inv([3.0, 1.0], 1e-14)
        r = (5**0.5 - 3.0) / 2.0
        assert cond == pytest.approx(5.0, rel=1e-12)
        assert c.coeffs[0] == pytest.approx(5**-0.5, rel=1e-13)
        assert c.coeffs[1] == pytest.approx(r * 5**-0.5, rel=1e-12)

    def test_constant(self):
        c, cond = sym_inv([2.0])
        np.testing.assert_allclose(c.coeffs, [0.5])
        assert cond == pytest.approx(1.0)

    def test_zero_on_circle(self):
        with pytest.raises(IllConditioned):
            sym_inv([0.0, 1.0])

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            sym_inv([3.0, 1.0], eps=0.0)

    def test_grid_cap(self):
        with pytest.raises(NoConvergence):
            sym_inv([3.0, 1.0], max_grid=2)

    def test_default_eps_is_met(self):
        c, _ = sym_inv([3.0, 1.0])
        r = convolve_symbols([3.0, 1.0], c)
        assert _same(r, SymmetricSymbol([1.0]), DEFAULT_INV_EPS)

    def test_eps_below_rounding_floor_refines(self):
        # no grid reaches 1e-17; the floor path refines once and returns
        c, cond = sym_inv([3.0, 1.0], 1e-17)
        r = (5**0.5 - 3.0) / 2.0
        expected = SymmetricSymbol([5**-0.5 * r**k for k in range(c.size)])
        assert cond == pytest.approx(5.0, rel=1e-12)
        assert _same(c, expected, 1e-15)
        assert _same(convolve_symbols([3.0, 1.0], c), SymmetricSymbol([1.0]), 1e-14)

    @given(a=dominant_strategy)
    @settings(max_examples=50)
    def test_residual_is_small(self, a: SymmetricSymbol):
        """a·(1/a) = 1 coefficientwise"""
        c, _ = sym_inv(a, 1e-14)
        r = convolve_symbols(a, c)
        assert _same(r, SymmetricSymbol([1.0]), 1e-12)


class TestMapGrid:
    """Test adaptive function approximation"""

    def test_constant_square_root(self):
        np.testing.assert_allclose(sym_map_grid([4.0], np.sqrt).coeffs, [2.0])

    def test_exact_square(self):
        # (z + 3 + 1/z)^2 = z^2 + 6z + 11 + 6/z + 1/z^2
        g = sym_map_grid([11.0, 6.0, 1.0], np.sqrt, tol=1e-14)
        np.testing.assert_allclose(g.padded(2), [3.0, 1.0], atol=1e-13)
        assert g.size <= 3

    def test_domain_fault(self):
        with pytest.raises(DomainFault):
            sym_map_grid([0.0, 1.0], np.sqrt)

    def test_grid_cap(self):
        with pytest.raises(NoConvergence):
            sym_map_grid([3.0, 1.0], np.reciprocal, tol=1e-15, max_grid=8)
