"""Tests for the P_α basis machinery"""

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqt_kernel.algebra import (
    AlgebraElement,
    basis_dense,
    basis_to_power,
    basis_to_powers_combination,
    display_eta,
    eta_vector,
    generator_apply,
    generator_dense,
    h_vector,
    hankel_norm_bound,
    k_vector,
    p_alpha_norm_bound,
    power_to_basis,
    powers_to_basis_combination,
    special_case_form,
    theta,
)
from sqt_kernel.models import BadAlpha, BasisOrderError
from sqt_kernel.symbol import SymmetricSymbol

# Hypothesis strategies for PBT
alpha_strategy = st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0, 1.3])

symbol_strategy = st.lists(
    st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False), min_size=2, max_size=21
).map(SymmetricSymbol)

small_int_strategy = st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=16)


class TestHVector:
    """Test the basis vectors h_n"""

    def test_first_vector(self):
        np.testing.assert_array_equal(h_vector(1, 0.7).entries, [0.7])

    def test_unit_alpha_gives_unit_vector(self):
        np.testing.assert_array_equal(h_vector(3, 1.0).entries, [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(h_vector(3, -1.0).entries, [0.0, 0.0, -1.0])

    def test_half_alpha(self):
        # θ = -0.75: (θα, θ, α)
        np.testing.assert_allclose(h_vector(3, 0.5).entries, [-0.375, -0.75, 0.5])

    def test_zero_alpha(self):
        np.testing.assert_array_equal(h_vector(2, 0.0).entries, [-1.0, 0.0])

    def test_order_must_be_positive(self):
        with pytest.raises(ValueError):
            h_vector(0, 0.5)

    @given(n=st.integers(min_value=1, max_value=25), alpha=alpha_strategy)
    @settings(max_examples=60)
    def test_generator_recurrence(self, n: int, alpha: float):
        """A_α h_n = h_{n-1} + h_{n+1} with h_0 = e_1"""
        lhs = generator_apply(h_vector(n, alpha).entries, alpha)
        rhs = np.zeros(n + 1)
        prev = np.array([1.0]) if n == 1 else h_vector(n - 1, alpha).entries
        rhs[: prev.size] += prev
        rhs += h_vector(n + 1, alpha).entries
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_norm_formula(self):
        assert hankel_norm_bound(3, 0.5) == pytest.approx(1.625)
        assert h_vector(3, 0.5).norm1() == pytest.approx(1.625)
        assert hankel_norm_bound(7, 1.0) == pytest.approx(1.0)

    @given(n=st.integers(min_value=1, max_value=40), alpha=st.sampled_from(list(np.linspace(-1.5, 1.5, 13))))
    @settings(max_examples=100)
    def test_norm_formula_matches_entries(self, n: int, alpha: float):
        exact = h_vector(n, alpha).norm1()
        assert hankel_norm_bound(n, alpha) == pytest.approx(exact, rel=1e-12, abs=1e-300)


class TestEtaVector:
    """Test the first column of H_α(a)"""

    def test_zero_alpha_example(self):
        np.testing.assert_array_equal(eta_vector([0.0, 1.0, 1.0], 0.0).first_column, [-1.0, 0.0])

    def test_constant_symbol_has_no_hankel_part(self):
        assert eta_vector([5.0], 0.3).size == 0

    @given(a=symbol_strategy, alpha=alpha_strategy)
    @settings(max_examples=60)
    def test_equals_sum_of_basis_vectors(self, a: SymmetricSymbol, alpha: float):
        """η = Σ_n a_n h_n"""
        explicit = np.zeros(a.degree)
        for n in range(1, a.degree + 1):
            explicit[:n] += a.coeffs[n] * h_vector(n, alpha).entries
        scale = max(np.abs(explicit).max(), 1.0)
        np.testing.assert_allclose(eta_vector(a, alpha).first_column, explicit, atol=1e-11 * scale)

    @pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.0])
    def test_special_cases(self, alpha: float):
        a = SymmetricSymbol([0.3, 1.0, -2.0, 0.5])
        np.testing.assert_allclose(
            special_case_form(alpha, a).first_column, eta_vector(a, alpha).first_column, atol=1e-15
        )

    def test_special_case_needs_unit_or_zero_alpha(self):
        with pytest.raises(BadAlpha):
            special_case_form(0.5, [1.0, 2.0])

    def test_display_differs_by_subdiagonal(self):
        # a = z^2 + z^-2: the Hessenberg display gives (θ, α, 1), the basis sum (θ, α)
        alpha = 0.5
        np.testing.assert_allclose(display_eta([0.0, 0.0, 1.0], alpha), [theta(alpha), alpha, 1.0])
        np.testing.assert_allclose(eta_vector([0.0, 0.0, 1.0], alpha).first_column, [theta(alpha), alpha])


class TestChangeOfBasis:
    """Test the integer change of basis between powers of A_α and P_{n,α}"""

    def test_power_to_basis_small_orders(self):
        assert power_to_basis(2) == ((1,), 2)
        assert power_to_basis(3) == ((1, 3), 0)
        assert power_to_basis(4) == ((1, 4), 6)

    def test_basis_to_power_small_orders(self):
        assert basis_to_power(0) == (1,)
        assert basis_to_power(2) == (-2, 0, 1)
        assert basis_to_power(3) == (0, -3, 0, 1)

    def test_order_cap(self):
        with pytest.raises(BasisOrderError):
            basis_to_power(61)
        with pytest.raises(BasisOrderError):
            power_to_basis(61)

    @given(coeffs=small_int_strategy)
    @settings(max_examples=60)
    def test_round_trip(self, coeffs: list[int]):
        c = np.array(coeffs, dtype=np.int64)
        np.testing.assert_array_equal(basis_to_powers_combination(powers_to_basis_combination(c)), c)

    @pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.0, 0.5, 1.0, 1.3])
    def test_dense_powers(self, alpha: float):
        """A_α^n = Σ binom(n, i) P_{n-2i,α} + φ_n I on the leading block"""
        size, window = 48, 32
        gen = generator_dense(alpha, size)
        power = np.eye(size)
        for n in range(1, 9):
            power = power @ gen
            expansion = power_to_basis(n)
            assembled = expansion.phi * np.eye(size)
            for i, binom in enumerate(expansion.coeffs):
                assembled += binom * basis_dense(n - 2 * i, alpha, size)
            np.testing.assert_allclose(assembled[:window, :window], power[:window, :window], atol=1e-9)


class TestCompactPart:
    """Test k_n, the first column of the compact part of A_α^n"""

    def test_second_power(self):
        np.testing.assert_allclose(k_vector(2, 0.4), [0.4**2 - 1.0, 0.4])

    def test_third_power(self):
        alpha = 0.5
        t = theta(alpha)
        np.testing.assert_allclose(k_vector(3, alpha), [t * alpha + 3 * alpha, t, alpha])
        np.testing.assert_array_equal(k_vector(3, 0.0), [0.0, -1.0, 0.0])

    @given(n=st.integers(min_value=1, max_value=30), alpha=alpha_strategy)
    @settings(max_examples=60)
    def test_expansion_in_h_basis(self, n: int, alpha: float):
        k = k_vector(n, alpha)
        expected = np.zeros(n)
        for i, binom in enumerate(power_to_basis(n).coeffs):
            h = h_vector(n - 2 * i, alpha).entries
            expected[: h.size] += binom * h
        np.testing.assert_allclose(k, expected, rtol=0.0, atol=1e-10 * max(np.abs(expected).max(), 1.0))


class TestAlgebraElement:
    """Test P_α(a) elements"""

    def test_dense_basis_element(self):
        alpha = 0.5
        t = theta(alpha)
        block = basis_dense(4, alpha, 8)
        np.testing.assert_allclose(block[0, :5], [t * alpha**2, t * alpha, t, alpha, 1.0])
        assert block[4, 0] == 1.0

    def test_to_dense_matches_basis(self):
        element = AlgebraElement(0.5, SymmetricSymbol([0.0, 0.0, 0.0, 0.0, 1.0]))
        np.testing.assert_allclose(element.to_dense(8), basis_dense(4, 0.5, 8))

    def test_unbounded_alpha_warns(self, caplog: pytest.LogCaptureFixture):
        with caplog.at_level(logging.WARNING, logger="sqt.algebra"):
            element = AlgebraElement(1.5, SymmetricSymbol([1.0]))
        assert element.unbounded
        assert "not certified" in caplog.text

    def test_norm_bound(self):
        assert p_alpha_norm_bound([1.0, 1.0], 0.5) == pytest.approx(6.0)
        with pytest.raises(BadAlpha):
            p_alpha_norm_bound([1.0, 1.0], 1.5)

    def test_generator_apply(self):
        np.testing.assert_array_equal(generator_apply([1.0], 0.25), [0.25, 1.0])
