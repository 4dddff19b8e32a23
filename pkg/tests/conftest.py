"""Pytest configuration and fixtures for the quasi-Toeplitz kernel tests."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

from sqt_kernel.models import ReprMode
from sqt_kernel.sqt import SqtMatrix
from sqt_kernel.symbol import SymmetricSymbol
from sqt_kernel.verify import random_sqt, random_symbol

# Leading block compared against dense products, and the truncation it is cut from
DENSE_SIZE = 96
WINDOW = 64


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test sees the same random matrices"""
    return np.random.default_rng(20240611)


@pytest.fixture
def make_symbol(rng: np.random.Generator) -> Callable[..., SymmetricSymbol]:
    def factory(degree: int = 6, dominant: bool = False) -> SymmetricSymbol:
        return random_symbol(rng, degree, dominant)

    return factory


@pytest.fixture
def make_sqt(rng: np.random.Generator) -> Callable[..., SqtMatrix]:
    """Random quasi-Toeplitz matrices with a rank-2 correction on an 8×8 block"""

    def factory(
        mode: ReprMode = ReprMode.ALGEBRA,
        alpha: float = 0.0,
        rank: int = 2,
        dominant: bool = False,
        scale: float = 1.0,
    ) -> SqtMatrix:
        return random_sqt(rng, mode, alpha, rank=rank, dominant=dominant, scale=scale)

    return factory


@pytest.fixture
def qme_records() -> Callable[[float, float, float], str]:
    """Three scalar SQT1 records A, B, C in P_1"""

    def factory(a: float, b: float, c: float) -> str:
        return "".join(
            f"SQT1 ALG\nalpha 1\nsymbol {value!r}\ncorrection 0 0 0\n" for value in (a, b, c)
        )

    return factory
