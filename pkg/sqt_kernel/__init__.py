"""Structured arithmetic for semi-infinite symmetric quasi-Toeplitz matrices"""

from sqt_kernel.algebra import AlgebraElement, BasisVector, HankelBlock, eta_vector, h_vector, power_to_basis
from sqt_kernel.finite import FiniteAlgebraElement, finite_basis, finite_diag_check, finite_power_expand
from sqt_kernel.models import (
    AlphaMismatch,
    IllConditioned,
    ModeMismatch,
    NoConvergence,
    ReprMode,
    SolveReport,
    SqtError,
    SqtFormatError,
)
from sqt_kernel.serialization import read_sqt, read_sqt_records, write_sqt
from sqt_kernel.solvers import (
    QmeProblem,
    QmeVariant,
    SolverConfig,
    qme_solve,
    qme_symbol_solve,
    sqrt_solve,
    sqrt_symbol_solve,
)
from sqt_kernel.sqt import (
    LowRankCorrection,
    SqtMatrix,
    sqt_add,
    sqt_compress,
    sqt_convert,
    sqt_from_symbol,
    sqt_inv,
    sqt_mul,
    sqt_norm_inf,
    sqt_to_dense,
    sqt_toeplitz,
)
from sqt_kernel.symbol import GridValues, SymmetricSymbol, sym_inv, sym_map_grid, sym_mul

__all__ = [
    "SymmetricSymbol",
    "GridValues",
    "sym_mul",
    "sym_inv",
    "sym_map_grid",
    # Algebra basis
    "AlgebraElement",
    "BasisVector",
    "HankelBlock",
    "h_vector",
    "eta_vector",
    "power_to_basis",
    # Matrices
    "ReprMode",
    "SqtMatrix",
    "LowRankCorrection",
    "sqt_from_symbol",
    "sqt_toeplitz",
    "sqt_add",
    "sqt_mul",
    "sqt_inv",
    "sqt_compress",
    "sqt_convert",
    "sqt_to_dense",
    "sqt_norm_inf",
    "read_sqt",
    "read_sqt_records",
    "write_sqt",
    # Solvers
    "QmeProblem",
    "QmeVariant",
    "SolverConfig",
    "SolveReport",
    "qme_solve",
    "qme_symbol_solve",
    "sqrt_solve",
    "sqrt_symbol_solve",
    # Finite algebras
    "FiniteAlgebraElement",
    "finite_basis",
    "finite_power_expand",
    "finite_diag_check",
    # Errors
    "SqtError",
    "IllConditioned",
    "NoConvergence",
    "ModeMismatch",
    "AlphaMismatch",
    "SqtFormatError",
]
__version__ = "0.3.0"
