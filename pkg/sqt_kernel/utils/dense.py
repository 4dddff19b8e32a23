"""Dense truncations of structured semi-infinite matrices, used as oracles and for small blocks."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
import scipy.linalg


def toeplitz_block(coeffs: npt.ArrayLike, rows: int, cols: int | None = None) -> npt.NDArray[np.float64]:
    """Leading rows×cols block of the symmetric banded Toeplitz matrix with stencil a_0..a_d"""
    cols = rows if cols is None else cols
    c = np.asarray(coeffs, dtype=np.float64)
    col = np.zeros(rows)
    row = np.zeros(cols)
    col[: min(rows, c.size)] = c[:rows]
    row[: min(cols, c.size)] = c[:cols]
    return scipy.linalg.toeplitz(col, row)


def hankel_block(first_column: npt.ArrayLike, rows: int, cols: int | None = None) -> npt.NDArray[np.float64]:
    """Leading rows×cols block of the Hankel matrix with entries v_{i+j-1}, zero past the given column"""
    cols = rows if cols is None else cols
    v = np.asarray(first_column, dtype=np.float64)
    full = np.zeros(rows + cols - 1)
    k = min(full.size, v.size)
    full[:k] = v[:k]
    return scipy.linalg.hankel(full[:rows], full[rows - 1 :])


def relative_inf_error(x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """‖x - y‖_∞ / max(‖y‖_∞, 1)"""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    scale = max(float(np.abs(y).sum(axis=1).max(initial=0.0)), 1.0)
    return float(np.abs(x - y).sum(axis=1).max(initial=0.0)) / scale
