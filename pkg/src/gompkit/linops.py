"""Dense linear-algebra primitives: submatrix least squares, complement
projection, and orthogonal-factor extraction.

Index sets on the public surface are 1-based (columns are numbered 1..n,
like the math they implement); the conversion to zero-based storage is
internal. Solves go through an orthogonal factorization (SVD), never the
explicit normal equations, because the submatrices this toolkit meets are
only isometry-good, not perfectly conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .exceptions import DimensionMismatch, RankDeficient, Singular

# Smallest/largest singular value ratio below which a submatrix is treated
# as rank-deficient. Matches the double-precision noise floor at the dense
# desk-scale sizes (<= 1e3) this package targets.
RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """An m-by-n real sensing matrix.

    Parameters
    ----------
    entries : ndarray, shape (m, n)
        Dense real matrix; all entries must be finite.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d matrix, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"matrix must be at least 1x1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


MatrixLike = Union[SensingMatrix, np.ndarray]


def as_sensing_matrix(a: MatrixLike) -> SensingMatrix:
    """Coerce a raw array to :class:`SensingMatrix` (validated), pass one through."""
    if isinstance(a, SensingMatrix):
        return a
    return SensingMatrix(np.asarray(a, dtype=float))


def _to_cols(index_set: Iterable[int], n: int) -> np.ndarray:
    """1-based index set -> sorted zero-based column array."""
    cols = sorted({int(i) for i in index_set})
    if not cols:
        return np.empty(0, dtype=int)
    if cols[0] < 1 or cols[-1] > n:
        raise IndexError(f"indices must lie in 1..{n}, got {cols[0]}..{cols[-1]}")
    return np.asarray(cols, dtype=int) - 1


def _solve_submatrix(a_s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-norm least squares on an explicit submatrix via SVD.

    Raises RankDeficient when the singular-value spread exceeds RANK_RTOL.
    """
    u, s, vt = np.linalg.svd(a_s, full_matrices=False)
    if s[0] <= 0.0 or s[-1] < RANK_RTOL * s[0]:
        raise RankDeficient(
            f"submatrix is numerically rank-deficient "
            f"(sigma_min/sigma_max = {0.0 if s[0] <= 0 else s[-1] / s[0]:.3e})"
        )
    return vt.T @ ((u.T @ y) / s)


def least_squares(a: MatrixLike, index_set: Iterable[int], y: np.ndarray) -> np.ndarray:
    """Solve min_x ||y - A_S x||_2 on the columns named by ``index_set``.

    Parameters
    ----------
    a : SensingMatrix or ndarray
    index_set : iterable of int
        Nonempty set of 1-based column indices. Coefficients are returned
        in ascending index order.
    y : ndarray, shape (m,)

    Returns
    -------
    ndarray, shape (len(index_set),)
        The least-squares coefficients; the residual y - A_S x is
        orthogonal to every selected column up to roundoff.
    """
    mat = as_sensing_matrix(a)
    y = np.asarray(y, dtype=float)
    if y.shape != (mat.m,):
        raise DimensionMismatch(f"observation has shape {y.shape}, expected ({mat.m},)")
    cols = _to_cols(index_set, mat.n)
    if cols.size == 0:
        raise ValueError("index set must be nonempty")
    if cols.size > mat.m:
        raise DimensionMismatch(
            f"cannot fit {cols.size} columns with only {mat.m} rows"
        )
    return _solve_submatrix(mat.entries[:, cols], y)


def project_complement(a: MatrixLike, index_set: Iterable[int], u: np.ndarray) -> np.ndarray:
    """Project ``u`` onto the orthogonal complement of span(A_S).

    With an empty index set this is the identity. The result is orthogonal
    to every selected column, and the operator is idempotent and symmetric.
    """
    mat = as_sensing_matrix(a)
    u = np.asarray(u, dtype=float)
    if u.shape != (mat.m,):
        raise DimensionMismatch(f"vector has shape {u.shape}, expected ({mat.m},)")
    cols = _to_cols(index_set, mat.n)
    if cols.size == 0:
        return u.copy()
    a_s = mat.entries[:, cols]
    coef = _solve_submatrix(a_s, u)
    return u - a_s @ coef


def orthogonal_factor(m: np.ndarray) -> np.ndarray:
    """Orthogonal factor of a nonsingular square matrix, via QR.

    The triangular factor's diagonal is forced nonnegative so the result
    is a deterministic function of the input (needed for seeded
    reproducibility).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] <= 0.0 or s[-1] < RANK_RTOL * s[0]:
        raise Singular("matrix is numerically singular; no orthogonal factor")
    q, r = np.linalg.qr(m)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs
