"""Restricted-isometry constants and recovery-condition thresholds.

The constant of order k measures how far every k-column submatrix is from
an isometry: the smallest delta with
(1 - delta) ||x||^2 <= ||A x||^2 <= (1 + delta) ||x||^2 for all k-sparse x.
Exact values come from enumerating supports (deliberately desk-scale, with
a hard budget); the diagonal-times-orthogonal construction used by the
experiment harness admits a closed-form bound instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np

from .exceptions import (
    BudgetExceeded,
    DimensionError,
    NonPositiveDiagonal,
    OrderMismatch,
)
from .linops import MatrixLike, as_sensing_matrix

ENUMERATION_BUDGET = 1_000_000
_CHUNK = 32_768


class RicKind(enum.Enum):
    """How an isometry constant was obtained."""

    EXACT_ENUMERATION = "exact_enumeration"
    ANALYTIC_DU = "analytic_du"
    UPPER_BOUND_SPECTRAL = "upper_bound_spectral"


@dataclass(frozen=True)
class RicEstimate:
    """An isometry constant of a given order, tagged with its provenance.

    ANALYTIC_DU and UPPER_BOUND_SPECTRAL values are valid for every order
    up to ``order``; EXACT_ENUMERATION values are exact at ``order`` only.
    """

    order: int
    value: float
    kind: RicKind

    def covers_order(self, order: int) -> bool:
        return self.order >= order


class Condition(enum.Enum):
    """Named sufficient-condition thresholds on the order-NK+1 constant
    (order NK for the ones that predate the +1 refinements)."""

    SHARP = "sharp"  # 1/sqrt(K/N + 1); sharp for N = 1
    WANG2012 = "wang2012"  # 1/(sqrt(K/N) + 3)
    LIU2012 = "liu2012"  # 1/((2 + sqrt(2)) sqrt(K/N))
    SATPATHI2013A = "satpathi2013a"  # 1/(sqrt(K/N) + 2)
    SATPATHI2013B = "satpathi2013b"  # 1/(sqrt(K/N) + 1)
    SHEN2014 = "shen2014"  # 1/(sqrt(K/N) + 1.27)


def _support_grams(gram: np.ndarray, supports: np.ndarray) -> np.ndarray:
    """Gather the |S|x|S| principal submatrices of ``gram`` for a batch of
    supports, shape (batch, k, k)."""
    return gram[supports[:, :, None], supports[:, None, :]]


def exact_ric(a: MatrixLike, order: int, *, budget: int = ENUMERATION_BUDGET) -> RicEstimate:
    """Exact isometry constant of ``order`` by support enumeration.

    Every support S of the given size contributes the eigenvalue extremes
    of A_S^T A_S; the constant is the worst deviation from 1 over all of
    them. Enumeration is refused (BudgetExceeded) when the number of
    supports would pass ``budget`` -- this is an oracle, never a silent
    approximation.
    """
    mat = as_sensing_matrix(a)
    if order < 1 or order > mat.n:
        raise DimensionError(f"order must lie in 1..{mat.n}, got {order}")
    total = math.comb(mat.n, order)
    if total > budget:
        raise BudgetExceeded(
            f"C({mat.n}, {order}) = {total} supports exceeds budget {budget}"
        )
    gram = mat.entries.T @ mat.entries
    worst = 0.0
    sets = combinations(range(mat.n), order)
    while True:
        chunk = np.array(list(islice(sets, _CHUNK)), dtype=int)
        if chunk.size == 0:
            break
        eigs = np.linalg.eigvalsh(_support_grams(gram, chunk))
        worst = max(worst, float(np.max(eigs) - 1.0), float(1.0 - np.min(eigs)))
    return RicEstimate(order=order, value=worst, kind=RicKind.EXACT_ENUMERATION)


def du_ric_bound(d: np.ndarray) -> RicEstimate:
    """Isometry constant of A = diag(d) @ U for orthogonal U, any order.

    ||diag(d) U x||^2 lies in [min d^2, max d^2] * ||x||^2 for every x, so
    max(1 - min_i d_i^2, max_i d_i^2 - 1) bounds the constant of every
    order up to n, with equality at order n. Note the squares: the bound
    lives on d^2 even though the construction samples d itself.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise DimensionError("expected a nonempty 1-d vector of diagonal entries")
    if np.any(d <= 0.0):
        raise NonPositiveDiagonal("diagonal entries must be strictly positive")
    sq = d * d
    value = max(float(1.0 - sq.min()), float(sq.max() - 1.0))
    return RicEstimate(order=d.size, value=value, kind=RicKind.ANALYTIC_DU)


def spectral_ric_bound(a: MatrixLike) -> RicEstimate:
    """Cheap upper bound valid at every order: || A^T A - I ||_2.

    Eigenvalues of any principal submatrix of A^T A interlace those of the
    full Gram matrix, so the full-spectrum deviation from 1 dominates the
    constant of every order.
    """
    mat = as_sensing_matrix(a)
    gram = mat.entries.T @ mat.entries
    eigs = np.linalg.eigvalsh(gram)
    value = max(float(eigs[-1] - 1.0), float(1.0 - eigs[0]))
    return RicEstimate(order=mat.n, value=max(value, 0.0), kind=RicKind.UPPER_BOUND_SPECTRAL)


def condition_threshold(sparsity: int, n_select: int, which: Condition | str = Condition.SHARP) -> float:
    """Threshold on the isometry constant for a named sufficient condition.

    ``sparsity`` is K, ``n_select`` is N; all formulas depend on the ratio
    K/N only.
    """
    if sparsity < 1 or n_select < 1:
        raise ValueError("sparsity and n_select must be >= 1")
    which = Condition(which)
    ratio = sparsity / n_select
    root = math.sqrt(ratio)
    if which is Condition.SHARP:
        return 1.0 / math.sqrt(ratio + 1.0)
    if which is Condition.WANG2012:
        return 1.0 / (root + 3.0)
    if which is Condition.LIU2012:
        return 1.0 / ((2.0 + math.sqrt(2.0)) * root)
    if which is Condition.SATPATHI2013A:
        return 1.0 / (root + 2.0)
    if which is Condition.SATPATHI2013B:
        return 1.0 / (root + 1.0)
    if which is Condition.SHEN2014:
        return 1.0 / (root + 1.27)
    raise ValueError(f"unknown condition {which!r}")


def check_recovery_condition(delta: RicEstimate, sparsity: int, n_select: int) -> bool:
    """True when ``delta`` certifies recovery: value < 1/sqrt(K/N + 1).

    The estimate must cover order N*K + 1. Exact-enumeration estimates are
    exact at their own order only, so a lower-order one cannot certify;
    the analytic and spectral bounds hold at every order (constants of
    orders past n coincide with the order-n constant) and always apply.
    """
    required = n_select * sparsity + 1
    if delta.kind is RicKind.EXACT_ENUMERATION and delta.order < required:
        raise OrderMismatch(
            f"estimate of order {delta.order} cannot certify order {required}"
        )
    return delta.value < condition_threshold(sparsity, n_select, Condition.SHARP)
