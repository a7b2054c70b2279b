"""Numeric verification of the pursuit's selection guarantees.

Three checks, each run against concrete instances with isometry constants
certified by exhaustive enumeration:

* the selection-margin inequality: after projecting out an already
  selected set, the best on-support correlation beats the mean off-support
  correlation over any competitor set by a computable margin;
* the stopping property: a zero residual reached with at least as many
  correct picks as iterations implies the whole support was captured;
* the per-iteration selection condition on recorded traces: the strongest
  on-support correlation exceeds the mean over the strongest off-support
  competitors, which forces at least one correct pick per iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NotNoiseFree
from .greedy import RecoveryTrace, correlations_or_raise, select_top_n
from .linops import (
    MatrixLike,
    SensingMatrix,
    as_sensing_matrix,
    orthogonal_factor,
    project_complement,
)
from .metrics import SparseSignal
from .rip import exact_ric

# Absolute slack for inequality comparisons: both sides are O(1) at the
# problem sizes enumeration allows, leaving ~1e-15 of true float noise.
LEMMA_SLACK = 1e-12

NOISE_FLOOR_REL = 1e-10


@dataclass(frozen=True)
class LemmaInstance:
    """One admissible configuration for the selection-margin inequality.

    ``selected`` plays the role of the set already picked after
    ``iteration`` rounds of ``n_select`` picks each; ``competitors`` is a
    candidate set of off-support indices the selection could confuse with
    the true support. All index sets are 1-based.
    """

    matrix: SensingMatrix
    signal: SparseSignal
    selected: frozenset[int]
    competitors: frozenset[int]
    iteration: int
    n_select: int

    def __post_init__(self):
        mat = self.matrix
        object.__setattr__(self, "selected", frozenset(int(i) for i in self.selected))
        object.__setattr__(self, "competitors", frozenset(int(i) for i in self.competitors))
        omega = self.signal.support
        if self.signal.n != mat.n:
            raise ValueError(f"signal length {self.signal.n} != columns {mat.n}")
        for name, s in (("selected", self.selected), ("competitors", self.competitors)):
            if s and (min(s) < 1 or max(s) > mat.n):
                raise IndexError(f"{name} indices outside 1..{mat.n}")
        if len(self.selected) != self.iteration * self.n_select:
            raise ValueError(
                f"|selected| = {len(self.selected)} != iteration * n_select = "
                f"{self.iteration * self.n_select}"
            )
        if len(self.competitors) != self.n_select:
            raise ValueError("competitor set must have exactly n_select indices")
        if self.competitors & omega:
            raise ValueError("competitors must avoid the signal support")
        if self.competitors & self.selected:
            raise ValueError("competitors must avoid the selected set")
        overlap = len(omega & self.selected)
        if not (0 <= self.iteration <= overlap <= len(omega) - 1):
            raise ValueError(
                f"need iteration <= |support & selected| <= |support| - 1, got "
                f"iteration={self.iteration}, overlap={overlap}, |support|={len(omega)}"
            )
        if self.n_select * (self.iteration + 1) + len(omega) - self.iteration > mat.m:
            raise ValueError("instance too large for the row count")

    @property
    def overlap(self) -> int:
        """Number of support indices already selected."""
        return len(self.signal.support & self.selected)

    @property
    def ric_order(self) -> int:
        return self.n_select * (self.iteration + 1) + len(self.signal.support) - self.overlap


def lemma4_sides(inst: LemmaInstance) -> tuple[float, float]:
    """Both sides of the selection-margin inequality for one instance.

    Left side: best on-support correlation against the projected residual
    signal, minus the competitor-set mean. Right side: the margin
    (1 - sqrt((|support| - overlap)/n_select + 1) * delta) * ||x_rem|| /
    sqrt(|support| - overlap), with delta the exact constant at the order
    this configuration touches.
    """
    mat, x = inst.matrix, inst.signal
    omega = x.support
    remaining = sorted(omega - inst.selected)
    x_rem = x.values[np.asarray(remaining) - 1]
    signal_part = mat.entries[:, np.asarray(remaining) - 1] @ x_rem
    projected = project_complement(mat, inst.selected, signal_part)

    corr = mat.entries.T @ projected
    lhs = float(np.max(np.abs(corr[np.asarray(remaining) - 1])))
    comp = np.asarray(sorted(inst.competitors)) - 1
    lhs -= float(np.mean(np.abs(corr[comp])))

    missing = len(omega) - inst.overlap
    delta = exact_ric(mat, inst.ric_order).value
    margin = 1.0 - math.sqrt(missing / inst.n_select + 1.0) * delta
    rhs = margin * float(np.linalg.norm(x_rem)) / math.sqrt(missing)
    return lhs, rhs


def verify_lemma4(inst: LemmaInstance) -> bool:
    """Whether the selection-margin inequality holds on this instance."""
    lhs, rhs = lemma4_sides(inst)
    return lhs >= rhs - LEMMA_SLACK


def verify_stopping(
    a: MatrixLike,
    x: SparseSignal,
    trace: RecoveryTrace,
    n_select: int,
    *,
    noise: np.ndarray | None = None,
) -> bool:
    """Check the stopping property on a noise-free trace.

    If the run ended with a residual at the noise floor and had collected
    at least one correct index per iteration performed, the full support
    must be inside the final selection. Vacuously true otherwise.
    """
    if noise is not None and float(np.linalg.norm(noise)) > 0.0:
        raise NotNoiseFree("stopping property applies to noise-free instances only")
    mat = as_sensing_matrix(a)
    k0 = len(trace.iterations)
    if k0 == 0:
        return True
    y = mat.entries @ x.values
    floor = NOISE_FLOOR_REL * float(np.linalg.norm(y))
    if trace.iterations[-1].residual_norm > floor:
        return True
    if len(x.support & trace.final_support) < k0:
        return True
    return x.support <= trace.final_support


def verify_selection_condition(
    a: MatrixLike,
    x: SparseSignal,
    v: np.ndarray,
    trace: RecoveryTrace,
    n_select: int,
) -> bool:
    """Check the per-iteration selection condition on a recorded trace.

    At every iteration taken before the support was exhausted, the largest
    on-support correlation magnitude must strictly exceed the mean over
    the ``n_select`` largest off-support ones -- the condition under which
    an iteration is guaranteed to pick at least one support index. ``v``
    is the noise vector of the instance the trace came from (the check
    itself reads only the recorded correlations).
    """
    mat = as_sensing_matrix(a)
    omega = x.support
    on = np.asarray(sorted(omega)) - 1
    prior: frozenset[int] = frozenset()
    for record in trace.iterations:
        if omega <= prior:
            break
        corr = correlations_or_raise(record)
        best_on = float(np.max(corr[on]))
        rivals = select_top_n(corr, n_select, excluded=omega)
        rival_mean = float(np.mean(corr[np.asarray(rivals) - 1]))
        if not best_on > rival_mean:
            return False
        prior = record.support_after
    return True


def random_lemma_instance(rng: np.random.Generator, n_max: int = 12) -> LemmaInstance:
    """Draw one admissible instance for the selection-margin inequality.

    The matrix is diagonal-times-orthogonal with a controlled constant so
    the inequality is informative, and the selected set is built by first
    fixing how many support indices it contains; uniform subset sampling
    would almost never land on the sparsely admissible (iteration,
    overlap) pairs.
    """
    n = int(rng.integers(4, n_max + 1))
    for _ in range(200):
        n_select = int(rng.integers(1, 4))
        support_size = int(rng.integers(1, n))
        iteration = int(rng.integers(0, support_size))
        lo = iteration
        hi = min(support_size - 1, iteration * n_select)
        if hi < lo:
            continue
        overlap = int(rng.integers(lo, hi + 1))
        off_support = n - support_size
        if off_support < (iteration * n_select - overlap) + n_select:
            continue
        if n_select * (iteration + 1) + support_size - iteration > n:
            continue
        break
    else:
        n_select, support_size, iteration, overlap = 1, 1, 0, 0

    bound = 0.99 / np.sqrt(support_size / n_select + 1.0)
    d = rng.uniform(np.sqrt(1.0 - bound), np.sqrt(1.0 + bound), size=n)
    u = orthogonal_factor(rng.standard_normal((n, n)))
    mat = SensingMatrix(d[:, None] * u)

    perm = rng.permutation(n) + 1
    omega = [int(i) for i in perm[:support_size]]
    off = [int(i) for i in perm[support_size:]]
    values = np.zeros(n)
    values[np.asarray(omega) - 1] = rng.standard_normal(support_size)
    signal = SparseSignal(values=values, support=frozenset(omega))

    selected = frozenset(omega[:overlap]) | frozenset(off[: iteration * n_select - overlap])
    competitors = frozenset(off[iteration * n_select - overlap:][:n_select])
    return LemmaInstance(
        matrix=mat,
        signal=signal,
        selected=selected,
        competitors=competitors,
        iteration=iteration,
        n_select=n_select,
    )
