"""Experiment generation, Monte-Carlo trial running, and report emission.

Instances use a square diagonal-times-orthogonal sensing matrix whose
isometry constant is known by construction: with n = N*K + 1, the
diagonal is sampled so the constant stays at 99% of the certified
threshold 1/sqrt(K/N + 1). In the noisy mode the noise level is
calibrated so sqrt(SNR) sits exactly 0.01 above the sufficient threshold,
and the stopping epsilon equals the realized noise norm.

Reproducibility contract: all randomness comes from numpy's PCG64
generator seeded with the instance seed, drawn in this fixed order:
diagonal entries (uniform), orthogonal-factor source matrix (standard
normal, row-major), support permutation, nonzero values, then the noise
direction. Identical seeds give bit-identical instances.
"""

from __future__ import annotations

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .exceptions import GompkitError
from .greedy import GompParams, gomp_run
from .linops import SensingMatrix, orthogonal_factor
from .metrics import SparseSignal, mar, snr_threshold
from .rip import RicEstimate, du_ric_bound

NOISE_FLOOR_REL = 1e-10
SNR_MARGIN = 0.01
EXACT_RECOVERY_RTOL = 1e-8


@dataclass(frozen=True)
class Instance:
    """One generated experiment: matrix, signal, noise, and observation."""

    matrix: SensingMatrix
    signal: SparseSignal
    noise: np.ndarray
    observation: np.ndarray
    sparsity: int
    n_select: int
    epsilon: float
    seed: int
    claimed_delta: RicEstimate

    @property
    def noisy(self) -> bool:
        return float(np.linalg.norm(self.noise)) > 0.0


@dataclass(frozen=True)
class TrialReport:
    """Outcome of one recovery trial."""

    instance_seed: int
    exact_recovery: bool
    support_recovery: bool
    iterations_used: int
    residual_final: float
    error: str | None = None


@dataclass(frozen=True)
class CellResult:
    """Aggregated outcomes for one (sparsity, n_select) grid cell."""

    sparsity: int
    n_select: int
    noisy: bool
    trials: int
    exact_rate: float
    support_rate: float
    mean_iterations: float
    mean_final_residual: float
    reports: tuple[TrialReport, ...]


def gen_instance(
    sparsity: int,
    n_select: int,
    noisy: bool,
    seed: int,
    *,
    flat_signal: bool = False,
) -> Instance:
    """Generate one seeded instance with a certified sensing matrix.

    ``flat_signal`` draws the nonzero entries as random signs instead of
    standard normals, pinning the minimum-to-average ratio at 1 so the
    isometry condition is exercised in isolation.
    """
    if sparsity < 1 or n_select < 1:
        raise ValueError("sparsity and n_select must be >= 1")
    n = n_select * sparsity + 1
    rng = np.random.default_rng(seed)

    bound = 0.99 / math.sqrt(sparsity / n_select + 1.0)
    d = rng.uniform(math.sqrt(1.0 - bound), math.sqrt(1.0 + bound), size=n)
    u = orthogonal_factor(rng.standard_normal((n, n)))
    matrix = SensingMatrix(d[:, None] * u)
    claimed = du_ric_bound(d)

    support = rng.permutation(n)[:sparsity] + 1
    values = np.zeros(n)
    if flat_signal:
        nonzeros = rng.integers(0, 2, size=sparsity) * 2.0 - 1.0
    else:
        nonzeros = rng.standard_normal(sparsity)
        while np.any(nonzeros == 0.0):  # measure-zero, but the type forbids zeros
            nonzeros[nonzeros == 0.0] = rng.standard_normal(np.count_nonzero(nonzeros == 0.0))
    values[support - 1] = nonzeros
    signal = SparseSignal(values=values, support=frozenset(int(i) for i in support))

    clean = matrix.entries @ values
    if noisy:
        target_root_snr = SNR_MARGIN + snr_threshold(
            sparsity, n_select, claimed.value, mar(signal, sparsity)
        )
        direction = rng.standard_normal(n)
        noise = (float(np.linalg.norm(clean)) / target_root_snr) * (
            direction / float(np.linalg.norm(direction))
        )
        epsilon = float(np.linalg.norm(noise))
    else:
        noise = np.zeros(n)
        epsilon = NOISE_FLOOR_REL * float(np.linalg.norm(clean))
    observation = clean + noise

    return Instance(
        matrix=matrix,
        signal=signal,
        noise=noise,
        observation=observation,
        sparsity=sparsity,
        n_select=n_select,
        epsilon=epsilon,
        seed=seed,
        claimed_delta=claimed,
    )


def run_trial(sparsity: int, n_select: int, noisy: bool, seed: int, *, flat_signal: bool = False) -> TrialReport:
    """Generate one instance, run the pursuit, and score the outcome."""
    try:
        inst = gen_instance(sparsity, n_select, noisy, seed, flat_signal=flat_signal)
        params = GompParams(sparsity=sparsity, n_select=n_select, epsilon=inst.epsilon)
        trace = gomp_run(inst.matrix, inst.observation, params)
        x = inst.signal.values
        err = float(np.max(np.abs(trace.final_estimate - x)))
        exact = err <= EXACT_RECOVERY_RTOL * float(np.max(np.abs(x)))
        support_ok = inst.signal.support <= trace.final_support
        residual = (
            trace.iterations[-1].residual_norm
            if trace.iterations
            else float(np.linalg.norm(inst.observation))
        )
        return TrialReport(
            instance_seed=seed,
            exact_recovery=exact,
            support_recovery=support_ok,
            iterations_used=trace.iterations_used,
            residual_final=residual,
        )
    except GompkitError as exc:
        return TrialReport(
            instance_seed=seed,
            exact_recovery=False,
            support_recovery=False,
            iterations_used=0,
            residual_final=float("nan"),
            error=f"{type(exc).__name__}: {exc}",
        )


def _default_workers() -> int:
    raw = os.environ.get("GOMP_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_trials(
    sparsities: Iterable[int],
    n_selects: Iterable[int],
    trials_per_cell: int,
    noisy: bool,
    base_seed: int,
    *,
    flat_signal: bool = False,
    max_workers: int | None = None,
) -> list[CellResult]:
    """Run a (sparsity, n_select) grid of seeded trials.

    Trial t of every cell uses seed base_seed + t, so cells are
    independent of each other and of execution order; results are
    identical whether trials run serially or on a thread pool
    (GOMP_THREADS caps the pool when ``max_workers`` is not given).
    """
    if trials_per_cell < 0:
        raise ValueError("trials_per_cell must be >= 0")
    if trials_per_cell == 0:
        return []
    workers = _default_workers() if max_workers is None else max(1, max_workers)
    cells = sorted((int(k), int(nsel)) for k in sparsities for nsel in n_selects)
    results = []
    for k, nsel in cells:
        seeds = [base_seed + t for t in range(trials_per_cell)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(
                    pool.map(lambda s: run_trial(k, nsel, noisy, s, flat_signal=flat_signal), seeds)
                )
        else:
            reports = [run_trial(k, nsel, noisy, s, flat_signal=flat_signal) for s in seeds]
        clean = [r for r in reports if r.error is None]
        results.append(
            CellResult(
                sparsity=k,
                n_select=nsel,
                noisy=noisy,
                trials=trials_per_cell,
                exact_rate=sum(r.exact_recovery for r in reports) / trials_per_cell,
                support_rate=sum(r.support_recovery for r in reports) / trials_per_cell,
                mean_iterations=(
                    sum(r.iterations_used for r in clean) / len(clean) if clean else float("nan")
                ),
                mean_final_residual=(
                    sum(r.residual_final for r in clean) / len(clean) if clean else float("nan")
                ),
                reports=tuple(reports),
            )
        )
    return results


# ---------------------------------------------------------------------------
# serialization

CSV_HEADER = "K,N,noisy,trials,exact_rate,support_rate,mean_iterations,mean_final_residual"


def _csv_num(value: float) -> str:
    return format(value, ".12g")


def report_rows(results: Sequence[CellResult]) -> list[str]:
    rows = [CSV_HEADER]
    for cell in results:
        rows.append(
            ",".join(
                [
                    str(cell.sparsity),
                    str(cell.n_select),
                    "true" if cell.noisy else "false",
                    str(cell.trials),
                    _csv_num(cell.exact_rate),
                    _csv_num(cell.support_rate),
                    _csv_num(cell.mean_iterations),
                    _csv_num(cell.mean_final_residual),
                ]
            )
        )
    return rows


def _trial_payload(report: TrialReport) -> dict:
    return {
        "instance_seed": report.instance_seed,
        "exact_recovery": report.exact_recovery,
        "support_recovery": report.support_recovery,
        "iterations_used": report.iterations_used,
        "residual_final": None if math.isnan(report.residual_final) else report.residual_final,
        "error": report.error,
    }


def report_payload(results: Sequence[CellResult], *, include_trials: bool = False) -> dict:
    """JSON-ready mirror of the CSV schema, optionally with trial detail."""
    cells = []
    for cell in results:
        entry = {
            "k": cell.sparsity,
            "n": cell.n_select,
            "noisy": cell.noisy,
            "trials": cell.trials,
            "exact_rate": cell.exact_rate,
            "support_rate": cell.support_rate,
            "mean_iterations": None if math.isnan(cell.mean_iterations) else cell.mean_iterations,
            "mean_final_residual": (
                None if math.isnan(cell.mean_final_residual) else cell.mean_final_residual
            ),
        }
        if include_trials:
            entry["reports"] = [_trial_payload(r) for r in cell.reports]
        cells.append(entry)
    return {"cells": cells}


def emit_report(
    results: Sequence[CellResult],
    fmt: str,
    destination: str | Path | IO[str] | None = None,
    *,
    include_trials: bool = False,
) -> None:
    """Write results as CSV or JSON to a path, a stream, or stdout.

    CSV prints numbers with 12 significant digits; JSON uses exact
    round-trip float text so a reparse reproduces the report.
    """
    if fmt == "csv":
        text = "\n".join(report_rows(results)) + "\n"
    elif fmt == "json":
        text = json.dumps(report_payload(results, include_trials=include_trials), indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    if destination is None:
        sys.stdout.write(text)
    elif isinstance(destination, (str, Path)):
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    else:
        destination.write(text)


# Instance files carry every float with 17 significant digits so values
# round-trip exactly; the document is plain JSON.


def _fmt_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)}")


def _fmt_value(value, indent: int) -> str:
    pad = " " * indent
    if isinstance(value, dict):
        inner = ",\n".join(
            f'{pad}  "{key}": {_fmt_value(val, indent + 2)}' for key, val in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if any(isinstance(v, (dict, list, tuple)) for v in value):
            inner = ",\n".join(f"{pad}  {_fmt_value(v, indent + 2)}" for v in value)
            return "[\n" + inner + "\n" + pad + "]"
        return "[" + ", ".join(_fmt_scalar(v) for v in value) + "]"
    return _fmt_scalar(value)


def instance_payload(inst: Instance) -> dict:
    """Schema of the instance file; see the README for field meanings."""
    return {
        "k": inst.sparsity,
        "n_select": inst.n_select,
        "m": inst.matrix.m,
        "n": inst.matrix.n,
        "noisy": inst.noisy,
        "seed": inst.seed,
        "epsilon": inst.epsilon,
        "claimed_delta": {
            "order": inst.claimed_delta.order,
            "value": inst.claimed_delta.value,
            "kind": inst.claimed_delta.kind.value,
        },
        "matrix": [list(row) for row in inst.matrix.entries],
        "signal": list(inst.signal.values),
        "support": sorted(inst.signal.support),
        "noise": list(inst.noise),
        "observation": list(inst.observation),
    }


def write_instance(inst: Instance, destination: str | Path | IO[str] | None = None) -> None:
    """Serialize an instance as JSON (matrix row-major, 17-digit floats)."""
    text = _fmt_value(instance_payload(inst), 0) + "\n"
    if destination is None:
        sys.stdout.write(text)
    elif isinstance(destination, (str, Path)):
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    else:
        destination.write(text)


def load_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix from an instance file or a bare JSON 2-d array."""
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        if "matrix" not in doc:
            raise ValueError(f"{path}: no 'matrix' field in JSON document")
        doc = doc["matrix"]
    arr = np.asarray(doc, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{path}: expected a 2-d array, got ndim={arr.ndim}")
    return arr
