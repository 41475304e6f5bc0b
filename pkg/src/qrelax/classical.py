"""Exact classical relaxed row and column iterations.

This module is the ground-truth oracle: both simulators are validated
against the trajectories produced here. The steps use the simplified
unit-norm update formulas, so they insist on normalized systems instead
of dividing by row/column norms on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError
from .report import CONVERGED, MAX_STEPS, RunReport, StepRecord
from .schedules import (
    CLASSICAL,
    RelaxationSchedule,
    SelectionStrategy,
    relaxation_at,
    select_index,
)
from .system import COLUMNS_NORMALIZED, ROWS_NORMALIZED, LinearSystem, require_normalization

ROW = "row"
COLUMN = "column"


@dataclass(frozen=True)
class RowIterate:
    x: np.ndarray
    k: int = 0


@dataclass(frozen=True)
class ColumnIterate:
    x: np.ndarray
    r: np.ndarray
    k: int = 0


def kaczmarz_step(it: RowIterate, system: LinearSystem, t: int, lam: float) -> RowIterate:
    """Relaxed projection onto the hyperplane of equation t.

    x <- x + lam * (b_t - a_t.x) * a_t, valid because ||a_t|| = 1.
    """
    require_normalization(system, ROWS_NORMALIZED, "kaczmarz_step")
    if not 0.0 <= lam <= 2.0:
        raise DomainError(lam, CLASSICAL, it.k)
    a = system.row(t)
    gap = system.rhs_entry(t) - float(a @ it.x)
    return RowIterate(it.x + lam * gap * a, it.k + 1)


def column_step(it: ColumnIterate, system: LinearSystem, t: int, omega: float) -> ColumnIterate:
    """One coordinate-descent update on component t.

    x_t gains omega * (c_t.r); the residual contracts along c_t as
    r <- (I - omega c_t c_t^T) r, which keeps r = b - A x.
    """
    require_normalization(system, COLUMNS_NORMALIZED, "column_step")
    if not 0.0 <= omega <= 2.0:
        raise DomainError(omega, CLASSICAL, it.k)
    c = system.column(t)
    correlation = float(c @ it.r)
    x = np.array(it.x)
    x[t - 1] += omega * correlation
    r = it.r - omega * correlation * c
    return ColumnIterate(x, r, it.k + 1)


def exact_solution(system: LinearSystem):
    """Direct elimination with partial pivoting; None when singular.

    The result is accepted only if ||A x - b|| <= 1e-10 * (1 + ||b||), so
    numerically-singular systems also report as singular instead of
    returning garbage.
    """
    try:
        x = np.linalg.solve(system.matrix, system.rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(x)):
        return None
    defect = np.linalg.norm(system.matrix @ x - system.rhs)
    if defect > 1e-10 * (1.0 + np.linalg.norm(system.rhs)):
        return None
    return x


def run_classical(
    system: LinearSystem,
    x0: np.ndarray,
    schedule: RelaxationSchedule,
    strategy: SelectionStrategy,
    max_steps: int,
    mode: str,
    tol: float = 1e-10,
) -> RunReport:
    """Iterate until the residual norm drops to ``tol`` or ``max_steps``.

    Row mode needs a rows-normalized system, column mode a
    columns-normalized one. Per-step records carry the true recomputed
    residual and, when the system is non-singular, the error against the
    directly-solved x*.
    """
    if mode not in (ROW, COLUMN):
        raise UsageError(f"mode must be {ROW!r} or {COLUMN!r}, got {mode!r}")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (system.n,):
        raise UsageError(f"x0 has shape {x0.shape}, expected ({system.n},)")
    x_star = exact_solution(system)

    report = RunReport()
    t_used, value_used = None, None
    if mode == ROW:
        require_normalization(system, ROWS_NORMALIZED, "row-mode run")
        row_it = RowIterate(np.array(x0))
        for k in range(max_steps + 1):
            residual = system.residual(row_it.x)
            report.append(_record(k, t_used, value_used, row_it.x, residual, x_star))
            report.final_x = row_it.x
            if np.linalg.norm(residual) <= tol:
                report.status = CONVERGED
                return report
            if k == max_steps:
                break
            t_used = select_index(strategy, k, system.n, residual=residual)
            value_used = relaxation_at(schedule, k)
            row_it = kaczmarz_step(row_it, system, t_used, value_used)
    else:
        require_normalization(system, COLUMNS_NORMALIZED, "column-mode run")
        col_it = ColumnIterate(np.array(x0), system.residual(x0))
        for k in range(max_steps + 1):
            report.append(_record(k, t_used, value_used, col_it.x, col_it.r, x_star))
            report.final_x = col_it.x
            if np.linalg.norm(col_it.r) <= tol:
                report.status = CONVERGED
                return report
            if k == max_steps:
                break
            correlations = system.matrix.T @ col_it.r
            t_used = select_index(strategy, k, system.n, residual=correlations)
            value_used = relaxation_at(schedule, k)
            col_it = column_step(col_it, system, t_used, value_used)

    report.status = MAX_STEPS
    return report


def _record(k, t, relaxation, x, residual, x_star) -> StepRecord:
    error = None if x_star is None else float(np.linalg.norm(x - x_star))
    return StepRecord(
        k=k,
        t=t,
        relaxation=relaxation,
        x_norm=float(np.linalg.norm(x)),
        residual_norm=float(np.linalg.norm(residual)),
        error_norm=error,
    )
