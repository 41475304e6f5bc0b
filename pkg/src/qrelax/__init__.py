"""Relaxed row/column iteration solvers: classical oracle, faithful
statevector simulation of the block-encoded circuits, and a compressed
good-branch simulator, cross-validated against each other."""

from .system import LinearSystem, normalize_columns, normalize_rows
from .schedules import RelaxationSchedule, SelectionStrategy, relaxation_at, select_index
from .loaders import load_system
from .classical import ColumnIterate, RowIterate, column_step, exact_solution, kaczmarz_step, run_classical
from .branch import BranchState, column_branch_step, row_branch_step, run_branch
from .report import RunReport, StepRecord

__version__ = "0.1.0"

__all__ = [
    "LinearSystem",
    "normalize_rows",
    "normalize_columns",
    "RelaxationSchedule",
    "SelectionStrategy",
    "relaxation_at",
    "select_index",
    "load_system",
    "RowIterate",
    "ColumnIterate",
    "kaczmarz_step",
    "column_step",
    "exact_solution",
    "run_classical",
    "BranchState",
    "row_branch_step",
    "column_branch_step",
    "run_branch",
    "RunReport",
    "StepRecord",
]
