"""Dense statevector simulation of the block-encoded iteration circuits.

Register conventions
--------------------
The state is a real amplitude vector over ``m`` ancilla qubits tensored
with one n-level data register. Qubit 1 is the leftmost tensor factor,
so reshaping the flat vector to ``(2,)*m + (n,)`` puts qubit i on axis
i-1 and the data register on the last axis. The data register is kept
n-level on purpose: the applied operators are n-dimensional blocks, and
padding to a power of two would introduce behavior on pad states that
nothing defines. Reported qubit totals use ceil(log2 n) for the data
register.

The row algorithm grows three ancillas per iteration (m = 3k+2 after k
iterations); the column algorithm grows two per iteration on each of its
registers (m = 2(k+1)). The good branch is the all-zero ancilla
component; it carries ||x_k||/v_k times the unit iterate, where v is the
bookkeeping denominator tracked alongside the state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classical
from .encodings import (
    GivensParams,
    column_residual_unitary,
    column_update_unitary,
    givens,
    row_unitary,
    state_prep_col,
)
from .errors import InvariantViolation, ResourceError, UsageError
from .report import CONVERGED, MAX_STEPS, RunReport, StepRecord
from .schedules import RelaxationSchedule, SelectionStrategy, relaxation_at, select_index
from .system import COLUMNS_NORMALIZED, ROWS_NORMALIZED, LinearSystem, require_normalization

UNIT_TOL = 1e-12
NORM_TOL = 1e-10
DEFAULT_MEM_LIMIT = 2 * 1024**3  # bytes of statevector, the largest transient included
_FLOAT_BYTES = 8


@dataclass(frozen=True)
class RegisterLayout:
    """Ancilla count plus data dimension; qubit 1 = leftmost factor."""

    ancillas: int
    data_dim: int

    @property
    def dim(self) -> int:
        return (1 << self.ancillas) * self.data_dim

    @property
    def qubit_total(self) -> int:
        return self.ancillas + max(1, math.ceil(math.log2(self.data_dim)))


@dataclass(frozen=True)
class SimState:
    """Flat amplitude vector plus layout, step counter and denominator v."""

    vec: np.ndarray
    layout: RegisterLayout
    k: int
    v: float

    def __post_init__(self):
        if self.vec.shape != (self.layout.dim,):
            raise UsageError(
                f"state has {self.vec.shape[0]} amplitudes, layout wants {self.layout.dim}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def dump(self, cutoff: float = 1e-14) -> str:
        """Nonzero amplitudes as '(ancilla bits, data index, amplitude)' lines."""
        m, n = self.layout.ancillas, self.layout.data_dim
        grid = self.vec.reshape((1 << m, n))
        lines = []
        for anc in range(1 << m):
            for d in range(n):
                amp = grid[anc, d]
                if abs(amp) > cutoff:
                    bits = format(anc, f"0{m}b") if m else ""
                    lines.append(f"{bits} {d + 1} {float(amp)!r}")
        return "\n".join(lines) + "\n"


# --- low-level register manipulation ---------------------------------------


def _swap_qubits(vec: np.ndarray, m: int, n: int, i: int, j: int) -> np.ndarray:
    """Exchange ancilla qubits i and j (1-based)."""
    if not (1 <= i <= m and 1 <= j <= m):
        raise UsageError(f"swap ({i},{j}) outside 1..{m}")
    if i == j:
        return vec
    tensor = vec.reshape((2,) * m + (n,))
    return np.swapaxes(tensor, i - 1, j - 1).reshape(-1)


def _apply_tail_operator(vec: np.ndarray, n: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 4n-by-4n operator on (last two ancillas) tensor (data)."""
    out = vec.reshape((-1, 4 * n)) @ mat.T
    return out.reshape(-1)


def _apply_last_qubit(vec: np.ndarray, n: int, mat2: np.ndarray) -> np.ndarray:
    """Apply a single-qubit operator on the last ancilla."""
    tensor = vec.reshape((-1, 2, n))
    return np.einsum("ab,xbd->xad", mat2, tensor).reshape(-1)


def _apply_data_operator(vec: np.ndarray, n: int, mat: np.ndarray) -> np.ndarray:
    out = vec.reshape((-1, n)) @ mat.T
    return out.reshape(-1)


def _prepend_zero_qubits(vec: np.ndarray, count: int) -> np.ndarray:
    # New leading qubits in |0> put the old vector in the first block.
    out = np.zeros((1 << count) * vec.size)
    out[: vec.size] = vec
    return out


def assert_normalized(state: SimState, tol: float = NORM_TOL) -> SimState:
    drift = abs(state.norm - 1.0)
    if drift > tol:
        raise InvariantViolation(
            f"statevector norm drifted to {state.norm!r} at k={state.k}"
        )
    return state


# --- shared extraction ------------------------------------------------------


def extract_good_branch(state: SimState):
    """Project onto all-zero ancillas: (amplitude >= 0, unit direction).

    A zeroed good branch reports amplitude 0 with a zero direction.
    """
    n = state.layout.data_dim
    good = state.vec[:n]
    amplitude = float(np.linalg.norm(good))
    if amplitude == 0.0:
        return 0.0, np.zeros(n)
    return amplitude, good / amplitude


@dataclass(frozen=True)
class MeasurementResult:
    outcomes: np.ndarray  # (shots, m) ancilla bits
    success_probability: float  # of the all-zero outcome


def measure_ancillas(state: SimState, seed=None, shots: int = 1) -> MeasurementResult:
    """Sample the ancilla register; reproducible under a fixed seed."""
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    m, n = state.layout.ancillas, state.layout.data_dim
    probs = np.sum(state.vec.reshape((1 << m, n)) ** 2, axis=1)
    total = probs.sum()
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise InvariantViolation(f"ancilla probabilities sum to {total!r}")
    rng = np.random.default_rng(seed)
    drawn = rng.choice(1 << m, size=shots, p=probs / total)
    bits = ((drawn[:, None] >> np.arange(m - 1, -1, -1)[None, :]) & 1).astype(np.uint8)
    return MeasurementResult(outcomes=bits, success_probability=float(probs[0]))


# --- row algorithm ----------------------------------------------------------


def init_row_state(x0) -> SimState:
    """|00> tensor x0 with v=1; x0 must be a unit vector.

    Non-unit starts are not representable as a bare data register; either
    normalize x0 or use the branch simulator's embedding.
    """
    x0 = np.asarray(x0, dtype=float)
    if abs(np.linalg.norm(x0) - 1.0) > UNIT_TOL:
        raise UsageError(
            f"x0 must be a unit vector (norm {np.linalg.norm(x0)!r}); "
            "normalize it or track a scaled iterate with the branch simulator"
        )
    n = x0.size
    vec = np.zeros(4 * n)
    vec[:n] = x0
    return SimState(vec, RegisterLayout(2, n), k=0, v=1.0)


def row_mixing(v: float, b_t: float):
    """Weights splitting the iterate branch from the fresh-row branch.

    beta^2 = v^2/(v^2+b_t^2) and gamma = beta*b_t/v (signed so negative
    rhs entries steer the update the right way); beta/v = 1/v' defines
    the next denominator v' = hypot(v, b_t).
    """
    beta = v / math.hypot(v, b_t)
    return beta, beta * b_t / v


def prepare_Y(state: SimState, system: LinearSystem, t: int) -> SimState:
    """Prepend one qubit: beta|0>|X_k> + gamma|1>|0...0>|a_t>."""
    require_normalization(system, ROWS_NORMALIZED, "prepare_Y")
    m, n = state.layout.ancillas, state.layout.data_dim
    if m != 3 * state.k + 2:
        raise UsageError(f"expected an iterate state with {3 * state.k + 2} ancillas, got {m}")
    beta, gamma = row_mixing(state.v, system.rhs_entry(t))
    vec = np.zeros(2 * state.vec.size)
    vec[: state.vec.size] = beta * state.vec
    vec[state.vec.size : state.vec.size + n] = gamma * system.row(t)
    return SimState(vec, RegisterLayout(m + 1, n), state.k, state.v)


def apply_row_iteration(state: SimState, system: LinearSystem, t: int, lam: float) -> SimState:
    """Execute one full row iteration on a prepared superposition.

    SWAP(1, 3k+2) routes the fresh-row branch onto the |10> ancilla pair,
    the block operator turns the pair into the relaxed update, and two
    final SWAPs park the used ancillas at the front, leaving a valid
    iterate state with 3(k+1)+2 ancillas.
    """
    require_normalization(system, ROWS_NORMALIZED, "apply_row_iteration")
    k = state.k
    m, n = state.layout.ancillas, state.layout.data_dim
    if m != 3 * k + 3:
        raise UsageError(f"expected a prepared state with {3 * k + 3} ancillas, got {m}")
    operator = row_unitary(system.row(t), lam)

    vec = _swap_qubits(state.vec, m, n, 1, 3 * k + 2)
    vec = _apply_tail_operator(vec, n, operator.matrix)
    vec = _prepend_zero_qubits(vec, 2)
    m += 2
    vec = _swap_qubits(vec, m, n, 1, 3 * (k + 1) + 1)
    vec = _swap_qubits(vec, m, n, 2, 3 * (k + 1) + 2)

    v_next = math.hypot(state.v, system.rhs_entry(t))
    return SimState(vec, RegisterLayout(m, n), k + 1, v_next)


# --- column algorithm -------------------------------------------------------


@dataclass(frozen=True)
class ColumnInit:
    x_state: SimState
    r_state: SimState | None  # None when r0 = 0 (already solved)
    delta: float
    residual0: np.ndarray
    converged: bool


def init_column_states(x0, system: LinearSystem) -> ColumnInit:
    """Initial iterate and residual registers plus the embedding factor.

    r0 = b - A x0 is computed here. A unit r0 embeds directly (delta=1);
    otherwise delta = 1/||r0|| puts amplitude exactly 1 on the good
    branch, leaving no junk weight. A zero r0 means x0 already solves the
    system and the residual register is not constructed.
    """
    require_normalization(system, COLUMNS_NORMALIZED, "init_column_states")
    x0 = np.asarray(x0, dtype=float)
    if abs(np.linalg.norm(x0) - 1.0) > UNIT_TOL:
        raise UsageError(f"x0 must be a unit vector (norm {np.linalg.norm(x0)!r})")
    n = x0.size
    x_vec = np.zeros(4 * n)
    x_vec[:n] = x0
    x_state = SimState(x_vec, RegisterLayout(2, n), k=0, v=1.0)

    r0 = system.residual(x0)
    r0_norm = float(np.linalg.norm(r0))
    if r0_norm == 0.0:
        return ColumnInit(x_state, None, 1.0, r0, converged=True)
    delta = 1.0 if abs(r0_norm - 1.0) <= UNIT_TOL else 1.0 / r0_norm
    r_vec = np.zeros(4 * n)
    r_vec[:n] = delta * r0
    r_state = SimState(r_vec, RegisterLayout(2, n), k=0, v=1.0)
    return ColumnInit(x_state, r_state, delta, r0, converged=False)


def column_mixing(v: float, delta: float):
    """Branch weights and the matching rotation for one column iteration.

    beta^2 = c^2 = v*delta/(1 + v*delta); the combined weights satisfy
    c*beta/v = s*gamma*delta = 1/(v + 1/delta), which is what makes the
    good branch land on x_{k+1}/v_{k+1}. For delta=1 this is the
    sqrt((k+1)/(k+2)) schedule with v_k = k+1.
    """
    beta_sq = v * delta / (1.0 + v * delta)
    beta = math.sqrt(beta_sq)
    gamma = math.sqrt(1.0 - beta_sq)
    return beta, gamma


def apply_column_iteration(
    x_state: SimState,
    r_state: SimState,
    system: LinearSystem,
    t: int,
    omega: float,
    delta: float,
):
    """One column iteration: returns (new iterate state, new residual state).

    The iterate register mixes with the prep-rotated residual register,
    two SWAPs bring the fresh ancilla pair next to the data register, the
    routing operator moves omega*(c_t.r) onto the partner branch, and the
    plane rotation folds it into the good branch. The residual register
    is contracted independently by its own block operator.
    """
    require_normalization(system, COLUMNS_NORMALIZED, "apply_column_iteration")
    k = x_state.k
    if r_state.k != k:
        raise UsageError(f"registers out of step: x at k={k}, r at k={r_state.k}")
    m, n = x_state.layout.ancillas, x_state.layout.data_dim
    if m != 2 * (k + 1) or r_state.layout.ancillas != 2 * (k + 1):
        raise UsageError(f"expected 2(k+1)={2 * (k + 1)} ancillas on both registers")
    column = system.column(t)
    beta, gamma = column_mixing(x_state.v, delta)

    prep = state_prep_col(column, t)
    rotated_r = _apply_data_operator(r_state.vec, n, prep.matrix)
    size = x_state.vec.size
    psi = np.zeros(4 * size)
    psi[:size] = beta * x_state.vec  # |00> branch
    psi[2 * size : 3 * size] = gamma * rotated_r  # |10> branch
    m_psi = m + 2
    psi = _swap_qubits(psi, m_psi, n, 1, 2 * (k + 1) + 1)
    psi = _swap_qubits(psi, m_psi, n, 2, 2 * (k + 1) + 2)
    psi = _apply_tail_operator(psi, n, column_update_unitary(t, omega, n).matrix)
    psi = _apply_last_qubit(psi, n, givens(GivensParams(beta, gamma)).matrix)
    x_next = SimState(psi, RegisterLayout(m_psi, n), k + 1, x_state.v + 1.0 / delta)

    r_vec = _apply_tail_operator(r_state.vec, n, column_residual_unitary(column, omega).matrix)
    r_vec = _prepend_zero_qubits(r_vec, 2)
    r_vec = _swap_qubits(r_vec, m + 2, n, 1, 2 * k + 3)
    r_vec = _swap_qubits(r_vec, m + 2, n, 2, 2 * k + 4)
    r_next = SimState(r_vec, RegisterLayout(m + 2, n), k + 1, 1.0)
    return x_next, r_next


# --- full runs ----------------------------------------------------------------


def _guard_memory(k: int, peak_ancillas: int, n: int, mem_limit: int) -> None:
    required = (1 << peak_ancillas) * n * _FLOAT_BYTES
    if required > mem_limit:
        raise ResourceError(k, required, mem_limit)


def run_algorithm1(
    system: LinearSystem,
    x0,
    schedule: RelaxationSchedule,
    strategy: SelectionStrategy,
    max_steps: int,
    tol: float = 1e-10,
    mem_limit: int = DEFAULT_MEM_LIMIT,
):
    """Full row-method simulation; returns (report, final state).

    Convergence is detected on the classically-tracked shadow iterate
    (repeatedly measuring the simulated state is not modeled). Records
    carry the good-branch amplitude, the success probability of
    post-selecting all-zero ancillas, and the fidelity between the good
    branch and the shadow direction.
    """
    require_normalization(system, ROWS_NORMALIZED, "run_algorithm1")
    state = assert_normalized(init_row_state(x0))
    shadow = classical.RowIterate(np.array(x0, dtype=float))
    x_star = classical.exact_solution(system)

    report = RunReport()
    t_used, lam_used = None, None
    for k in range(max_steps + 1):
        residual = system.residual(shadow.x)
        report.append(_sim_record(k, t_used, lam_used, shadow.x, residual, x_star, state))
        report.final_x = shadow.x
        if np.linalg.norm(residual) <= tol:
            report.status = CONVERGED
            return report, state
        if k == max_steps:
            break
        _guard_memory(k, 3 * k + 5, system.n, mem_limit)
        t_used = select_index(strategy, k, system.n, residual=residual)
        lam_used = relaxation_at(schedule, k)
        state = assert_normalized(prepare_Y(state, system, t_used))
        state = assert_normalized(apply_row_iteration(state, system, t_used, lam_used))
        shadow = classical.kaczmarz_step(shadow, system, t_used, lam_used)

    report.status = MAX_STEPS
    return report, state


def run_algorithm2(
    system: LinearSystem,
    x0,
    schedule: RelaxationSchedule,
    strategy: SelectionStrategy,
    max_steps: int,
    tol: float = 1e-10,
    mem_limit: int = DEFAULT_MEM_LIMIT,
):
    """Full column-method simulation; returns (report, x state, r state)."""
    require_normalization(system, COLUMNS_NORMALIZED, "run_algorithm2")
    init = init_column_states(x0, system)
    x_state, r_state, delta = init.x_state, init.r_state, init.delta
    shadow = classical.ColumnIterate(np.array(x0, dtype=float), np.array(init.residual0))
    x_star = classical.exact_solution(system)

    report = RunReport()
    t_used, omega_used = None, None
    for k in range(max_steps + 1):
        report.append(_sim_record(k, t_used, omega_used, shadow.x, shadow.r, x_star, x_state))
        report.final_x = shadow.x
        if np.linalg.norm(shadow.r) <= tol or r_state is None:
            report.status = CONVERGED
            return report, x_state, r_state
        if k == max_steps:
            break
        _guard_memory(k, 2 * k + 4, system.n, mem_limit)
        correlations = system.matrix.T @ shadow.r
        t_used = select_index(strategy, k, system.n, residual=correlations)
        omega_used = relaxation_at(schedule, k)
        x_state, r_state = apply_column_iteration(
            x_state, r_state, system, t_used, omega_used, delta
        )
        assert_normalized(x_state)
        assert_normalized(r_state)
        shadow = classical.column_step(shadow, system, t_used, omega_used)

    report.status = MAX_STEPS
    return report, x_state, r_state


def _sim_record(k, t, relaxation, shadow_x, residual, x_star, state: SimState) -> StepRecord:
    amplitude, direction = extract_good_branch(state)
    shadow_norm = float(np.linalg.norm(shadow_x))
    if amplitude == 0.0 or shadow_norm == 0.0:
        fidelity = 1.0 if amplitude == shadow_norm else 0.0
    else:
        fidelity = float(abs(direction @ shadow_x) / shadow_norm)
    error = None if x_star is None else float(np.linalg.norm(shadow_x - x_star))
    return StepRecord(
        k=k,
        t=t,
        relaxation=relaxation,
        x_norm=shadow_norm,
        residual_norm=float(np.linalg.norm(residual)),
        error_norm=error,
        amplitude=amplitude,
        success_probability=amplitude * amplitude,
        fidelity=fidelity,
    )
