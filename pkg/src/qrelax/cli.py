"""Command-line surface: solve, reproduce-paper, verify, sweep."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import branch, classical, statevector, worked_examples
from .encodings import (
    column_residual_unitary,
    column_update_unitary,
    row_unitary,
    state_prep_col,
    state_prep_row,
    verify_unitary,
)
from .errors import QrelaxError, UsageError
from .loaders import load_system
from .report import CONVERGED, RunReport
from .schedules import CLASSICAL, QUANTUM, RelaxationSchedule, SelectionStrategy
from .system import COLUMNS_NORMALIZED, LinearSystem, normalize_columns, normalize_rows

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_STEPS = 2

MODES = (
    "classical-row",
    "classical-column",
    "sim-row",
    "sim-column",
    "branch-row",
    "branch-column",
)


@dataclass(frozen=True)
class RunConfig:
    """One solver invocation; round-trips losslessly through JSON."""

    mode: str
    system_source: str
    system_format: str = "csv"
    rhs_source: str | None = None
    x0: str = "e1"
    schedule: str = "constant:1.0"
    strategy: str = "cyclic"
    steps: int = 100
    tol: float = 1e-10
    seed: int = 0
    mem_limit: int = statevector.DEFAULT_MEM_LIMIT
    out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"mode {self.mode!r} not one of {MODES}")
        if self.steps < 0:
            raise UsageError(f"steps must be >= 0, got {self.steps}")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


def _resolve_x0(text: str, n: int) -> np.ndarray:
    text = (text or "e1").strip()
    if text.startswith("e") and text[1:].isdigit():
        idx = int(text[1:])
        if not 1 <= idx <= n:
            raise UsageError(f"basis index {text} outside 1..{n}")
        x0 = np.zeros(n)
        x0[idx - 1] = 1.0
        return x0
    try:
        x0 = np.array([float(tok) for tok in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse x0 value {text!r}") from None
    if x0.size != n:
        raise UsageError(f"x0 has {x0.size} entries, expected {n}")
    return x0


def _build_schedule(text: str, domain: str) -> RelaxationSchedule:
    name, _, args = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "constant":
            return RelaxationSchedule.constant(float(args), domain)
        if name == "decaying":
            return RelaxationSchedule.decaying(float(args), domain)
        if name == "seq":
            return RelaxationSchedule.explicit(
                [float(tok) for tok in args.split(",")], domain
            )
    except ValueError:
        raise UsageError(f"cannot parse schedule {text!r}") from None
    raise UsageError(f"unknown schedule {name!r} (constant/decaying/seq)")


def _build_strategy(text: str, seed: int) -> SelectionStrategy:
    name, _, args = text.partition(":")
    name = name.strip().lower()
    if name == "cyclic":
        return SelectionStrategy.cyclic()
    if name == "random":
        return SelectionStrategy.random_uniform(seed)
    if name == "greedy":
        return SelectionStrategy.greedy_residual()
    if name == "seq":
        try:
            return SelectionStrategy.explicit([int(tok) for tok in args.split(",")])
        except ValueError:
            raise UsageError(f"cannot parse strategy {text!r}") from None
    raise UsageError(f"unknown strategy {name!r} (cyclic/random/greedy/seq)")


def _prepare(config: RunConfig):
    raw = load_system(config.system_source, config.system_format, rhs=config.rhs_source)
    if config.mode.endswith("row"):
        system = normalize_rows(raw)
    else:
        system = normalize_columns(raw)
    domain = CLASSICAL if config.mode.startswith("classical") else QUANTUM
    schedule = _build_schedule(config.schedule, domain)
    strategy = _build_strategy(config.strategy, config.seed)
    x0 = _resolve_x0(config.x0, system.n)
    return system, x0, schedule, strategy


def _execute(config: RunConfig, system, x0, schedule, strategy):
    """Run the configured engine; returns (report, summary extras)."""
    extras = {}
    if config.mode == "classical-row":
        report = classical.run_classical(
            system, x0, schedule, strategy, config.steps, mode="row", tol=config.tol
        )
    elif config.mode == "classical-column":
        report = classical.run_classical(
            system, x0, schedule, strategy, config.steps, mode="column", tol=config.tol
        )
    elif config.mode == "branch-row":
        report = branch.run_branch(
            system, x0, schedule, strategy, config.steps, mode="row", tol=config.tol
        )
        extras["ancillas"] = 3 * report.steps_taken + 2
    elif config.mode == "branch-column":
        report = branch.run_branch(
            system, x0, schedule, strategy, config.steps, mode="column", tol=config.tol
        )
        extras["ancillas"] = 2 * (report.steps_taken + 1)
    elif config.mode == "sim-row":
        report, state = statevector.run_algorithm1(
            system, x0, schedule, strategy, config.steps,
            tol=config.tol, mem_limit=config.mem_limit,
        )
        extras["ancillas"] = state.layout.ancillas
        extras["v"] = state.v
    else:
        report, x_state, _ = statevector.run_algorithm2(
            system, x0, schedule, strategy, config.steps,
            tol=config.tol, mem_limit=config.mem_limit,
        )
        extras["ancillas"] = x_state.layout.ancillas
        extras["v"] = x_state.v
    return report, extras


def _summary_lines(config: RunConfig, system: LinearSystem, report: RunReport, extras) -> list[str]:
    final = report.final
    lines = [
        f"mode: {config.mode}",
        f"n: {system.n}  normalization: {system.normalization}",
        f"scales: {_fmt_vector(system.scale)}",
        f"status: {report.status}  steps: {report.steps_taken}",
        f"final residual: {final.residual_norm:.6e}",
        f"final x norm: {final.x_norm:.12g}",
    ]
    if report.final_x is not None:
        lines.append(f"final x: {_fmt_vector(report.final_x)}")
        if system.normalization == COLUMNS_NORMALIZED:
            lines.append(
                f"de-normalized x: {_fmt_vector(system.denormalize_solution(report.final_x))}"
            )
    if final.error_norm is not None:
        lines.append(f"final error vs direct solve: {final.error_norm:.6e}")
    if "v" in extras:
        lines.append(f"v: {extras['v']:.12g}")
    if final.amplitude is not None:
        lines.append(f"good-branch amplitude: {final.amplitude:.12g}")
        lines.append(f"success probability: {final.success_probability:.12g}")
    if "ancillas" in extras:
        layout = statevector.RegisterLayout(extras["ancillas"], system.n)
        lines.append(
            f"ancilla qubits: {layout.ancillas}  data qubits: "
            f"{layout.qubit_total - layout.ancillas}  total: {layout.qubit_total}"
        )
    return lines


def _fmt_vector(vec) -> str:
    if vec is None:
        return "none"
    return "[" + ", ".join(f"{float(v):.12g}" for v in np.asarray(vec)) + "]"


def _write_outputs(config: RunConfig, system, report: RunReport, summary: list[str]) -> None:
    if not config.out:
        return
    meta = {
        "mode": config.mode,
        "n": system.n,
        "normalization": system.normalization,
        "scale": None if system.scale is None else [float(s) for s in system.scale],
        "schedule": config.schedule,
        "strategy": config.strategy,
        "tol": config.tol,
        "seed": config.seed,
    }
    with open(config.out + ".jsonl", "w") as fh:
        fh.write(json.dumps({"meta": meta}) + "\n")
        for line in report.json_lines():
            fh.write(line + "\n")
    with open(config.out + ".summary.txt", "w") as fh:
        fh.write("\n".join(summary) + "\n")


def cmd_solve(config: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    system, x0, schedule, strategy = _prepare(config)
    report, extras = _execute(config, system, x0, schedule, strategy)
    summary = _summary_lines(config, system, report, extras)
    _write_outputs(config, system, report, summary)
    print("\n".join(summary), file=stdout)
    return EXIT_OK if report.status == CONVERGED else EXIT_MAX_STEPS


def cmd_reproduce_paper(stdout=None) -> int:
    """Replay the built-in worked examples on all three engines and verify
    every published value at 1e-10; prints one row per check."""
    stdout = stdout or sys.stdout
    started = time.perf_counter()
    checks = worked_examples.reference_checks()
    width = max(len(c.quantity) for c in checks)
    failures = 0
    for c in checks:
        ok = c.passed
        failures += 0 if ok else 1
        print(
            f"[{'PASS' if ok else 'FAIL'}] {c.example:<6} {c.engine:<11} "
            f"{c.quantity:<{width}}  expected={c.expected}  actual={c.actual}  "
            f"deviation={c.deviation:.3e}",
            file=stdout,
        )
    elapsed = time.perf_counter() - started
    print(
        f"{len(checks) - failures}/{len(checks)} checks passed "
        f"(tolerance {worked_examples.TOLERANCE:g}, {elapsed:.2f}s)",
        file=stdout,
    )
    return EXIT_OK if failures == 0 else EXIT_ERROR


def _verify_unitaries(trials: int, seed: int):
    """Random-draw orthogonality/involution suite over all constructors."""
    rng = np.random.default_rng(seed)
    worst = {"orthogonality": 0.0, "symmetry": 0.0, "involution": 0.0}
    for trial in range(trials):
        n = int(rng.integers(2, 17))
        vec = rng.normal(size=n)
        vec /= np.linalg.norm(vec)
        value = float(rng.uniform(0.0, 1.0))
        t = int(rng.integers(1, n + 1))
        built = [
            row_unitary(vec, value),
            column_residual_unitary(vec, value),
            column_update_unitary(t, value, n),
        ]
        for unit in built:
            rep = verify_unitary(unit)
            worst["orthogonality"] = max(worst["orthogonality"], rep.max_orthogonality_deviation)
            worst["symmetry"] = max(worst["symmetry"], rep.symmetry_deviation)
            worst["involution"] = max(worst["involution"], rep.involution_deviation)
            if not (rep.passed and rep.symmetric and rep.involutory):
                return worst, f"trial {trial}: n={n} t={t} value={value!r}"
        for prep in (state_prep_row(vec), state_prep_col(vec, t)):
            rep = verify_unitary(prep)
            worst["orthogonality"] = max(worst["orthogonality"], rep.max_orthogonality_deviation)
            if not rep.passed:
                return worst, f"trial {trial}: prep n={n} t={t}"
    return worst, None


def _verify_equivalence(trials: int, seed: int):
    """Cross-engine suite: statevector vs branch vs classical per step."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(trials):
        n = int(rng.integers(2, 5))
        a = rng.normal(size=(n, n))
        b = a @ rng.normal(size=n)
        x0 = rng.normal(size=n)
        x0 /= np.linalg.norm(x0)
        steps = [(int(rng.integers(1, n + 1)), float(rng.uniform(0, 1))) for _ in range(3)]

        sys_r = normalize_rows(LinearSystem(a, b))
        state = statevector.init_row_state(x0)
        row_it = classical.RowIterate(x0)
        row_br = branch.init_row_branch(x0)
        for t, lam in steps:
            state = statevector.apply_row_iteration(
                statevector.prepare_Y(state, sys_r, t), sys_r, t, lam
            )
            statevector.assert_normalized(state)
            row_it = classical.kaczmarz_step(row_it, sys_r, t, lam)
            row_br = branch.row_branch_step(row_br, sys_r, t, lam)
            amp, direction = statevector.extract_good_branch(state)
            x_norm = np.linalg.norm(row_it.x)
            worst = max(worst, abs(amp - x_norm / state.v), abs(amp - row_br.amplitude))
            if x_norm > 1e-9:
                worst = max(worst, abs(1.0 - abs(direction @ (row_it.x / x_norm))))

        sys_c = normalize_columns(LinearSystem(a, b))
        init = statevector.init_column_states(x0, sys_c)
        if init.converged:
            continue
        x_state, r_state = init.x_state, init.r_state
        col_it = classical.ColumnIterate(x0, sys_c.residual(x0))
        col_br = branch.init_column_branch(x0, sys_c)
        for t, omega in steps:
            x_state, r_state = statevector.apply_column_iteration(
                x_state, r_state, sys_c, t, omega, init.delta
            )
            statevector.assert_normalized(x_state)
            statevector.assert_normalized(r_state)
            col_it = classical.column_step(col_it, sys_c, t, omega)
            col_br = branch.column_branch_step(col_br, sys_c, t, omega)
            amp, _ = statevector.extract_good_branch(x_state)
            r_amp, _ = statevector.extract_good_branch(r_state)
            worst = max(
                worst,
                abs(amp - np.linalg.norm(col_it.x) / x_state.v),
                abs(amp - col_br.amplitude),
                abs(r_amp - init.delta * np.linalg.norm(col_it.r)),
                abs(r_amp - col_br.residual_amplitude),
            )
        if worst > 1e-9:
            return worst, f"trial {trial}: n={n} steps={steps!r}"
    return worst, None


def cmd_verify(trials: int = 1000, seed: int = 0, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if trials < 1:
        raise UsageError(f"trials must be >= 1, got {trials}")
    worst, failure = _verify_unitaries(trials, seed)
    print(
        f"unitarity suite ({trials} trials): max ||M^T M - I||_max = "
        f"{worst['orthogonality']:.3e}, symmetry {worst['symmetry']:.3e}, "
        f"involution {worst['involution']:.3e}",
        file=stdout,
    )
    if failure is not None:
        print(f"FAIL unitarity: {failure} (seed {seed})", file=stdout)
        return EXIT_ERROR

    equiv_trials = max(1, trials // 50)
    worst_dev, failure = _verify_equivalence(equiv_trials, seed)
    print(
        f"equivalence suite ({equiv_trials} systems): max cross-engine deviation = "
        f"{worst_dev:.3e}",
        file=stdout,
    )
    if failure is not None:
        print(f"FAIL equivalence: {failure} (seed {seed})", file=stdout)
        return EXIT_ERROR
    print("all suites passed", file=stdout)
    return EXIT_OK


def cmd_sweep(config: RunConfig, grid: list[float], stdout=None) -> int:
    """One solver run per relaxation value, fanned out across threads;
    rows are merged back in grid order."""
    stdout = stdout or sys.stdout
    system, x0, _, strategy = _prepare(config)
    domain = CLASSICAL if config.mode.startswith("classical") else QUANTUM

    def one(value: float):
        schedule = RelaxationSchedule.constant(value, domain)
        report, _ = _execute(config, system, x0, schedule, strategy)
        final = report.final
        return {
            "relaxation": value,
            "status": report.status,
            "steps": report.steps_taken,
            "final_residual": final.residual_norm,
            "final_success_probability": final.success_probability,
        }

    with ThreadPoolExecutor(max_workers=min(8, max(1, len(grid)))) as pool:
        rows = list(pool.map(one, grid))

    header = "relaxation,status,steps,final_residual,final_success_probability"
    lines = [header] + [
        f"{r['relaxation']:g},{r['status']},{r['steps']},{r['final_residual']:.12e},"
        + ("" if r["final_success_probability"] is None else f"{r['final_success_probability']:.12e}")
        for r in rows
    ]
    text = "\n".join(lines)
    if config.out:
        with open(config.out + ".csv", "w") as fh:
            fh.write(text + "\n")
    print(text, file=stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrelax",
        description="Relaxed row/column iteration solvers: classical, statevector, branch",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one engine on one system")
    _add_run_flags(solve)

    sub.add_parser("reproduce-paper", help="check the built-in worked examples")

    verify = sub.add_parser("verify", help="unitarity and cross-engine property suites")
    verify.add_argument("--trials", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)

    sweep = sub.add_parser("sweep", help="one run per relaxation value")
    _add_run_flags(sweep)
    sweep.add_argument("--grid", required=True, help="comma list of relaxation values")
    return parser


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--system", required=True, help="path (csv/matrixmarket) or inline text")
    parser.add_argument("--format", default="csv", choices=("matrixmarket", "csv", "inline"))
    parser.add_argument("--rhs", default=None, help="rhs file for matrixmarket input")
    parser.add_argument("--mode", default="classical-row", choices=MODES)
    parser.add_argument("--x0", default="e1", help="'e<i>' or comma list, default e1")
    parser.add_argument("--schedule", default="constant:1.0", help="constant:V | decaying:V | seq:V,...")
    parser.add_argument("--strategy", default="cyclic", help="cyclic | random | greedy | seq:T,...")
    parser.add_argument("--steps", type=int, default=100)
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mem-limit", type=int, default=statevector.DEFAULT_MEM_LIMIT)
    parser.add_argument("--out", default=None, help="output prefix for record/summary files")


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        system_source=args.system,
        system_format=args.format,
        rhs_source=args.rhs,
        x0=args.x0,
        schedule=args.schedule,
        strategy=args.strategy,
        steps=args.steps,
        tol=args.tol,
        seed=args.seed,
        mem_limit=args.mem_limit,
        out=args.out,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(_config_from_args(args))
        if args.command == "reproduce-paper":
            return cmd_reproduce_paper()
        if args.command == "verify":
            return cmd_verify(args.trials, args.seed)
        if args.command == "sweep":
            grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
            if not grid:
                raise UsageError("empty sweep grid")
            return cmd_sweep(_config_from_args(args), grid)
    except QrelaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
