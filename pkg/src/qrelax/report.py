"""Per-step run records shared by the classical and simulated engines."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import UsageError

CONVERGED = "converged"
MAX_STEPS = "max-steps"
ERROR = "error"

# Stable key order for line-delimited output.
RECORD_FIELDS = (
    "k",
    "t",
    "relaxation",
    "x_norm",
    "residual_norm",
    "error_norm",
    "amplitude",
    "success_probability",
    "fidelity",
)


@dataclass(frozen=True)
class StepRecord:
    """State of the iterate after step k.

    ``t`` and ``relaxation`` are the selection that produced x_k (None at
    k=0). Amplitude, success probability and fidelity are filled only by
    the simulators.
    """

    k: int
    t: int | None
    relaxation: float | None
    x_norm: float
    residual_norm: float
    error_norm: float | None = None
    amplitude: float | None = None
    success_probability: float | None = None
    fidelity: float | None = None

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in RECORD_FIELDS}


@dataclass
class RunReport:
    """Append-only record stream plus terminal status.

    ``final_x`` holds the terminal iterate so callers can de-normalize
    and display the solution without re-running.
    """

    records: list[StepRecord] = field(default_factory=list)
    status: str = MAX_STEPS
    message: str = ""
    final_x: object = None  # np.ndarray | None

    def append(self, record: StepRecord) -> None:
        if record.k != len(self.records):
            raise UsageError(
                f"records must be appended in step order; got k={record.k}, "
                f"expected {len(self.records)}"
            )
        self.records.append(record)

    @property
    def final(self) -> StepRecord:
        if not self.records:
            raise UsageError("report has no records")
        return self.records[-1]

    @property
    def steps_taken(self) -> int:
        return self.final.k

    def json_lines(self):
        for record in self.records:
            yield json.dumps(record.to_dict())
