"""
LPStream: Run Configuration and Report Schema

RunConfig is everything a run depends on; RunReport is what a run writes.
Reports are JSON with stable field order, floats rounded to 12 significant
digits and the universe size as a decimal string (it may exceed 2^64), so
two runs with the same input, config and seed produce identical bytes.
"""

import json
import logging
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from lpstream.config import DEFAULT_DELTA_BOUND, DEFAULT_RUN_SETTINGS

logger = logging.getLogger(__name__)

PROBLEMS = ("meb", "svm", "lp", "sdp", "classify", "saddle")
MODELS = ("multipass", "turnstile", "coordinator", "parallel")
SIGNIFICANT_DIGITS = 12


# ============================================================
# Config
# ============================================================

class RunConfig(BaseModel):
    problem: Literal["meb", "svm", "lp", "sdp", "classify", "saddle"]
    model: Literal["multipass", "turnstile", "coordinator", "parallel"] = "multipass"
    inputs: list[str] = Field(min_length=1)
    eps: float = 0.1
    s: Optional[int] = None
    gamma: float = 1.0
    machines: int = 1
    seed: int = DEFAULT_RUN_SETTINGS["seed"]
    backend: Literal["exact", "randomized"] = DEFAULT_RUN_SETTINGS["backend"]
    dim: Optional[int] = None
    delta_bound: int = DEFAULT_DELTA_BOUND
    unit: float = 1.0
    sparsity: Optional[int] = None
    frobenius: float = 1.0
    objective: Optional[list[float]] = None
    centering: Literal["binary", "bucketed"] = "binary"
    scheduler: Literal["round_robin", "threaded"] = "round_robin"
    workers: int = 1
    sample_size: Optional[int] = None
    iteration_factor: float = DEFAULT_RUN_SETTINGS["iteration_factor"]
    verify: bool = False
    report: Optional[str] = None

    @field_validator("backend", mode="before")
    @classmethod
    def sketch_alias(cls, v):
        return "randomized" if v == "sketch" else v

    @field_validator("eps")
    @classmethod
    def eps_range(cls, v):
        if not 0 < v <= 0.5:
            raise ValueError(f"eps must be in (0, 1/2], got {v}")
        return v

    @field_validator("gamma")
    @classmethod
    def gamma_range(cls, v):
        if not 0 < v <= 2:
            raise ValueError(f"gamma must be in (0, 2], got {v}")
        return v

    @field_validator("machines", "workers")
    @classmethod
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @field_validator("s", "dim", "sparsity", "sample_size")
    @classmethod
    def positive_or_unset(cls, v):
        if v is not None and v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @field_validator("seed")
    @classmethod
    def seed_range(cls, v):
        if not 0 <= v < 1 << 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {v}")
        return v

    @field_validator("delta_bound")
    @classmethod
    def delta_range(cls, v):
        if v < 1:
            raise ValueError(f"delta bound must be >= 1, got {v}")
        return v

    @field_validator("frobenius", "iteration_factor", "unit")
    @classmethod
    def positive(cls, v):
        if v <= 0:
            raise ValueError(f"must be > 0, got {v}")
        return v

    @model_validator(mode="after")
    def inputs_match_model(self):
        if self.model in ("multipass", "turnstile") and len(self.inputs) != 1:
            raise ValueError(f"the {self.model} model reads exactly one input file")
        return self

    @property
    def partition_count(self) -> int:
        """Machines: one per input file, or `machines` slices of a single file."""
        return len(self.inputs) if len(self.inputs) > 1 else self.machines


# ============================================================
# Report
# ============================================================

class PlanSummary(BaseModel):
    s: int
    m: int
    mu: float
    growth: float
    max_iterations: int


class VerifySummary(BaseModel):
    oracle: str
    oracle_value: Optional[float] = None
    output_value: Optional[float] = None
    oracle_gap: Optional[float] = None
    feasible_for_all: bool
    agrees_on_feasibility: bool


class RunReport(BaseModel):
    problem: str
    model: str
    seed: int
    status: Literal["solution", "infeasible"]
    solution: dict[str, Any]
    raw_solution: dict[str, Any]
    dimension: int
    live_elements: Optional[int] = None
    universe_size: str
    plan: PlanSummary
    iterations: int
    successful_iterations: int
    exhausted: bool = False
    peak_words: int
    passes: Optional[int] = None
    centering_passes: Optional[int] = None
    rounds: Optional[int] = None
    init_rounds: Optional[int] = None
    max_round_load: Optional[int] = None
    max_round_load_detail: Optional[int] = None
    load_rows: Optional[list[dict[str, Any]]] = None
    verify: Optional[VerifySummary] = None
    oracle_ratio: Optional[float] = None
    config: dict[str, Any]


def round_floats(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    return value


def emit_report(report: RunReport, path: Optional[str] = None) -> str:
    """Serialize a report (and write it when `path` is given)."""
    data = round_floats(report.model_dump(mode="json", exclude_none=True))
    text = json.dumps(data, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"Report written to {path}")
    return text


def load_report(path: str) -> RunReport:
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
