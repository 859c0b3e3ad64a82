from lpstream.cli.report import (
    MODELS,
    PROBLEMS,
    PlanSummary,
    RunConfig,
    RunReport,
    VerifySummary,
    emit_report,
    load_report,
    round_floats,
)

__all__ = [
    "MODELS",
    "PROBLEMS",
    "PlanSummary",
    "RunConfig",
    "RunReport",
    "VerifySummary",
    "emit_report",
    "load_report",
    "round_floats",
]
