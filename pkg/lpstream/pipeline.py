"""
LPStream: Run Pipeline

Orchestrates one run end to end:
1. Read the input files (dimension inferred unless given)
2. Build the problem plugin and the solver parameters
3. Run the selected model (multipass, turnstile, coordinator, parallel)
4. Optionally compare with the brute-force oracle on the live input
5. Assemble the RunReport

Usage:
    config = RunConfig(problem="meb", inputs=["points.txt"], eps=0.1)
    report = SolverPipeline(config).run()
"""

import logging
from collections import Counter
from typing import Optional

import numpy as np

from lpstream.cli.report import PlanSummary, RunConfig, RunReport, VerifySummary
from lpstream.config import VERIFY_LIMITS
from lpstream.core.params import SolverParams
from lpstream.core.solution import Infeasible
from lpstream.distributed import run_coordinator, run_parallel
from lpstream.errors import UsageError, VerifyRefusedError
from lpstream.problems import (
    BoundedLpProblem,
    ClassificationProblem,
    MebProblem,
    SvmProblem,
    exact_lp,
    exact_meb,
    exact_sdp_grid,
    exact_svm,
    frobenius_inner,
    lp_rows,
    saddle_to_sdp,
    sdp_build,
)
from lpstream.streams import (
    RECORD_KINDS,
    EventStream,
    FileEventStream,
    Op,
    StreamEvent,
    infer_dimension,
    run_multipass,
    run_turnstile,
)

logger = logging.getLogger(__name__)

# Feasibility slack granted to snapped constraint rows (LP, classification, SDP).
ROW_SLACK_FACTOR = 5
EXACT_SLACK = 1e-9


# ============================================================
# Problem construction
# ============================================================

def build_problem(config: RunConfig, d: int):
    if config.problem == "meb":
        return MebProblem(d, config.unit)
    if config.problem == "svm":
        return SvmProblem(d, config.gamma)
    if config.problem == "lp":
        c = config.objective if config.objective is not None else [1.0] + [0.0] * (d - 1)
        return BoundedLpProblem(d, c)
    if config.problem == "classify":
        return ClassificationProblem(d, config.eps)
    if config.problem == "sdp":
        C = None
        if config.objective is not None:
            if len(config.objective) != d * d:
                raise UsageError(f"SDP objective needs {d * d} entries (row-major), got {len(config.objective)}")
            C = np.asarray(config.objective, dtype=float).reshape(d, d)
        return sdp_build(d, C, config.sparsity, config.eps, config.frobenius)
    return saddle_to_sdp(d, config.sparsity, config.eps, config.frobenius)


def build_params(config: RunConfig) -> SolverParams:
    return SolverParams(
        eps=config.eps,
        s=config.s,
        seed=config.seed,
        backend=config.backend,
        iteration_factor=config.iteration_factor,
        sample_size=config.sample_size,
        workers=config.workers,
    )


def live_events(events) -> list:
    """The live multiset's support as insert events, in first-seen order."""
    counts = Counter()
    for event in events:
        counts[(event.point, event.label)] += event.sign
    return [StreamEvent(Op.INSERT, point, label) for (point, label), n in counts.items() if n > 0]


# ============================================================
# Verification
# ============================================================

def check_verify_limits(problem_name: str, d: int, live: int):
    if live > VERIFY_LIMITS["max_points"]:
        raise VerifyRefusedError(f"verify handles at most {VERIFY_LIMITS['max_points']} points, input has {live}")
    if problem_name in ("sdp", "saddle"):
        if d != VERIFY_LIMITS["sdp_dim"]:
            raise VerifyRefusedError(f"SDP verify needs d = {VERIFY_LIMITS['sdp_dim']}, got {d}")
    elif d > VERIFY_LIMITS["max_dim"]:
        raise VerifyRefusedError(f"verify handles d <= {VERIFY_LIMITS['max_dim']}, got {d}")


def _ratio(output: Optional[float], oracle: Optional[float]) -> Optional[float]:
    if output is None or oracle is None or oracle == 0:
        return None
    return output / oracle


def verify_solution(problem, elements: list, solution, eps: float) -> tuple:
    """(VerifySummary, oracle_ratio) against the brute-force optimum of `elements`."""
    infeasible = isinstance(solution, Infeasible)

    if isinstance(problem, MebProblem):
        oracle = exact_meb(elements)
        center = np.asarray(solution.center)
        distances = np.linalg.norm(np.asarray(elements, dtype=float) - center, axis=1)
        summary = VerifySummary(
            oracle="exact_meb",
            oracle_value=oracle.radius,
            output_value=solution.radius,
            oracle_gap=solution.radius - oracle.radius,
            feasible_for_all=bool(np.all(distances <= solution.radius * (1 + EXACT_SLACK) + EXACT_SLACK)),
            agrees_on_feasibility=True,
        )
        return summary, _ratio(solution.radius, oracle.radius)

    if isinstance(problem, SvmProblem):
        Z = [z for z, _ in elements]
        Y = [y for _, y in elements]
        oracle = exact_svm(Z, Y)
        oracle_norm = None if isinstance(oracle, Infeasible) else float(np.linalg.norm(oracle.u))
        output_norm = None if infeasible else float(np.linalg.norm(solution.u))
        feasible = infeasible or all(
            y * (float(np.dot(solution.u, z)) - solution.b) >= 1 - EXACT_SLACK for z, y in elements
        )
        summary = VerifySummary(
            oracle="exact_svm",
            oracle_value=oracle_norm,
            output_value=output_norm,
            oracle_gap=None if None in (oracle_norm, output_norm) else output_norm - oracle_norm,
            feasible_for_all=feasible,
            agrees_on_feasibility=isinstance(oracle, Infeasible) == infeasible,
        )
        return summary, _ratio(output_norm, oracle_norm)

    slack = ROW_SLACK_FACTOR * eps
    if isinstance(problem, ClassificationProblem):
        rows = lp_rows(elements)
    elif isinstance(problem, BoundedLpProblem):
        rows = list(elements)
    else:
        rows = None

    if rows is not None:
        oracle = exact_lp(problem.c, rows, problem.lower, problem.upper)
        oracle_value = None if oracle is None else oracle[0]
        output_value = None if infeasible else problem.objective(solution)
        violation = None if infeasible else max(
            (float(np.dot(a, solution.x)) - b for a, b in rows), default=0.0,
        )
        summary = VerifySummary(
            oracle="exact_lp",
            oracle_value=oracle_value,
            output_value=output_value,
            oracle_gap=None if None in (oracle_value, output_value) else oracle_value - output_value,
            feasible_for_all=infeasible or violation <= slack,
            agrees_on_feasibility=(oracle is None) == infeasible,
        )
        return summary, _ratio(output_value, oracle_value)

    matrices = [(np.asarray(A, dtype=float), b) for A, b in elements]
    oracle_value = exact_sdp_grid(matrices, problem.C, margin=problem.margin)
    output_value = None if infeasible else problem.objective(solution)
    if infeasible:
        feasible = True
    elif problem.margin:
        feasible = all(frobenius_inner(A, solution.matrix) >= b + solution.margin - slack for A, b in matrices)
    else:
        feasible = all(frobenius_inner(A, solution.matrix) <= b + slack for A, b in matrices)
    summary = VerifySummary(
        oracle="exact_sdp_grid",
        oracle_value=oracle_value,
        output_value=output_value,
        oracle_gap=None if None in (oracle_value, output_value) else oracle_value - output_value,
        feasible_for_all=feasible,
        agrees_on_feasibility=(oracle_value is None) == infeasible,
    )
    return summary, _ratio(output_value, oracle_value)


# ============================================================
# Pipeline
# ============================================================

class SolverPipeline:
    """
    Runs one configured solve:
    1. Load and (for distributed models) partition the input
    2. Solve under the chosen model
    3. Verify against the oracle when asked
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.kind = RECORD_KINDS[config.problem]
        self.dimension: Optional[int] = None
        self.problem = None
        self.streams: list = []

    def _dimension(self) -> int:
        if self.config.dim is not None:
            return self.config.dim
        with open(self.config.inputs[0], encoding="utf-8") as handle:
            d = infer_dimension(handle, self.kind)
        logger.info(f"Inferred dimension {d} from {self.config.inputs[0]}")
        return d

    def _partitions(self, streams: list) -> list:
        if len(streams) > 1:
            return streams
        events = streams[0].load().events
        k = self.config.machines
        return [EventStream(events[i::k]) for i in range(k)]

    def run(self) -> RunReport:
        config = self.config
        self.dimension = self._dimension()
        self.problem = build_problem(config, self.dimension)
        params = build_params(config)
        streams = [FileEventStream(path, self.kind, self.dimension) for path in config.inputs]
        self.streams = streams
        logger.info(
            f"Run: problem={config.problem} model={config.model} d={self.dimension} "
            f"eps={config.eps} seed={config.seed} backend={config.backend}"
        )

        # verify limits are checked before the first pass
        live_count = None
        live = []
        if config.verify:
            events = [event for stream in streams for event in stream.load().events]
            live = live_events(events)
            live_count = len(live)
            check_verify_limits(config.problem, self.dimension, live_count)

        passes = load = None
        if config.model == "multipass":
            outcome, passes = run_multipass(streams[0], self.problem, params)
        elif config.model == "turnstile":
            outcome, passes = run_turnstile(
                streams[0], self.problem, params, config.delta_bound, config.centering,
            )
        else:
            runner = run_coordinator if config.model == "coordinator" else run_parallel
            outcome, load = runner(self._partitions(streams), self.problem, params, config.scheduler)

        verify = ratio = None
        if config.verify:
            elements = [self.problem.embed(event) for event in live]
            verify, ratio = verify_solution(self.problem, elements, outcome.solution, config.eps)
            logger.info(f"Verify: ratio={ratio} feasible_for_all={verify.feasible_for_all}")

        plan = outcome.plan
        return RunReport(
            problem=config.problem,
            model=config.model,
            seed=config.seed,
            status="infeasible" if isinstance(outcome.solution, Infeasible) else "solution",
            solution=outcome.solution.to_dict(),
            raw_solution=outcome.raw_solution.to_dict(),
            dimension=self.dimension,
            live_elements=live_count,
            universe_size=str(plan.universe_size),
            plan=PlanSummary(s=plan.s, m=plan.m, mu=plan.mu, growth=plan.growth, max_iterations=plan.max_iterations),
            iterations=outcome.iterations,
            successful_iterations=outcome.successful_iterations,
            exhausted=outcome.exhausted,
            peak_words=outcome.peak_words,
            passes=None if passes is None else passes.passes,
            centering_passes=None if passes is None else passes.centering_passes,
            rounds=None if load is None else load.rounds,
            init_rounds=None if load is None else load.init_rounds,
            max_round_load=None if load is None else load.max_round_load,
            max_round_load_detail=None if load is None else load.max_round_load_detail,
            load_rows=None if load is None else list(load.rows),
            verify=verify,
            oracle_ratio=ratio,
            config=config.model_dump(mode="json", exclude={"report"}),
        )
