"""
LPStream: Clarkson-style Solver Loop

    repeat (iteration t = 0, 1, ...):
        B    <- sample_m_points            (pass 1 of the iteration)
        f(B) <- problem.solve_basis(unsnap(B))
        check_violators_weight              (pass 2 of the iteration)
        no violators   -> return problem.correct_solution(f(B), eps)
        successful     -> store f(B): its violators gain a factor N^(1/s)

When the iteration cap is hit, problems that report exhaustion as
infeasibility (SVM) return Infeasible; the others raise.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

from lpstream.core.params import IterationPlan, SolverParams
from lpstream.core.sampling import check_violators_weight, sample_m_points
from lpstream.core.solution import INFEASIBLE, Solution
from lpstream.core.weights import WeightOracle
from lpstream.errors import IterationBudgetExceeded

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    draws: int
    distinct: int
    successful: bool
    violators_empty: bool
    totals: tuple
    violators: tuple


@dataclass
class SolveOutcome:
    solution: Solution
    raw_solution: Solution
    iterations: int
    successful_iterations: int
    plan: IterationPlan
    trace: list = field(default_factory=list)
    peak_words: int = 0
    exhausted: bool = False


def solve(source, problem, params: SolverParams, plan: Optional[IterationPlan] = None) -> SolveOutcome:
    plan = plan or params.plan(source.universe_size, problem)
    oracle = WeightOracle(problem, source.unsnap, plan)
    trace = []
    peak_words = 0

    for t in range(plan.max_iterations):
        sample = sample_m_points(source, oracle, params, plan, t)
        candidate = problem.solve_basis([source.unsnap(i) for i in sample.points])
        check = check_violators_weight(source, oracle, params, plan, t, candidate)

        record = IterationRecord(
            t, len(sample.draws), len(sample.points), check.success,
            check.violators_empty, check.totals, check.violators,
        )
        trace.append(record)
        peak_words = max(
            peak_words,
            sample.words + oracle.words() + len(sample.draws),
            check.words + oracle.words() + candidate.words,
        )
        logger.debug(
            f"iteration {t}: draws={record.draws} distinct={record.distinct} "
            f"success={check.success} totals={check.totals} violators={check.violators}"
        )

        if check.violators_empty:
            logger.info(f"Solved in {t + 1} iterations ({len(oracle.stored)} successful updates)")
            return SolveOutcome(
                solution=problem.correct_solution(candidate, params.eps),
                raw_solution=candidate,
                iterations=t + 1,
                successful_iterations=sum(r.successful for r in trace),
                plan=plan,
                trace=trace,
                peak_words=peak_words,
            )
        if check.success:
            oracle.store(candidate)

    logger.warning(f"Iteration cap {plan.max_iterations} reached without an empty violator set")
    if problem.exhausted_as_infeasible:
        return SolveOutcome(
            solution=INFEASIBLE,
            raw_solution=INFEASIBLE,
            iterations=plan.max_iterations,
            successful_iterations=sum(r.successful for r in trace),
            plan=plan,
            trace=trace,
            peak_words=peak_words,
            exhausted=True,
        )
    raise IterationBudgetExceeded(
        f"{problem.name}: no solution after {plan.max_iterations} iterations "
        f"(nu={plan.nu}, s={plan.s}); raise the iteration factor or lower s"
    )
