"""
LPStream: Coordinator and Parallel Models

Simulates k machines talking to a coordinator in synchronous rounds:

    init 1       machines send a center candidate (first local point)
    init 2       coordinator broadcasts the lexicographically smallest one,
                 machines answer with their max distance to it
                 (radial problems only; origin-anchored problems need
                 one setup round, reported as init_rounds)

    per iteration t:
    R1 weights   coordinator broadcasts the last successful solution (or
                 r_max in iteration 0); machines run their sampling pass and
                 report per-class counts
    R2 sample    coordinator splits the m draws by machine weight
                 (multinomial), machines return exactly that many snapped
                 indices; coordinator solves f(B)
    R3 check     coordinator broadcasts f(B); machines run their check pass
                 and report per-class totals and violators

Stops when no machine reports a violator. The parallel model is the same
protocol with machine 0 acting as the coordinator; its traffic is booked to
machine 0.

Usage:
    outcome, load = run_coordinator([part_a, part_b], MebProblem(2), SolverParams(seed=7))
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np

from lpstream.core.params import SolverParams
from lpstream.core.problem import NetAnchor
from lpstream.core.sampling import is_successful
from lpstream.core.seeds import SeedPurpose, derive_rng
from lpstream.core.solution import INFEASIBLE
from lpstream.core.solver import IterationRecord, SolveOutcome
from lpstream.core.weights import scaled_class_weights
from lpstream.distributed.machine import Machine
from lpstream.distributed.messages import (
    COORDINATOR,
    CenterBroadcast,
    Message,
    RadiusBroadcast,
    SampleQuota,
    SolutionBroadcast,
    machine_name,
)
from lpstream.distributed.meter import LoadMeter, LoadReport
from lpstream.errors import EmptyInputError, IterationBudgetExceeded, ProtocolError, UsageError

logger = logging.getLogger(__name__)

SCHEDULERS = ("round_robin", "threaded")


def allocate_quotas(weights: Sequence[float], m: int, rng: np.random.Generator) -> list:
    """Split m draws over machines with probabilities proportional to `weights`."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise UsageError(f"machine weights must be >= 0, got {list(w)}")
    total = w.sum()
    if total <= 0:
        raise EmptyInputError("every machine reports zero weight")
    return [int(y) for y in rng.multinomial(m, w / total)]


def _sum_counts(reports: Sequence[tuple]) -> tuple:
    width = max(len(r) for r in reports)
    return tuple(sum(r[i] if i < len(r) else 0 for r in reports) for i in range(width))


class Coordinator:
    def __init__(
        self, problem, params: SolverParams,
        scheduler: str = "round_robin", alias: Optional[dict] = None,
    ):
        if scheduler not in SCHEDULERS:
            raise UsageError(f"scheduler must be one of {SCHEDULERS}, got {scheduler!r}")
        self.problem = problem
        self.params = params
        self.scheduler = scheduler
        self.meter = LoadMeter(alias)
        self.machines: list = []
        self.snapper = None
        self.plan = None
        self.anchor: Optional[NetAnchor] = None
        self.init_rounds = 0

    def add_machine(self, partition) -> Machine:
        machine = Machine(len(self.machines), partition, self.problem, self.params)
        self.machines.append(machine)
        return machine

    # --- plumbing ---

    def _each(self, work: Callable[[Machine], Message]) -> list:
        """Run one step on every machine; replies come back in machine order."""
        if self.scheduler == "threaded" and len(self.machines) > 1:
            with ThreadPoolExecutor(max_workers=len(self.machines)) as pool:
                replies = list(pool.map(work, self.machines))
        else:
            replies = [work(machine) for machine in self.machines]
        for reply in replies:
            self.meter.record(reply)
        return replies

    def _broadcast(self, build: Callable[[str], Message]):
        for machine in self.machines:
            self.meter.record(build(machine.name))

    # --- protocol ---

    def initialize(self):
        if not self.machines:
            raise UsageError("the coordinator needs at least one machine")

        self.meter.begin_round("init: center candidates")
        candidates = [c.point for c in self._each(lambda m: m.center_candidate()) if c.point is not None]
        if not candidates:
            raise EmptyInputError("every partition is empty")

        if self.problem.radial:
            center = min(candidates)
            self.meter.begin_round("init: center broadcast")
            self._broadcast(lambda name: CenterBroadcast(COORDINATOR, name, center))
            reports = self._each(lambda m: m.max_distance(center))
            self.anchor = NetAnchor(center, max(r.distance for r in reports))
            logger.info(f"Center {self.anchor.center}, r_max={self.anchor.r_max:.6g}")

        self.init_rounds = self.meter.rounds
        self.snapper = self.problem.build_snapper(self.params.eps, self.anchor)
        self.plan = self.params.plan(self.snapper.size, self.problem)
        for machine in self.machines:
            machine.attach(self.snapper, self.plan)

    def run(self) -> tuple:
        """Returns (SolveOutcome, LoadReport)."""
        self.initialize()
        plan = self.plan
        trace = []
        stored = []
        pending = None
        peak_words = 0

        for t in range(plan.max_iterations):
            # R1
            self.meter.begin_round(f"iteration {t}: weights")
            if pending is not None:
                solution = pending
                self._broadcast(lambda name: SolutionBroadcast(COORDINATOR, name, solution))
                for machine in self.machines:
                    machine.store(solution)
                pending = None
            elif t == 0 and self.anchor is not None:
                r_max = self.anchor.r_max
                self._broadcast(lambda name: RadiusBroadcast(COORDINATOR, name, r_max))
            weight_reports = self._each(lambda m: m.weight_report(t))

            counts = [r.counts for r in weight_reports]
            live = [i for i, c in enumerate(_sum_counts(counts)) if c > 0]
            top = live[-1] if live else 0
            weights = [sum(scaled_class_weights(c, plan.log_growth, top)) for c in counts]
            quotas = allocate_quotas(weights, plan.m, derive_rng(self.params.seed, SeedPurpose.QUOTA, t))

            # R2
            self.meter.begin_round(f"iteration {t}: sample")
            for machine, quota in zip(self.machines, quotas):
                self.meter.record(SampleQuota(COORDINATOR, machine.name, quota))
            batches = self._each(lambda m: m.sample_batch(t, quotas[m.machine_id]))
            draws = [index for batch in batches for index in batch.indices]
            if len(draws) != plan.m:
                raise ProtocolError(f"received {len(draws)} sample points, expected {plan.m}")
            points = sorted(set(draws))
            candidate = self.problem.solve_basis([self.snapper.unsnap(i) for i in points])

            # R3
            self.meter.begin_round(f"iteration {t}: check")
            self._broadcast(lambda name: SolutionBroadcast(COORDINATOR, name, candidate))
            checks = self._each(lambda m: m.violator_report(t, candidate))
            totals = _sum_counts([c.totals for c in checks])
            violators = _sum_counts([c.violators for c in checks])
            success = is_successful(totals, violators, plan)
            empty = not any(violators)

            trace.append(IterationRecord(t, len(draws), len(points), success, empty, totals, violators))
            peak_words = max(
                peak_words,
                len(draws) + candidate.words + sum(s.words for s in stored),
                max(m.peak_words for m in self.machines),
            )
            logger.debug(f"iteration {t}: quotas={quotas} success={success} violators={violators}")

            if empty:
                logger.info(
                    f"Coordinator solved in {t + 1} iterations, {self.meter.rounds} rounds, "
                    f"max load {self.meter.report(self.init_rounds).max_round_load} words"
                )
                outcome = SolveOutcome(
                    solution=self.problem.correct_solution(candidate, self.params.eps),
                    raw_solution=candidate,
                    iterations=t + 1,
                    successful_iterations=sum(r.successful for r in trace),
                    plan=plan,
                    trace=trace,
                    peak_words=peak_words,
                )
                return outcome, self.meter.report(self.init_rounds)
            if success:
                stored.append(candidate)
                pending = candidate

        logger.warning(f"Iteration cap {plan.max_iterations} reached without an empty violator set")
        if self.problem.exhausted_as_infeasible:
            outcome = SolveOutcome(
                solution=INFEASIBLE,
                raw_solution=INFEASIBLE,
                iterations=plan.max_iterations,
                successful_iterations=sum(r.successful for r in trace),
                plan=plan,
                trace=trace,
                peak_words=peak_words,
                exhausted=True,
            )
            return outcome, self.meter.report(self.init_rounds)
        raise IterationBudgetExceeded(
            f"{self.problem.name}: no solution after {plan.max_iterations} iterations on "
            f"{len(self.machines)} machines"
        )


def run_coordinator(partitions: Sequence, problem, params: SolverParams, scheduler: str = "round_robin") -> tuple:
    coordinator = Coordinator(problem, params, scheduler)
    for partition in partitions:
        coordinator.add_machine(partition)
    return coordinator.run()


def run_parallel(partitions: Sequence, problem, params: SolverParams, scheduler: str = "round_robin") -> tuple:
    """Coordinator protocol with machine 0 doubling as the coordinator."""
    coordinator = Coordinator(problem, params, scheduler, alias={COORDINATOR: machine_name(0)})
    for partition in partitions:
        coordinator.add_machine(partition)
    return coordinator.run()
