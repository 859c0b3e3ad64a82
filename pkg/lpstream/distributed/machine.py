"""
LPStream: Machine

One logical machine of the coordinator model. It owns a partition (a
replayable event sequence) and answers the coordinator's requests; it never
sees another machine's data. Sketch seeds are derived from the shared master
seed, so banks built on different machines are mergeable and a single
machine reproduces the streaming run exactly.
"""

import logging
import math
from typing import Optional

from lpstream.core.params import IterationPlan, SolverParams
from lpstream.core.sampling import build_sample_bank, draw_from_bank, fill_check_banks
from lpstream.core.seeds import SeedPurpose, derive_rng
from lpstream.core.weights import WeightOracle
from lpstream.distributed.messages import (
    COORDINATOR,
    CenterCandidate,
    MaxDistReport,
    SampleBatch,
    ViolatorWeightReport,
    WeightReport,
    machine_name,
)
from lpstream.errors import ProtocolError, UsageError
from lpstream.streams.events import Op, as_stream
from lpstream.streams.source import SnappedSource

logger = logging.getLogger(__name__)


class Machine:
    def __init__(self, machine_id: int, partition, problem, params: SolverParams):
        self.machine_id = machine_id
        self.name = machine_name(machine_id)
        self.stream = as_stream(partition)
        self.problem = problem
        self.params = params
        self.source: Optional[SnappedSource] = None
        self.oracle: Optional[WeightOracle] = None
        self.plan: Optional[IterationPlan] = None
        self.bank = None
        self.peak_words = 0

    # --- init rounds ---

    def center_candidate(self) -> CenterCandidate:
        """Local pass: validate the partition and offer its first point."""
        first = None
        for event in self.stream.replay():
            if event.op is Op.DELETE:
                raise UsageError(f"{self.name}: partitions are insert-only")
            element = self.problem.embed(event)
            if first is None:
                first = tuple(self.problem.position(element))
        return CenterCandidate(self.name, COORDINATOR, first)

    def max_distance(self, center: tuple) -> MaxDistReport:
        distance = 0.0
        for event in self.stream.replay():
            distance = max(distance, math.dist(self.problem.position(self.problem.embed(event)), center))
        return MaxDistReport(self.name, COORDINATOR, distance)

    def attach(self, snapper, plan: IterationPlan):
        self.source = SnappedSource(self.stream, self.problem, snapper)
        self.oracle = WeightOracle(self.problem, snapper.unsnap, plan)
        self.plan = plan

    # --- iteration rounds ---

    def store(self, solution):
        self.oracle.store(solution)

    def weight_report(self, t: int) -> WeightReport:
        """Sampling pass: fill this iteration's bank, report per-class counts."""
        self.bank = build_sample_bank(self.source, self.oracle, self.params, self.plan, t)
        self.peak_words = max(self.peak_words, self.bank.words() + self.oracle.words())
        return WeightReport(self.name, COORDINATOR, tuple(self.bank.counts()))

    def sample_batch(self, t: int, quota: int) -> SampleBatch:
        if quota == 0:
            return SampleBatch(self.name, COORDINATOR, ())
        if self.bank is None or not any(self.bank.counts()):
            raise ProtocolError(f"{self.name}: quota {quota} for an empty partition")
        rng = derive_rng(self.params.seed, SeedPurpose.DRAW, t, self.machine_id)
        draws = draw_from_bank(self.bank, self.plan, quota, rng)
        if len(draws) != quota:
            raise ProtocolError(f"{self.name}: drew {len(draws)} points for a quota of {quota}")
        return SampleBatch(self.name, COORDINATOR, tuple(draws))

    def violator_report(self, t: int, candidate) -> ViolatorWeightReport:
        """Check pass: per-class counts of all points and of the candidate's violators."""
        chunks = self.source.scan(self.params.workers)
        everything, violating = fill_check_banks(chunks, self.oracle, candidate, self.params, self.plan, t)
        self.peak_words = max(
            self.peak_words, everything.words() + violating.words() + self.oracle.words(),
        )
        self.bank = None
        return ViolatorWeightReport(
            self.name, COORDINATOR, tuple(everything.counts()), tuple(violating.counts()),
        )

    @property
    def passes(self) -> int:
        return self.stream.passes
