"""
LPStream: Multipass Streaming

Insert-only streams, read as many times as the solver needs:

    pass 1       center = first point, r_max = exact max distance to it
                 (non-radial problems only validate and count here)
    2 per iter   sampling pass + violator-check pass of core.solve

so a run of t iterations reads the stream 1 + 2t times. An explicit anchor
skips pass 1; turnstile runs use that to solve on the same net.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from lpstream.core.params import SolverParams
from lpstream.core.problem import NetAnchor
from lpstream.core.solver import SolveOutcome, solve
from lpstream.errors import EmptyInputError, UsageError
from lpstream.streams.events import Op, as_stream
from lpstream.streams.source import SnappedSource

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PassReport:
    passes: int
    iterations: int
    successful_iterations: int
    peak_words: int
    centering_passes: int
    universe_size: int
    anchor: Optional[NetAnchor] = None

    def to_dict(self) -> dict:
        return {
            "passes": self.passes,
            "iterations": self.iterations,
            "successful_iterations": self.successful_iterations,
            "peak_words": self.peak_words,
            "centering_passes": self.centering_passes,
            "universe_size": self.universe_size,
            "anchor": None if self.anchor is None else {
                "center": list(self.anchor.center), "r_max": self.anchor.r_max,
            },
        }


def center_multipass(stream, problem) -> Optional[NetAnchor]:
    """Pass 1: anchor for radial problems, input validation for every problem."""
    center = None
    r_max = 0.0
    count = 0
    for event in stream.replay():
        if event.op is Op.DELETE:
            raise UsageError("multipass streams are insert-only; use the turnstile model for deletions")
        element = problem.embed(event)
        count += 1
        if not problem.radial:
            continue
        position = problem.position(element)
        if center is None:
            center = position
            continue
        r_max = max(r_max, math.dist(position, center))

    if count == 0:
        raise EmptyInputError("stream holds no events")
    if not problem.radial:
        return None
    logger.info(f"Centering: {count} events, r_max={r_max:.6g}")
    return NetAnchor(center, r_max)


def run_multipass(events, problem, params: SolverParams, anchor: Optional[NetAnchor] = None) -> tuple:
    """Solve an insert-only stream; returns (SolveOutcome, PassReport)."""
    stream = as_stream(events)
    start = stream.passes

    if anchor is None:
        anchor = center_multipass(stream, problem)
    centering_passes = stream.passes - start

    snapper = problem.build_snapper(params.eps, anchor)
    source = SnappedSource(stream, problem, snapper)
    outcome: SolveOutcome = solve(source, problem, params)

    report = PassReport(
        passes=stream.passes - start,
        iterations=outcome.iterations,
        successful_iterations=outcome.successful_iterations,
        peak_words=outcome.peak_words,
        centering_passes=centering_passes,
        universe_size=snapper.size,
        anchor=anchor,
    )
    logger.info(
        f"Multipass done: {report.passes} passes, {report.iterations} iterations, "
        f"peak {report.peak_words} words"
    )
    return outcome, report
