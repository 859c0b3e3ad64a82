"""
LPStream: Strict Turnstile Streaming

Streams of inserts and deletes; only the live multiset at the end of the
stream matters. Radial problems (MEB) first fix their net:

    centering pass    l0 sampler + estimator over the raw point universe:
                      the sample is a live center, an estimate of 1 means
                      every live point equals it (r_max = 0)
    radius search     binary search over thresholds 2^j: each step is one
                      pass with an l0 sampler restricted to live points
                      farther than 2^j; r_max = 2^(j+1) for the largest
                      non-empty j, a 2-approximation of the true radius
                      (centering="bucketed" does it in one pass with one
                      sampler per power-of-two bucket)

Origin-anchored problems skip the search and spend one pass checking that
the live set is non-empty. Every solver pass then feeds inserts as +1 and
deletes as -1.

Raw points must lie on the grid unit * {-delta..delta}^d; RawPointCodec maps
them bijectively to sketch indices.
"""

import logging
import math
from collections import Counter
from typing import Optional

from lpstream.config import DEFAULT_DELTA_BOUND
from lpstream.core.params import SolverParams
from lpstream.core.problem import NetAnchor
from lpstream.core.seeds import SeedPurpose, derive_seed
from lpstream.core.solver import solve
from lpstream.errors import EmptyInputError, InputBoundsError, UsageError
from lpstream.sketch import Backend, L0Estimator, L0Sampler, SketchConfig
from lpstream.streams.events import as_stream
from lpstream.streams.multipass import PassReport
from lpstream.streams.source import SnappedSource

logger = logging.getLogger(__name__)

GRID_TOLERANCE = 1e-6
CENTERING_MODES = ("binary", "bucketed")


# ============================================================
# Raw point universe
# ============================================================

class RawPointCodec:
    """Mixed-radix index of integer grid points in {-delta..delta}^d."""

    def __init__(self, d: int, delta_bound: int = DEFAULT_DELTA_BOUND, unit: float = 1.0):
        if d < 1:
            raise UsageError(f"dimension must be >= 1, got {d}")
        if delta_bound < 1:
            raise UsageError(f"delta bound must be >= 1, got {delta_bound}")
        self.d = d
        self.delta_bound = int(delta_bound)
        self.unit = float(unit)
        self.radix = 2 * self.delta_bound + 1
        self.size = self.radix ** d

    def codes(self, position) -> tuple:
        """Integer grid coordinates of a point."""
        if len(position) != self.d:
            raise InputBoundsError(f"point has {len(position)} coordinates, expected {self.d}")
        out = []
        for value in position:
            scaled = value / self.unit
            code = round(scaled)
            if abs(scaled - code) > GRID_TOLERANCE:
                raise InputBoundsError(f"coordinate {value} is not on the input grid (unit {self.unit})")
            if abs(code) > self.delta_bound:
                raise InputBoundsError(f"coordinate {value} outside +-{self.delta_bound} grid units")
            out.append(int(code))
        return tuple(out)

    def encode(self, position) -> int:
        index = 0
        for code in reversed(self.codes(position)):
            index = index * self.radix + (code + self.delta_bound)
        return index

    def decode(self, index: int) -> tuple:
        if not 0 <= index < self.size:
            raise InputBoundsError(f"index {index} outside raw universe of size {self.size}")
        point = []
        for _ in range(self.d):
            index, digit = divmod(index, self.radix)
            point.append(float((digit - self.delta_bound) * self.unit))
        return tuple(point)

    @property
    def search_depth(self) -> int:
        """J: every grid distance is at most 2 delta sqrt(d) <= 2^J units."""
        return max(1, math.ceil(math.log2(2 * self.delta_bound * math.sqrt(self.d))))


def _squared_units(a: tuple, b: tuple) -> int:
    return sum((x - y) ** 2 for x, y in zip(a, b))


class StrictTurnstileCheck:
    """Counter-map of the live multiset; exact-backend runs reject negative counts."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.counts = Counter()

    def update(self, event):
        if self.enabled:
            self.counts[(event.point, event.label)] += event.sign

    def finish(self):
        if not self.enabled:
            return
        negative = [key for key, count in self.counts.items() if count < 0]
        if negative:
            point, _ = negative[0]
            raise UsageError(
                f"strict turnstile violated: {len(negative)} points end with a negative count "
                f"(first: {point})"
            )


def _config(params: SolverParams, universe_size: int, *key: int) -> SketchConfig:
    return SketchConfig(universe_size, params.zeta, params.delta, derive_seed(params.seed, *key), params.backend)


# ============================================================
# Centering
# ============================================================

def find_center_turnstile(events, problem, params: SolverParams, codec: RawPointCodec) -> tuple:
    """One pass: (a live point, estimated number of distinct live points)."""
    stream = as_stream(events)
    config = _config(params, codec.size, SeedPurpose.CENTER)
    sampler = L0Sampler(config)
    estimator = L0Estimator(config)
    strict = StrictTurnstileCheck(params.backend is Backend.EXACT)

    for event in stream.replay():
        index = codec.encode(problem.position(problem.embed(event)))
        sampler.update(index, event.sign)
        estimator.update(index, event.sign)
        strict.update(event)
    strict.finish()

    index = sampler.sample()
    if index is None:
        raise EmptyInputError("no live points left after deletions")
    center = codec.decode(index)
    live = estimator.estimate()
    logger.info(f"Turnstile center {center} (about {live} distinct live points)")
    return center, live


def _live_beyond(stream, problem, params, codec, center_codes, threshold: int, step: int) -> bool:
    """One pass: is any live point farther than 2^threshold units from the center?

    A negative threshold asks whether any live point differs from the center.
    """
    limit = 4 ** threshold if threshold >= 0 else 0
    sampler = L0Sampler(_config(params, codec.size, SeedPurpose.RADIUS, 0, step))
    for event in stream.replay():
        position = problem.position(problem.embed(event))
        if _squared_units(codec.codes(position), center_codes) > limit:
            sampler.update(codec.encode(position), event.sign)
    return sampler.sample() is not None


def _bucketed_radius(stream, problem, params, codec, center_codes) -> int:
    """One pass, bucket j holding live points with 2^(j-1) < dist <= 2^j units."""
    depth = codec.search_depth
    samplers = [
        L0Sampler(_config(params, codec.size, SeedPurpose.RADIUS, 1, j)) for j in range(depth + 1)
    ]
    for event in stream.replay():
        position = problem.position(problem.embed(event))
        squared = _squared_units(codec.codes(position), center_codes)
        if squared == 0:
            continue
        # smallest j with squared <= 4^j
        bucket = ((squared - 1).bit_length() + 1) // 2
        samplers[bucket].update(codec.encode(position), event.sign)

    live = [j for j, sampler in enumerate(samplers) if sampler.sample() is not None]
    return -1 if not live else live[-1]


def approx_max_norm(
    events, problem, center, params: SolverParams, codec: RawPointCodec, centering: str = "binary",
) -> tuple:
    """(r_max, passes): r_max in [D, 2D] for the live max distance D >= unit, 0 if D = 0."""
    if centering not in CENTERING_MODES:
        raise UsageError(f"centering must be one of {CENTERING_MODES}, got {centering!r}")
    stream = as_stream(events)
    start = stream.passes
    center_codes = codec.codes(center)

    if centering == "bucketed":
        top = _bucketed_radius(stream, problem, params, codec, center_codes)
        r_max = 0.0 if top < 0 else float(2 ** top) * codec.unit
        logger.info(f"Bucketed radius search: r_max={r_max:g}")
        return r_max, stream.passes - start

    # invariant: some live point beyond 2^lo (lo = -2: none off the center), none beyond 2^hi
    lo, hi = -2, codec.search_depth
    step = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _live_beyond(stream, problem, params, codec, center_codes, mid, step):
            lo = mid
        else:
            hi = mid
        step += 1
    r_max = 0.0 if lo == -2 else float(2 ** (lo + 1)) * codec.unit
    logger.info(f"Radius search: {step} steps, r_max={r_max:g}")
    return r_max, stream.passes - start


# ============================================================
# Runner
# ============================================================

def check_live_support(events, problem, params: SolverParams, snapper) -> int:
    """One pass for origin-anchored nets: validate rows and require a live element."""
    stream = as_stream(events)
    estimator = L0Estimator(_config(params, snapper.size, SeedPurpose.CENTER))
    strict = StrictTurnstileCheck(params.backend is Backend.EXACT)
    for event in stream.replay():
        estimator.update(snapper.snap(problem.embed(event)), event.sign)
        strict.update(event)
    strict.finish()
    live = estimator.estimate()
    if live == 0:
        raise EmptyInputError("no live elements left after deletions")
    return live


def run_turnstile(
    events, problem, params: SolverParams,
    delta_bound: int = DEFAULT_DELTA_BOUND, centering: str = "binary",
) -> tuple:
    """Solve a strict turnstile stream; returns (SolveOutcome, PassReport)."""
    stream = as_stream(events)
    start = stream.passes
    anchor: Optional[NetAnchor] = None

    if problem.radial:
        codec = RawPointCodec(problem.d, delta_bound, getattr(problem, "unit", 1.0))
        center, live = find_center_turnstile(stream, problem, params, codec)
        if live <= 1:
            r_max = 0.0
        else:
            r_max, _ = approx_max_norm(stream, problem, center, params, codec, centering)
        anchor = NetAnchor(center, r_max, clamp=True)
        snapper = problem.build_snapper(params.eps, anchor)
    else:
        snapper = problem.build_snapper(params.eps, None)
        check_live_support(stream, problem, params, snapper)
    centering_passes = stream.passes - start

    outcome = solve(SnappedSource(stream, problem, snapper), problem, params)
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
        f"Turnstile done: {report.passes} passes ({centering_passes} centering), "
        f"{report.iterations} iterations"
    )
    return outcome, report
