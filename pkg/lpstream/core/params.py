"""
LPStream: Solver Parameters

SolverParams holds what the user chooses; IterationPlan holds what follows from
it once the universe size N and the problem are known:

    growth      N^(1/s), kept as log_growth = ln N / s
    mu          1 / (10 nu N^(1/s))
    m           max((8 lam/mu) ln(8 lam/mu), (4/mu) ln 8)   (mu-net, failure 1/4)
    cap         ceil(iteration_factor * nu * s)
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from lpstream.config import CHECK_DELTA, CHECK_ZETA, DEFAULT_RUN_SETTINGS, RANDOMIZED_PROFILE
from lpstream.errors import UsageError
from lpstream.sketch import Backend

logger = logging.getLogger(__name__)


def default_s(universe_size: int) -> int:
    return max(1, math.ceil(math.log(universe_size))) if universe_size > 1 else 1


@dataclass(frozen=True)
class IterationPlan:
    universe_size: int
    nu: int
    lam: int
    s: int
    log_growth: float
    mu: float
    m: int
    max_iterations: int

    @property
    def growth(self) -> float:
        return math.exp(self.log_growth)


@dataclass(frozen=True)
class SolverParams:
    eps: float = 0.1
    s: Optional[int] = None
    seed: int = DEFAULT_RUN_SETTINGS["seed"]
    backend: Backend = Backend(DEFAULT_RUN_SETTINGS["backend"])
    iteration_factor: float = DEFAULT_RUN_SETTINGS["iteration_factor"]
    sample_size: Optional[int] = None
    zeta: float = RANDOMIZED_PROFILE["zeta"]
    delta: float = RANDOMIZED_PROFILE["delta"]
    check_zeta: float = CHECK_ZETA
    check_delta: float = CHECK_DELTA
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        if not 0 < self.eps <= 0.5:
            raise UsageError(f"eps must be in (0, 1/2], got {self.eps}")
        if self.s is not None and self.s < 1:
            raise UsageError(f"s must be >= 1, got {self.s}")
        if not 0 <= self.seed < 1 << 64:
            raise UsageError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.iteration_factor <= 0:
            raise UsageError(f"iteration_factor must be > 0, got {self.iteration_factor}")
        if self.sample_size is not None and self.sample_size < 1:
            raise UsageError(f"sample_size must be >= 1, got {self.sample_size}")
        if self.workers < 1:
            raise UsageError(f"workers must be >= 1, got {self.workers}")

    def plan(self, universe_size: int, problem) -> IterationPlan:
        upper = default_s(universe_size)
        s = upper if self.s is None else self.s
        if not 1 <= s <= upper:
            raise UsageError(f"s must be in [1, {upper}] for a universe of {universe_size}, got {s}")

        log_growth = math.log(universe_size) / s
        mu = 1.0 / (10 * problem.nu * math.exp(log_growth))
        ratio = 8 * problem.lam / mu
        m = math.ceil(max(ratio * math.log(ratio), (4 / mu) * math.log(8)))
        if self.sample_size is not None:
            m = self.sample_size
        cap = math.ceil(self.iteration_factor * problem.nu * s)

        plan = IterationPlan(universe_size, problem.nu, problem.lam, s, log_growth, mu, m, cap)
        logger.info(
            f"Plan: N={universe_size} s={s} growth={plan.growth:.4f} mu={mu:.5f} m={m} cap={cap}"
        )
        return plan
