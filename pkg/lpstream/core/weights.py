"""
LPStream: Implicit Weights

A snapped point q has weight N^(v/s), where v is the number of stored
solutions q violates. Nothing is stored per point: v is recomputed from the
stored solutions whenever a pass needs it.

Points are grouped into weight classes by v. Class totals are compared in log
space: class i contributes count_i * exp((i - top) * ln N / s), which keeps
both sides of every ratio finite for any N.
"""

import logging
import math
from typing import Any, Callable, Sequence

from lpstream.core.solution import Solution

logger = logging.getLogger(__name__)


class WeightOracle:
    def __init__(self, problem, unsnap: Callable[[int], Any], plan):
        self.problem = problem
        self.unsnap = unsnap
        self.plan = plan
        self.stored: list = []

    def exponent_of(self, element: Any) -> int:
        return sum(1 for solution in self.stored if self.problem.violates(solution, element))

    def weight_exponent(self, index: int) -> int:
        return self.exponent_of(self.unsnap(index))

    def store(self, solution: Solution):
        self.stored.append(solution)
        logger.debug(f"Stored solution #{len(self.stored)}: {solution}")

    def words(self) -> int:
        return sum(solution.words for solution in self.stored)


def weight_exponent(index: int, oracle: WeightOracle) -> int:
    return oracle.weight_exponent(index)


def scaled_class_weights(counts: Sequence[float], log_growth: float, top: int = None) -> list:
    """Class totals count_i * N^((i - top)/s). `top` defaults to the heaviest non-empty class."""
    if top is None:
        live = [i for i, c in enumerate(counts) if c > 0]
        top = live[-1] if live else 0
    return [c * math.exp((i - top) * log_growth) if c > 0 else 0.0 for i, c in enumerate(counts)]
