"""
LPStream: Bounded LP and Linear Classification

Bounded LP: maximize c.x subject to the streamed rows a.x <= b and the box
lo <= x <= hi. Rows (a, b) live in [-1, 1]^(d+1) and are snapped on an
origin-anchored cube lattice. Ties between optima go to the lexicographically
smallest x. nu = d, lambda = d + 1.

Linear classification reduces to a bounded LP over (u, sigma): a point x with
label +1 becomes the row (-x, 1) . (u, sigma) <= 0, a point with label -1 the
row (x, 1) . (u, sigma) <= 0; the objective is max sigma. A positive sigma
certifies a separator sign(u.x) through the origin.
"""

import functools
import logging
import math
from typing import Optional, Sequence

import numpy as np

from lpstream.core.problem import LpTypeProblem, NetAnchor
from lpstream.core.solution import INFEASIBLE, Infeasible, LpPoint
from lpstream.errors import InputBoundsError, UsageError
from lpstream.net import GUARD, MetricNet, NetConfig
from lpstream.problems.simplex import lex_max_lp

logger = logging.getLogger(__name__)

VIOLATION_GUARD = 1e-12


def lp_solve_basis(rows: Sequence, c: Sequence, lower: Sequence, upper: Sequence):
    optimum = lex_max_lp(c, rows, lower, upper)
    if optimum is None:
        return INFEASIBLE
    return LpPoint([float(v) for v in optimum])


def lp_violates(point, row) -> bool:
    if isinstance(point, Infeasible):
        return False
    a, b = row
    return float(np.dot(a, point.x)) > b + VIOLATION_GUARD


class RowSnapper:
    """Rows (a, b) snapped as one vector of the (d+1)-cube."""

    def __init__(self, net: MetricNet):
        self.net = net
        self.size = net.size
        self.unsnap = functools.lru_cache(maxsize=1 << 16)(self._unsnap)

    def snap(self, row) -> int:
        a, b = row
        return self.net.snap_vector(tuple(a) + (b,))

    def _unsnap(self, index: int) -> tuple:
        values = [float(v) for v in self.net.representative(index)]
        return tuple(values[:-1]), values[-1]


def check_unit_cube(values, what: str):
    if any(abs(v) > 1 + GUARD for v in values):
        raise InputBoundsError(f"{what} {tuple(values)} outside [-1, 1]")


class BoundedLpProblem(LpTypeProblem):
    name = "lp"

    def __init__(self, d: int, c: Sequence, lower: Optional[Sequence] = None, upper: Optional[Sequence] = None):
        if d < 1:
            raise UsageError(f"dimension must be >= 1, got {d}")
        if len(c) != d:
            raise UsageError(f"objective has {len(c)} entries, expected {d}")
        self.d = d
        self.c = tuple(float(v) for v in c)
        if math.sqrt(sum(v * v for v in self.c)) > 1 + GUARD:
            raise InputBoundsError(f"objective norm exceeds 1: {self.c}")
        self.lower = tuple(lower) if lower is not None else (-1.0,) * d
        self.upper = tuple(upper) if upper is not None else (1.0,) * d
        self.nu = d
        self.lam = d + 1

    def build_snapper(self, eps: float, anchor: Optional[NetAnchor] = None) -> RowSnapper:
        return RowSnapper(MetricNet(NetConfig(self.d + 1, eps, radial=False)))

    def embed(self, event) -> tuple:
        values = [float(v) for v in event.point]
        if len(values) != self.d + 1:
            raise InputBoundsError(f"LP row has {len(values)} values, expected {self.d + 1}")
        check_unit_cube(values, "LP row")
        return tuple(values[:-1]), values[-1]

    def position(self, element) -> tuple:
        return tuple(element[0]) + (element[1],)

    def solve_basis(self, elements):
        return lp_solve_basis(elements, self.c, self.lower, self.upper)

    def violates(self, solution, element) -> bool:
        return lp_violates(solution, element)

    def correct_solution(self, solution, eps: float):
        return solution

    def objective(self, point: LpPoint) -> float:
        return float(np.dot(self.c, point.x))


# ============================================================
# Linear classification
# ============================================================

class ClassifierSnapper:
    """Signed feature vectors x' snapped on a fine cube lattice."""

    def __init__(self, net: MetricNet):
        self.net = net
        self.size = net.size
        self.unsnap = functools.lru_cache(maxsize=1 << 16)(self._unsnap)

    def snap(self, element) -> int:
        return self.net.snap_vector(element)

    def _unsnap(self, index: int) -> tuple:
        return tuple(float(v) for v in self.net.representative(index))


def signed_point(x, label: int) -> tuple:
    """Feature vector as it enters the LP: negated for label +1."""
    return tuple(-float(v) for v in x) if label == 1 else tuple(float(v) for v in x)


def lp_rows(elements) -> list:
    """Signed vectors x' as rows (x', 1) . (u, sigma) <= 0."""
    return [(tuple(x) + (1.0,), 0.0) for x in elements]


class ClassificationProblem(BoundedLpProblem):
    """Variables (u_1..u_d, sigma); u in [-1, 1]^d, sigma in [-d, d]."""

    name = "classify"

    def __init__(self, d: int, eps: float = 0.1):
        super().__init__(
            d + 1,
            (0.0,) * d + (1.0,),
            lower=(-1.0,) * d + (-float(d),),
            upper=(1.0,) * d + (float(d),),
        )
        self.features = d
        self.eps = eps
        self.elements: tuple = ()

    @property
    def net_accuracy(self) -> float:
        return self.eps / (2 * (1 + math.sqrt(self.features)))

    def build_snapper(self, eps: float, anchor: Optional[NetAnchor] = None) -> ClassifierSnapper:
        self.eps = eps
        return ClassifierSnapper(MetricNet(NetConfig(self.features, self.net_accuracy, radial=False)))

    def embed(self, event) -> tuple:
        values = [float(v) for v in event.point]
        if len(values) != self.features:
            raise InputBoundsError(f"point has {len(values)} coordinates, expected {self.features}")
        if event.label not in (-1, 1):
            raise InputBoundsError(f"label must be -1 or +1, got {event.label}")
        check_unit_cube(values, "point")
        return signed_point(values, event.label)

    def position(self, element) -> tuple:
        return tuple(element)

    def solve_basis(self, elements):
        return lp_solve_basis(lp_rows(elements), self.c, self.lower, self.upper)

    def violates(self, solution, element) -> bool:
        return lp_violates(solution, lp_rows([element])[0])


def classification_to_lp(labeled: Sequence, eps: float, d: Optional[int] = None) -> ClassificationProblem:
    """LP over (u, sigma) for labeled points (x, y); the signed vectors are kept on `elements`."""
    labeled = list(labeled)
    if d is None:
        if not labeled:
            raise UsageError("cannot infer the dimension of an empty point set")
        d = len(labeled[0][0])
    problem = ClassificationProblem(d, eps)
    for x, y in labeled:
        if len(x) != d:
            raise InputBoundsError(f"point has {len(x)} coordinates, expected {d}")
        if y not in (-1, 1):
            raise InputBoundsError(f"label must be -1 or +1, got {y}")
        check_unit_cube(x, "point")
    problem.elements = tuple(signed_point(x, y) for x, y in labeled)
    return problem


def separates(point: LpPoint, x, label: int) -> bool:
    """Whether sign(u.x) recovers `label` strictly."""
    u = np.asarray(point.x[:-1])
    return label * float(np.dot(u, x)) > 0
