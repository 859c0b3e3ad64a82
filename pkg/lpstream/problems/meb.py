"""
LPStream: Minimum Enclosing Ball

Plugin for the MEB problem (nu = lambda = d + 1) on a radial net around the
center found by centering.

    solve_basis   exact MEB by move-to-front Welzl recursion on the
                  lexicographically sorted points (recursion depth <= d + 2)
    violates      dist(c, q) > r (1 + 1e-12)
    correct       radius * (1 + 4 eps)
"""

import functools
import logging
from typing import Optional, Sequence

import numpy as np

from lpstream.core.problem import LpTypeProblem, NetAnchor
from lpstream.core.solution import Ball, Infeasible
from lpstream.errors import EmptyInputError, UsageError
from lpstream.net import MetricNet, NetConfig

logger = logging.getLogger(__name__)

RELATIVE_GUARD = 1e-12

# Containment slack inside the recursion (squared distances).
_CONTAIN_SLACK = 1e-10
_ABSOLUTE_SLACK = 1e-12


# ============================================================
# Geometry
# ============================================================

def circumsphere(boundary: np.ndarray) -> tuple:
    """Smallest sphere through all rows of `boundary`: (center, squared radius)."""
    origin = boundary[0]
    if len(boundary) == 1:
        return origin.copy(), 0.0
    U = boundary[1:] - origin
    rhs = 0.5 * np.sum(U ** 2, axis=1)
    lam, *_ = np.linalg.lstsq(U @ U.T, rhs, rcond=None)
    center = origin + lam @ U
    return center, float(np.sum((center - origin) ** 2))


def _contains(center, r2: float, point) -> bool:
    if center is None:
        return False
    return float(np.sum((point - center) ** 2)) <= r2 * (1 + _CONTAIN_SLACK) + _ABSOLUTE_SLACK


def _move_to_front(points: np.ndarray, order: list, end: int, boundary: list) -> tuple:
    if boundary:
        center, r2 = circumsphere(points[boundary])
    else:
        center, r2 = None, -1.0
    if len(boundary) == points.shape[1] + 1:
        return center, r2

    i = 0
    while i < end:
        index = order[i]
        if not _contains(center, r2, points[index]):
            center, r2 = _move_to_front(points, order, i, boundary + [index])
            order.insert(0, order.pop(i))
        i += 1
    return center, r2


def meb_solve_basis(points: Sequence) -> Ball:
    if len(points) == 0:
        raise EmptyInputError("MEB of an empty set")
    distinct = sorted({tuple(float(v) for v in p) for p in points})
    arr = np.array(distinct, dtype=float)
    center, _ = _move_to_front(arr, list(range(len(arr))), len(arr), [])
    radius = float(np.max(np.linalg.norm(arr - center, axis=1)))
    return Ball(center, radius)


def meb_violates(ball, q) -> bool:
    if isinstance(ball, Infeasible):
        return False
    distance = float(np.linalg.norm(np.asarray(q, dtype=float) - np.asarray(ball.center)))
    return distance > ball.radius * (1 + RELATIVE_GUARD)


def meb_correct(ball, eps: float):
    if isinstance(ball, Infeasible):
        return ball
    return Ball(ball.center, (1 + 4 * eps) * ball.radius)


# ============================================================
# Plugin
# ============================================================

class RadialSnapper:
    """Elements are points; indices live on a radial MetricNet."""

    def __init__(self, net: MetricNet, clamp: bool = False):
        self.net = net
        self.clamp = clamp
        self.size = net.size
        self.unsnap = functools.lru_cache(maxsize=1 << 16)(self._unsnap)

    def snap(self, element) -> int:
        return self.net.snap_vector(element, clamp=self.clamp)

    def _unsnap(self, index: int) -> tuple:
        return tuple(float(v) for v in self.net.representative(index))


class MebProblem(LpTypeProblem):
    name = "meb"
    radial = True

    def __init__(self, d: int, unit: float = 1.0):
        if d < 1:
            raise UsageError(f"dimension must be >= 1, got {d}")
        self.d = d
        self.unit = unit
        self.nu = d + 1
        self.lam = d + 1

    def build_snapper(self, eps: float, anchor: Optional[NetAnchor] = None) -> RadialSnapper:
        if anchor is None:
            raise UsageError("MEB needs a net anchor (center and r_max) from centering")
        config = NetConfig(self.d, eps, anchor.center, anchor.r_max, radial=True, unit=self.unit)
        return RadialSnapper(MetricNet(config), clamp=anchor.clamp)

    def embed(self, event) -> tuple:
        if len(event.point) != self.d:
            raise UsageError(f"MEB point has {len(event.point)} coordinates, expected {self.d}")
        return tuple(float(v) for v in event.point)

    def solve_basis(self, elements):
        return meb_solve_basis(elements)

    def violates(self, solution, element) -> bool:
        return meb_violates(solution, element)

    def correct_solution(self, solution, eps: float):
        return meb_correct(solution, eps)
