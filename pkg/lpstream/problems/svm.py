"""
LPStream: Hard-margin Linear SVM

Elements are labeled points (z, y) with z in [-1, 1]^d and y in {-1, +1}.

    minimize ||u||^2   subject to   y_i (u.z_i - b) >= 1

nu = d + 2 (an inseparable set is certified by d + 2 points), lambda = d + 1.
The net is an origin-anchored cube lattice of accuracy eps*gamma/2 with one
copy per label.

solve_basis searches support sets of size 2..d+1 (both labels present) in
lexicographic order, drawn from the convex-hull vertices of each class, and
solves the dual KKT system of each candidate:

    sum_j a_j y_i y_j <z_i, z_j> - y_i b = 1      for i in S
    sum_j a_j y_j = 0

A candidate with a >= 0 whose hyperplane is feasible for every point is the
optimum. When no candidate qualifies the set is not separable.
"""

import functools
import itertools
import logging
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from lpstream.core.problem import LpTypeProblem, NetAnchor
from lpstream.core.solution import INFEASIBLE, Hyperplane, Infeasible
from lpstream.errors import EmptyInputError, InputBoundsError, UsageError
from lpstream.net import GUARD, MetricNet, NetConfig

logger = logging.getLogger(__name__)

MARGIN_GUARD = 1e-9
RESIDUAL_TOLERANCE = 1e-9
MULTIPLIER_TOLERANCE = 1e-12


# ============================================================
# Exact basis solver
# ============================================================

def _margins(u: np.ndarray, b: float, Z: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return Y * (Z @ u - b)


def hull_candidates(Z: np.ndarray) -> list:
    """Row indices of the convex-hull vertices of Z (all rows when qhull cannot help)."""
    n, d = Z.shape
    if n <= d + 1:
        return list(range(n))
    if d == 1:
        return sorted({int(np.argmin(Z[:, 0])), int(np.argmax(Z[:, 0]))})
    try:
        return sorted(int(v) for v in ConvexHull(Z).vertices)
    except (QhullError, ValueError):
        return list(range(n))


def kkt_support_solve(Z: np.ndarray, Y: np.ndarray) -> Optional[tuple]:
    """(u, b) from the dual KKT system on support set (Z, Y), or None."""
    k = len(Y)
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = np.outer(Y, Y) * (Z @ Z.T)
    system[:k, k] = -Y
    system[k, :k] = Y
    rhs = np.concatenate([np.ones(k), [0.0]])

    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if np.linalg.norm(system @ solution - rhs) > RESIDUAL_TOLERANCE * (1 + np.linalg.norm(rhs)):
        return None
    alpha, b = solution[:k], float(solution[k])
    if np.any(alpha < -MULTIPLIER_TOLERANCE):
        return None
    return (alpha * Y) @ Z, b


def svm_solve_basis(elements: Sequence) -> Hyperplane:
    distinct = sorted({(tuple(float(v) for v in z), int(y)) for z, y in elements})
    if not distinct:
        raise EmptyInputError("SVM basis of an empty set")
    d = len(distinct[0][0])
    labels = {y for _, y in distinct}
    if len(labels) == 1:
        (y,) = labels
        return Hyperplane(np.zeros(d), -float(y))

    Z = np.array([z for z, _ in distinct], dtype=float)
    Y = np.array([y for _, y in distinct], dtype=float)

    candidates = []
    for label in (-1.0, 1.0):
        rows = np.flatnonzero(Y == label)
        candidates.extend(int(rows[i]) for i in hull_candidates(Z[rows]))
    candidates.sort()

    for size in range(2, d + 2):
        for support in itertools.combinations(candidates, size):
            chosen = list(support)
            if len(set(Y[chosen])) < 2:
                continue
            solved = kkt_support_solve(Z[chosen], Y[chosen])
            if solved is None:
                continue
            u, b = solved
            if np.all(_margins(u, b, Z, Y) >= 1 - MARGIN_GUARD):
                return Hyperplane(u, b)
    return INFEASIBLE


def svm_violates(plane, element) -> bool:
    if isinstance(plane, Infeasible):
        return False
    z, y = element
    margin = y * (float(np.dot(plane.u, z)) - plane.b)
    return margin < 1 - MARGIN_GUARD


def svm_correct(plane, eps: float):
    if isinstance(plane, Infeasible):
        return plane
    scale = 1 + 2 * eps
    return Hyperplane(np.asarray(plane.u) * scale, plane.b * scale)


# ============================================================
# Plugin
# ============================================================

class LabeledSnapper:
    """Label selects the lattice copy: tag 0 for -1, tag 1 for +1."""

    def __init__(self, net: MetricNet):
        self.net = net
        self.size = net.size
        self.unsnap = functools.lru_cache(maxsize=1 << 16)(self._unsnap)

    def snap(self, element) -> int:
        z, y = element
        return self.net.snap_vector(z, tag=1 if y > 0 else 0)

    def _unsnap(self, index: int) -> tuple:
        point = tuple(float(v) for v in self.net.representative(index))
        return point, (1 if self.net.tag_of(index) == 1 else -1)


def check_labeled_point(point, label, d: int) -> tuple:
    if len(point) != d:
        raise InputBoundsError(f"point has {len(point)} coordinates, expected {d}")
    if label not in (-1, 1):
        raise InputBoundsError(f"label must be -1 or +1, got {label}")
    if any(abs(v) > 1 + GUARD for v in point):
        raise InputBoundsError(f"point {tuple(point)} outside the unit cube")
    return tuple(float(v) for v in point), int(label)


class SvmProblem(LpTypeProblem):
    name = "svm"
    exhausted_as_infeasible = True

    def __init__(self, d: int, gamma: float):
        if d < 1:
            raise UsageError(f"dimension must be >= 1, got {d}")
        if not 0 < gamma <= 2:
            raise UsageError(f"gamma must be in (0, 2], got {gamma}")
        self.d = d
        self.gamma = gamma
        self.nu = d + 2
        self.lam = d + 1

    def build_snapper(self, eps: float, anchor: Optional[NetAnchor] = None) -> LabeledSnapper:
        config = NetConfig(self.d, eps * self.gamma / 2, radial=False, tags=2)
        return LabeledSnapper(MetricNet(config))

    def embed(self, event) -> tuple:
        return check_labeled_point(event.point, event.label, self.d)

    def position(self, element) -> tuple:
        return element[0]

    def solve_basis(self, elements):
        return svm_solve_basis(elements)

    def violates(self, solution, element) -> bool:
        return svm_violates(solution, element)

    def correct_solution(self, solution, eps: float):
        return svm_correct(solution, eps)
