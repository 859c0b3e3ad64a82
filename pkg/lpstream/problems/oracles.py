"""
LPStream: Reference Oracles

Brute-force optima on the ORIGINAL (unsnapped) input, for tests and verify
mode. They are exponential in d and only meant for desk-scale instances.

    exact_meb        Welzl on the original points
    brute_force_meb  every 1..d+1 subset's circumsphere, smallest enclosing one
    exact_svm        primal KKT on every support subset (SLSQP above 60 points)
    exact_lp         vertex enumeration (scipy linprog for large instances)
    exact_sdp_grid   grid over unit-trace PSD 2 x 2 matrices
"""

import itertools
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from lpstream.core.solution import INFEASIBLE, Ball, Hyperplane
from lpstream.errors import EmptyInputError, UsageError
from lpstream.problems.meb import circumsphere, meb_solve_basis

logger = logging.getLogger(__name__)

SVM_ENUMERATION_LIMIT = 60
LP_ENUMERATION_LIMIT = 2_000_000
FEASIBILITY_TOLERANCE = 1e-9
_BATCH = 50_000


# ============================================================
# MEB
# ============================================================

def exact_meb(points: Sequence) -> Ball:
    if len(points) == 0:
        raise EmptyInputError("MEB oracle needs at least one point")
    return meb_solve_basis(points)


def brute_force_meb(points: Sequence) -> Ball:
    if len(points) == 0:
        raise EmptyInputError("MEB oracle needs at least one point")
    arr = np.unique(np.asarray(points, dtype=float), axis=0)
    d = arr.shape[1]
    best = None
    for size in range(1, min(d + 1, len(arr)) + 1):
        for subset in itertools.combinations(range(len(arr)), size):
            center, _ = circumsphere(arr[list(subset)])
            radius = float(np.max(np.linalg.norm(arr - center, axis=1)))
            on_sphere = float(np.max(np.linalg.norm(arr[list(subset)] - center, axis=1)))
            if radius <= on_sphere * (1 + 1e-9) + 1e-12 and (best is None or radius < best.radius):
                best = Ball(center, radius)
    return best


# ============================================================
# SVM
# ============================================================

def _primal_support_solve(Z: np.ndarray, Y: np.ndarray) -> Optional[tuple]:
    """Minimum-norm u with y_i (u.z_i - b) = 1 on the support set."""
    k, d = Z.shape
    # unknowns (u, b, multipliers); stationarity u = Z^T (Y * lam), sum(Y * lam) = 0
    size = d + 1 + k
    system = np.zeros((size, size))
    system[:d, :d] = np.eye(d)
    system[:d, d + 1:] = -(Z * Y[:, None]).T
    system[d, d + 1:] = Y
    system[d + 1:, :d] = Z * Y[:, None]
    system[d + 1:, d] = -Y
    rhs = np.concatenate([np.zeros(d + 1), np.ones(k)])
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if np.linalg.norm(system @ solution - rhs) > 1e-9 * (1 + np.linalg.norm(rhs)):
        return None
    return solution[:d], float(solution[d])


def exact_svm(points: Sequence, labels: Sequence):
    """Optimal hard-margin hyperplane of the original points, or Infeasible."""
    if len(points) == 0:
        raise EmptyInputError("SVM oracle needs at least one point")
    Z = np.asarray(points, dtype=float)
    Y = np.asarray(labels, dtype=float)
    d = Z.shape[1]
    if len(set(Y)) == 1:
        return Hyperplane(np.zeros(d), -float(Y[0]))
    if len(Z) > SVM_ENUMERATION_LIMIT:
        return _svm_slsqp(Z, Y)

    best = None
    for size in range(2, d + 2):
        for subset in itertools.combinations(range(len(Z)), size):
            chosen = list(subset)
            if len(set(Y[chosen])) < 2:
                continue
            solved = _primal_support_solve(Z[chosen], Y[chosen])
            if solved is None:
                continue
            u, b = solved
            if np.all(Y * (Z @ u - b) >= 1 - FEASIBILITY_TOLERANCE):
                if best is None or np.dot(u, u) < np.dot(best[0], best[0]) - 1e-12:
                    best = (u, b)
    return INFEASIBLE if best is None else Hyperplane(*best)


def _svm_slsqp(Z: np.ndarray, Y: np.ndarray):
    d = Z.shape[1]
    constraints = [{"type": "ineq", "fun": lambda w: Y * (Z @ w[:d] - w[d]) - 1}]
    result = minimize(
        lambda w: float(w[:d] @ w[:d]),
        np.zeros(d + 1),
        jac=lambda w: np.concatenate([2 * w[:d], [0.0]]),
        constraints=constraints,
        method="SLSQP",
        options={"maxiter": 1000, "ftol": 1e-12},
    )
    u, b = result.x[:d], float(result.x[d])
    if not np.all(Y * (Z @ u - b) >= 1 - 1e-6):
        logger.info(f"SLSQP found no separator ({result.message})")
        return INFEASIBLE
    return Hyperplane(u, b)


# ============================================================
# LP
# ============================================================

def _box_rows(lower: Sequence, upper: Sequence) -> tuple:
    d = len(lower)
    A = np.vstack([np.eye(d), -np.eye(d)])
    b = np.concatenate([np.asarray(upper, dtype=float), -np.asarray(lower, dtype=float)])
    return A, b


def exact_lp(c: Sequence, rows: Sequence, lower: Sequence, upper: Sequence) -> Optional[tuple]:
    """(optimal value, x) of max c.x over rows and box, or None when infeasible."""
    c = np.asarray(c, dtype=float)
    d = len(c)
    box_A, box_b = _box_rows(lower, upper)
    if rows:
        A = np.vstack([np.asarray([a for a, _ in rows], dtype=float), box_A])
        b = np.concatenate([np.asarray([bb for _, bb in rows], dtype=float), box_b])
    else:
        A, b = box_A, box_b

    if math.comb(len(A), d) > LP_ENUMERATION_LIMIT:
        result = linprog(-c, A_ub=A, b_ub=b, bounds=list(zip(lower, upper)), method="highs")
        if result.status != 0:
            return None
        return float(c @ result.x), tuple(result.x)

    best = None
    combos = itertools.combinations(range(len(A)), d)
    while True:
        chunk = np.array(list(itertools.islice(combos, _BATCH)), dtype=int)
        if len(chunk) == 0:
            break
        M = A[chunk]
        rhs = b[chunk]
        regular = np.abs(np.linalg.det(M)) > 1e-12
        if not np.any(regular):
            continue
        X = np.linalg.solve(M[regular], rhs[regular][..., None])[..., 0]
        feasible = np.all(X @ A.T <= b + FEASIBILITY_TOLERANCE, axis=1)
        if not np.any(feasible):
            continue
        values = X[feasible] @ c
        top = int(np.argmax(values))
        if best is None or values[top] > best[0]:
            best = (float(values[top]), tuple(float(v) for v in X[feasible][top]))
    return best


# ============================================================
# SDP (d = 2)
# ============================================================

def unit_trace_grid(resolution: int = 401) -> np.ndarray:
    """Stack of 2 x 2 PSD matrices [[a, c], [c, 1 - a]] with c = t sqrt(a (1 - a))."""
    a = np.linspace(0.0, 1.0, resolution)
    t = np.linspace(-1.0, 1.0, resolution)
    A, T = np.meshgrid(a, t, indexing="ij")
    C = T * np.sqrt(A * (1 - A))
    grid = np.empty(A.shape + (2, 2))
    grid[..., 0, 0] = A
    grid[..., 1, 1] = 1 - A
    grid[..., 0, 1] = grid[..., 1, 0] = C
    return grid.reshape(-1, 2, 2)


def exact_sdp_grid(rows: Sequence, C=None, margin: bool = False, resolution: int = 401) -> Optional[float]:
    """Best objective over the grid: max <C, X> (standard) or max min_i <A_i, X> - b_i (margin)."""
    grid = unit_trace_grid(resolution)
    if rows:
        As = np.asarray([A for A, _ in rows], dtype=float)
        bs = np.asarray([b for _, b in rows], dtype=float)
        values = np.einsum("kij,gij->gk", As, grid)
    else:
        values = np.zeros((len(grid), 0))
        bs = np.zeros(0)

    if margin:
        if not rows:
            raise UsageError("margin form needs at least one row on the grid")
        return float(np.max(np.min(values - bs, axis=1)))

    if C is None:
        raise UsageError("standard form needs an objective matrix")
    objective = np.einsum("ij,gij->g", np.asarray(C, dtype=float), grid)
    feasible = np.all(values <= bs + FEASIBILITY_TOLERANCE, axis=1)
    if not np.any(feasible):
        return None
    return float(np.max(objective[feasible]))
