"""
LPStream: Bounded SDP and Saddle Point

Standard form:   maximize <C, X>  s.t.  <A_i, X> <= b_i,  tr X = 1,  X PSD
Saddle form:     maximize sigma   s.t.  <A_i, X> >= b_i + sigma,  tr X = 1,  X PSD

Constraint rows (A_i, b_i) are symmetric with at most S non-zeros and spectral
norm <= 1; they are snapped on a SparseMatrixNet. The unknown X is handled as
its upper triangle (d(d+1)/2 LP variables, plus sigma in the saddle form).

Snapped rows are solved with an additive slack of eps: rounding b moves it by
at most eps/2 and rounding the entries moves <A, X> by at most eps/2 for any
unit-trace PSD X, so the true optimum stays feasible after snapping.

The PSD family {z^T X z >= -eps/d : z on the eps/(d sqrt d) lattice} is never
materialized. solve_basis runs a cutting-plane loop: solve the LP, ask
sdp_psd_violator for a lattice z below the floor, add the cut, repeat. The
floor leaves room for the eigenvector rounding, so X + (3 eps/d) I is PSD.
"""

import functools
import logging
import math
from typing import Optional, Sequence

import numpy as np

from lpstream.core.problem import LpTypeProblem, NetAnchor
from lpstream.core.solution import INFEASIBLE, Infeasible, SdpMatrix
from lpstream.errors import InputBoundsError, UsageError
from lpstream.net import SparseMatrixNet, nearest_multiple
from lpstream.problems.simplex import lex_max_lp

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-9
NORM_TOLERANCE = 1e-9
VIOLATION_GUARD = 1e-12
MAX_CUTS = 200
SIGMA_BOUND = 2.0


# ============================================================
# Vectorization
# ============================================================

def triangle_positions(d: int) -> list:
    return [(i, j) for i in range(d) for j in range(i, d)]


def linear_form(A, d: int) -> list:
    """Coefficients of <A, X> over the upper-triangle variables of X."""
    A = np.asarray(A, dtype=float)
    return [float(A[i, i]) if i == j else float(A[i, j] + A[j, i]) for i, j in triangle_positions(d)]


def matrix_from_triangle(values: Sequence, d: int) -> np.ndarray:
    X = np.zeros((d, d))
    for (i, j), v in zip(triangle_positions(d), values):
        X[i, j] = X[j, i] = float(v)
    return X


def frobenius_inner(A, X) -> float:
    return float(np.sum(np.asarray(A, dtype=float) * np.asarray(X, dtype=float)))


def validate_row(A, b: float, d: int, sparsity: int) -> tuple:
    matrix = np.asarray(A, dtype=float)
    if matrix.shape != (d, d):
        raise InputBoundsError(f"constraint matrix has shape {matrix.shape}, expected {(d, d)}")
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE:
        raise InputBoundsError("constraint matrix is not symmetric")
    nonzeros = int(np.count_nonzero(matrix))
    if nonzeros > sparsity:
        raise InputBoundsError(f"constraint matrix has {nonzeros} non-zeros, sparsity bound is {sparsity}")
    if np.linalg.norm(matrix, 2) > 1 + NORM_TOLERANCE:
        raise InputBoundsError("constraint matrix has spectral norm above 1")
    if abs(b) > 1 + NORM_TOLERANCE:
        raise InputBoundsError(f"right-hand side {b} outside [-1, 1]")
    symmetric = (matrix + matrix.T) / 2
    return tuple(tuple(float(v) for v in row) for row in symmetric), float(b)


# ============================================================
# PSD separation
# ============================================================

def sdp_psd_violator(X, eps: float, floor: float = 0.0) -> Optional[tuple]:
    """Lattice z with z^T X z < -floor built from the bottom eigenvector, or None."""
    matrix = np.asarray(X, dtype=float)
    d = matrix.shape[0]
    values, vectors = np.linalg.eigh(matrix)
    if values[0] >= -floor:
        return None
    v = vectors[:, 0]
    leading = np.flatnonzero(np.abs(v) > 1e-12)
    if len(leading) and v[leading[0]] < 0:
        v = -v
    step = eps / (d * math.sqrt(d))
    z = nearest_multiple(v, step) * step
    if float(z @ matrix @ z) < -floor:
        return tuple(float(c) for c in z)
    return None


# ============================================================
# Plugin
# ============================================================

class MatrixRowSnapper:
    def __init__(self, net: SparseMatrixNet):
        self.net = net
        self.size = net.size
        self.unsnap = functools.lru_cache(maxsize=1 << 16)(self._unsnap)

    def snap(self, row) -> int:
        A, b = row
        return self.net.snap(A, b)

    def _unsnap(self, index: int) -> tuple:
        A, b = self.net.unsnap(index)
        return tuple(tuple(float(v) for v in r) for r in A), b


class BoundedSdpProblem(LpTypeProblem):
    name = "sdp"

    def __init__(
        self, d: int, C=None, sparsity: int = None, frobenius: float = 1.0,
        margin: bool = False, eps: float = 0.1,
    ):
        if d < 1:
            raise UsageError(f"dimension must be >= 1, got {d}")
        self.d = d
        self.sparsity = sparsity if sparsity is not None else d * d
        if not 1 <= self.sparsity <= d * d:
            raise UsageError(f"sparsity must be in 1..{d * d}, got {self.sparsity}")
        if frobenius <= 0:
            raise UsageError(f"Frobenius bound must be > 0, got {frobenius}")
        self.frobenius = frobenius
        self.margin = margin
        self.eps = eps

        if margin:
            self.C = None
        else:
            if C is None:
                # default objective: the (0, 0) entry
                C = np.zeros((d, d))
                C[0, 0] = 1.0
            objective = np.asarray(C, dtype=float)
            if objective.shape != (d, d) or np.max(np.abs(objective - objective.T), initial=0.0) > SYMMETRY_TOLERANCE:
                raise InputBoundsError("objective matrix must be symmetric d x d")
            if np.linalg.norm(objective) > 1 + NORM_TOLERANCE:
                raise InputBoundsError("objective matrix has Frobenius norm above 1")
            self.C = objective

        self.name = "saddle" if margin else "sdp"
        self.triangle = len(triangle_positions(d))
        self.nu = d * d + (1 if margin else 0)
        self.lam = d * d + 1

    # --- LP layout ---

    def _bounds(self) -> tuple:
        lower, upper = [], []
        for i, j in triangle_positions(self.d):
            lower.append(0.0 if i == j else -self.frobenius)
            upper.append(self.frobenius)
        if self.margin:
            lower.append(-SIGMA_BOUND)
            upper.append(SIGMA_BOUND)
        return lower, upper

    def _pad(self, coefficients: list, sigma: float = 0.0) -> list:
        return coefficients + [sigma] if self.margin else coefficients

    def _objective(self) -> list:
        if self.margin:
            return [0.0] * self.triangle + [1.0]
        return linear_form(self.C, self.d)

    @property
    def row_slack(self) -> float:
        return self.eps

    @property
    def psd_floor(self) -> float:
        return self.eps / self.d

    def _row(self, element) -> tuple:
        A, b = element
        form = linear_form(A, self.d)
        if self.margin:
            return [-v for v in form] + [1.0], -b + self.row_slack
        return form, b + self.row_slack

    def _trace_rows(self) -> list:
        trace = [1.0 if i == j else 0.0 for i, j in triangle_positions(self.d)]
        return [(self._pad(trace), 1.0), (self._pad([-v for v in trace]), -1.0)]

    def _cut(self, z) -> tuple:
        outer = np.outer(z, z)
        return self._pad([-v for v in linear_form(outer, self.d)]), self.psd_floor

    # --- plugin surface ---

    def build_snapper(self, eps: float, anchor: Optional[NetAnchor] = None) -> MatrixRowSnapper:
        self.eps = eps
        return MatrixRowSnapper(SparseMatrixNet(self.d, eps, self.sparsity))

    def embed(self, event) -> tuple:
        values = [float(v) for v in event.point]
        if len(values) != self.d * self.d + 1:
            raise InputBoundsError(f"SDP row has {len(values)} values, expected {self.d * self.d + 1}")
        A = np.array(values[:-1]).reshape(self.d, self.d)
        return validate_row(A, values[-1], self.d, self.sparsity)

    def position(self, element) -> tuple:
        A, b = element
        return tuple(v for row in A for v in row) + (b,)

    def solve_basis(self, elements):
        """Cutting-plane solve; PSD cuts live on the lattice of the plugin eps."""
        eps = self.eps
        lower, upper = self._bounds()
        rows = [self._row(e) for e in sorted(set(elements))] + self._trace_rows()
        cuts = []

        for _ in range(MAX_CUTS):
            optimum = lex_max_lp(self._objective(), rows + cuts, lower, upper)
            if optimum is None:
                return INFEASIBLE
            values = [float(v) for v in optimum]
            X = matrix_from_triangle(values[: self.triangle], self.d)
            sigma = values[-1] if self.margin else None
            z = sdp_psd_violator(X, eps, self.psd_floor)
            if z is None:
                return SdpMatrix(X, margin=sigma)
            cut = self._cut(z)
            if cut in cuts:
                logger.warning(f"PSD cut repeated, stopping with lambda_min={np.linalg.eigvalsh(X)[0]:.3g}")
                return SdpMatrix(X, margin=sigma)
            cuts.append(cut)

        logger.warning(f"PSD cut limit {MAX_CUTS} reached")
        return SdpMatrix(X, margin=sigma)

    def violates(self, solution, element) -> bool:
        if isinstance(solution, Infeasible):
            return False
        A, b = element
        value = frobenius_inner(A, solution.matrix)
        if self.margin:
            return value < b + solution.margin - self.row_slack - VIOLATION_GUARD
        return value > b + self.row_slack + VIOLATION_GUARD

    def correct_solution(self, solution, eps: float):
        return sdp_correct(solution, eps)

    def objective(self, solution: SdpMatrix) -> float:
        if self.margin:
            return solution.margin
        return frobenius_inner(self.C, solution.matrix)


def sdp_correct(solution, eps: float):
    if isinstance(solution, Infeasible):
        return solution
    X = solution.matrix
    d = X.shape[0]
    return SdpMatrix(X + (3 * eps / d) * np.eye(d), margin=solution.margin)


def sdp_build(d: int, C, sparsity: int, eps: float, frobenius: float = 1.0) -> BoundedSdpProblem:
    return BoundedSdpProblem(d, C, sparsity, frobenius, eps=eps)


def saddle_to_sdp(d: int, sparsity: int, eps: float, frobenius: float = 1.0) -> BoundedSdpProblem:
    """Margin form: maximize sigma with <A_i, X> >= b_i + sigma for every streamed row."""
    return BoundedSdpProblem(d, None, sparsity, frobenius, margin=True, eps=eps)
